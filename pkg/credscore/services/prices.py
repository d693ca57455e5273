import logging
from datetime import date
from pathlib import Path
from typing import Optional, Protocol

import requests
from pydantic import ValidationError

from ..core.config import get_settings
from ..core.errors import PriceDataError
from ..schemas import PriceBar, PriceSeries
from .corpus import load_price_csv

logger = logging.getLogger(__name__)


class PriceProvider(Protocol):
    def get_series(self, ticker: str, start: date, end: date) -> Optional[PriceSeries]: ...


def _clip(series: PriceSeries, start: date, end: date) -> PriceSeries:
    return PriceSeries(
        ticker=series.ticker,
        bars=tuple(bar for bar in series.bars if start <= bar.date <= end),
    )


class CsvPriceStore:
    """One `<TICKER>.csv` (date,open,high,low,close) per ticker in a directory."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self._cache: dict[str, Optional[PriceSeries]] = {}

    def load(self, ticker: str) -> Optional[PriceSeries]:
        ticker = ticker.upper()
        if ticker not in self._cache:
            path = self.directory / f"{ticker}.csv"
            self._cache[ticker] = load_price_csv(path, ticker) if path.is_file() else None
        return self._cache[ticker]

    def get_series(self, ticker: str, start: date, end: date) -> Optional[PriceSeries]:
        series = self.load(ticker)
        return _clip(series, start, end) if series is not None else None


class HttpPriceProvider:
    """GET `<base_url>/<TICKER>?from=&to=` returning `[{date,open,high,low,close}]`."""

    def __init__(self, base_url: str, *, timeout: Optional[float] = None, session: Optional[requests.Session] = None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout if timeout is not None else get_settings().http_timeout_seconds
        self.session = session or requests.Session()

    def get_series(self, ticker: str, start: date, end: date) -> Optional[PriceSeries]:
        ticker = ticker.upper()
        url = f"{self.base_url}/{ticker}"
        params = {"from": start.isoformat(), "to": end.isoformat()}
        try:
            response = self.session.get(url, params=params, timeout=self.timeout)
        except requests.RequestException as exc:
            raise PriceDataError(f"price provider unavailable for {ticker}: {exc}") from exc
        if response.status_code == 404:
            return None
        if response.status_code != 200:
            raise PriceDataError(f"price provider error {response.status_code} for {ticker}")
        try:
            payload = response.json()
        except ValueError as exc:
            raise PriceDataError(f"price provider response invalid for {ticker}") from exc
        if not isinstance(payload, list):
            raise PriceDataError(f"price provider response invalid for {ticker}")

        bars = []
        for row_no, item in enumerate(payload, start=1):
            try:
                bars.append(PriceBar.model_validate(item))
            except ValidationError as exc:
                raise PriceDataError(f"{ticker}: {exc.errors()[0]['msg']}", row=row_no) from exc
        bars.sort(key=lambda bar: bar.date)
        try:
            return PriceSeries(ticker=ticker, bars=tuple(bars))
        except ValidationError as exc:
            raise PriceDataError(f"{ticker}: {exc.errors()[0]['msg']}") from exc
