import logging
from collections import defaultdict
from datetime import date, datetime, timedelta
from typing import Iterable, Optional, Sequence
from zoneinfo import ZoneInfo

import pandas as pd

from ..core.errors import PriceDataError
from ..schemas import (
    FORECAST_CATEGORIES,
    Category,
    ClassificationRecord,
    CredibilityRank,
    ForecastOutcome,
    OutcomeStatus,
    PriceSeries,
    VerificationConfig,
)
from .prices import PriceProvider

logger = logging.getLogger(__name__)

WORK_DAYS_PER_WEEK = 5
# Calendar days searched before the publish date for the baseline close.
BASELINE_LOOKBACK_DAYS = 14

NO_BASELINE = "no baseline"
NO_WINDOW_DATA = "insufficient window data"
CLASSIFIED_OTHER = "classified other"
NO_TICKER = "no ticker"
NO_SERIES = "no price series"
PRICE_UNAVAILABLE = "price data unavailable"


def publish_day(published_at: datetime, config: VerificationConfig) -> date:
    return published_at.astimezone(ZoneInfo(config.exchange_timezone)).date()


def trading_window(publish_date: date, config: VerificationConfig) -> list[date]:
    """Trading days in the work weeks strictly after the publish date.

    Holidays shrink the window rather than extend it.
    """
    weekdays = pd.bdate_range(
        start=publish_date + timedelta(days=1),
        periods=config.window_weeks * WORK_DAYS_PER_WEEK,
    )
    return [day.date() for day in weekdays if config.calendar.is_trading_day(day.date())]


def _indeterminate(category: Category, reason: str, **fields) -> ForecastOutcome:
    return ForecastOutcome(category=category, status=OutcomeStatus.INDETERMINATE, reason=reason, **fields)


def verify_forecast(
    category: Category,
    series: Optional[PriceSeries],
    publish_date: date,
    config: Optional[VerificationConfig] = None,
    *,
    post_id: str = "",
    advisor_id: str = "",
    ticker: Optional[str] = None,
) -> ForecastOutcome:
    config = config or VerificationConfig()
    ids = {"post_id": post_id, "advisor_id": advisor_id, "ticker": ticker}
    if category not in FORECAST_CATEGORIES:
        return _indeterminate(category, CLASSIFIED_OTHER, **ids)
    if series is None:
        return _indeterminate(category, NO_SERIES, **ids)
    baseline_bar = series.bar_on_or_before(publish_date)
    if baseline_bar is None:
        return _indeterminate(category, NO_BASELINE, **ids)
    baseline = baseline_bar.close

    window = trading_window(publish_date, config)
    window_days = set(window)
    bars = [bar for bar in series.bars if bar.date in window_days]
    if not window or not bars:
        return _indeterminate(category, NO_WINDOW_DATA, baseline_close=baseline, **ids)

    if category is Category.DROP:
        limit = baseline * (1 - config.threshold_fraction)
        trigger = next((bar for bar in bars if bar.low <= limit), None)
    else:
        limit = baseline * (1 + config.threshold_fraction)
        trigger = next((bar for bar in bars if bar.high >= limit), None)

    if trigger is not None:
        return ForecastOutcome(
            category=category,
            status=OutcomeStatus.SUCCESS,
            baseline_close=baseline,
            trigger_date=trigger.date,
            **ids,
        )
    if series.last_date < window[-1]:
        return _indeterminate(category, NO_WINDOW_DATA, baseline_close=baseline, **ids)
    return ForecastOutcome(category=category, status=OutcomeStatus.FAILURE, baseline_close=baseline, **ids)


def verify_post(
    record: ClassificationRecord,
    published_at: datetime,
    provider: Optional[PriceProvider],
    config: Optional[VerificationConfig] = None,
) -> list[ForecastOutcome]:
    """One outcome per (post, ticker); a post without tickers yields one Indeterminate."""
    config = config or VerificationConfig()
    ids = {"post_id": record.post_id, "advisor_id": record.advisor_id}
    if record.category not in FORECAST_CATEGORIES:
        return [_indeterminate(record.category, CLASSIFIED_OTHER, **ids)]
    if not record.tickers:
        return [_indeterminate(record.category, NO_TICKER, **ids)]

    day = publish_day(published_at, config)
    window = trading_window(day, config)
    end = window[-1] if window else day
    outcomes = []
    for ticker in record.tickers:
        series = None
        if provider is not None:
            try:
                series = provider.get_series(ticker, day - timedelta(days=BASELINE_LOOKBACK_DAYS), end)
            except PriceDataError as exc:
                logger.warning("price data unavailable for %s (post %s): %s", ticker, record.post_id, exc)
                outcomes.append(_indeterminate(record.category, PRICE_UNAVAILABLE, ticker=ticker, **ids))
                continue
        if series is None:
            logger.warning("no price series for %s (post %s)", ticker, record.post_id)
        outcomes.append(verify_forecast(record.category, series, day, config, ticker=ticker, **ids))
    return outcomes


def _quality(successes: int, verified: int) -> Optional[float]:
    return successes / verified if verified else None


def assess_advisor(advisor_id: str, outcomes: Iterable[ForecastOutcome]) -> CredibilityRank:
    verified = {Category.DROP: 0, Category.RISE: 0}
    successes = {Category.DROP: 0, Category.RISE: 0}
    indeterminate = 0
    for outcome in outcomes:
        if outcome.status is OutcomeStatus.INDETERMINATE or outcome.category not in verified:
            indeterminate += 1
            continue
        verified[outcome.category] += 1
        successes[outcome.category] += outcome.status is OutcomeStatus.SUCCESS
    return CredibilityRank(
        advisor_id=advisor_id,
        drop_quality=_quality(successes[Category.DROP], verified[Category.DROP]),
        rise_quality=_quality(successes[Category.RISE], verified[Category.RISE]),
        global_quality=_quality(sum(successes.values()), sum(verified.values())),
        drop_verified=verified[Category.DROP],
        rise_verified=verified[Category.RISE],
        drop_successes=successes[Category.DROP],
        rise_successes=successes[Category.RISE],
        indeterminate=indeterminate,
    )


def rank_advisors(
    outcomes: Iterable[ForecastOutcome],
    advisor_ids: Sequence[str] = (),
) -> list[CredibilityRank]:
    """Best global quality first; advisors without verified forecasts last."""
    grouped: dict[str, list[ForecastOutcome]] = defaultdict(list)
    for advisor_id in advisor_ids:
        grouped.setdefault(advisor_id, [])
    for outcome in outcomes:
        grouped[outcome.advisor_id].append(outcome)
    ranks = [assess_advisor(advisor_id, items) for advisor_id, items in grouped.items()]
    return sorted(
        ranks,
        key=lambda rank: (rank.global_quality is None, -(rank.global_quality or 0.0), rank.advisor_id),
    )
