from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest
import requests

from credscore.core.errors import PriceDataError
from credscore.schemas import (
    Category,
    ClassificationRecord,
    ClassificationSource,
    ForecastOutcome,
    OutcomeStatus,
    PriceBar,
    PriceSeries,
    VerificationConfig,
    WeekdayCalendar,
)
from credscore.services.prices import HttpPriceProvider
from credscore.services.verify import (
    CLASSIFIED_OTHER,
    NO_BASELINE,
    NO_SERIES,
    NO_TICKER,
    NO_WINDOW_DATA,
    PRICE_UNAVAILABLE,
    assess_advisor,
    publish_day,
    rank_advisors,
    trading_window,
    verify_forecast,
    verify_post,
)

from factories import flat_bar, random_series, weekdays

D, R, O = Category.DROP, Category.RISE, Category.OTHER
MONDAY = date(2024, 1, 8)


def flat_series(start: date, count: int, price: float = 100.0, **overrides: PriceBar) -> PriceSeries:
    bars = {day: flat_bar(day, price) for day in weekdays(start, count)}
    for bar in overrides.values():
        bars[bar.date] = bar
    return PriceSeries(ticker="SAN", bars=tuple(bars[day] for day in sorted(bars)))


def oracle(category, series, publish, threshold, weeks):
    before = [bar for bar in series.bars if bar.date <= publish]
    if not before:
        return OutcomeStatus.INDETERMINATE
    baseline = before[-1].close
    days, day = [], publish
    while len(days) < weeks * 5:
        day += timedelta(days=1)
        if day.weekday() < 5:
            days.append(day)
    bars = [bar for bar in series.bars if bar.date in set(days)]
    if not bars:
        return OutcomeStatus.INDETERMINATE
    for bar in bars:
        if category is D and bar.low <= baseline * (1 - threshold):
            return OutcomeStatus.SUCCESS
        if category is R and bar.high >= baseline * (1 + threshold):
            return OutcomeStatus.SUCCESS
    if series.bars[-1].date < days[-1]:
        return OutcomeStatus.INDETERMINATE
    return OutcomeStatus.FAILURE


def test_matches_oracle_on_random_series():
    rng = np.random.default_rng(2024)
    config = VerificationConfig()
    seen = set()
    for _ in range(1000):
        series = random_series(rng, date(2024, 1, 1), int(rng.integers(5, 40)))
        publish = date(2024, 1, 1) + timedelta(days=int(rng.integers(-3, 25)))
        category = D if rng.random() < 0.5 else R
        outcome = verify_forecast(category, series, publish, config)
        assert outcome.status is oracle(category, series, publish, 0.03, 3)
        seen.add(outcome.status)
    assert seen == set(OutcomeStatus)


def mirror(series: PriceSeries, baseline: float) -> PriceSeries:
    return PriceSeries(
        ticker=series.ticker,
        bars=tuple(
            PriceBar(
                date=bar.date,
                open=2 * baseline - bar.open,
                high=2 * baseline - bar.low,
                low=2 * baseline - bar.high,
                close=2 * baseline - bar.close,
            )
            for bar in series.bars
        ),
    )


def test_drop_and_rise_are_mirror_images():
    rng = np.random.default_rng(7)
    for _ in range(200):
        series = random_series(rng, date(2024, 1, 1), 30)
        publish = series.bars[int(rng.integers(0, 10))].date
        baseline = series.bar_on_or_before(publish).close
        drop = verify_forecast(D, series, publish)
        rise = verify_forecast(R, mirror(series, baseline), publish)
        assert (drop.status, drop.trigger_date) == (rise.status, rise.trigger_date)


def test_success_is_monotone_in_threshold():
    rng = np.random.default_rng(11)
    thresholds = [0.01, 0.02, 0.03, 0.05, 0.08]
    for _ in range(200):
        series = random_series(rng, date(2024, 1, 1), 30)
        publish = series.bars[int(rng.integers(0, 10))].date
        for category in (D, R):
            successes = [
                verify_forecast(category, series, publish, VerificationConfig(threshold_fraction=t)).status
                is OutcomeStatus.SUCCESS
                for t in thresholds
            ]
            assert successes == sorted(successes, reverse=True)


def test_drop_succeeds_on_intraday_low():
    series = flat_series(MONDAY, 20, low=flat_bar(date(2024, 1, 17), 99.0, low=96.0))
    outcome = verify_forecast(D, series, MONDAY, post_id="p1", advisor_id="a", ticker="SAN")
    assert outcome.status is OutcomeStatus.SUCCESS
    assert outcome.trigger_date == date(2024, 1, 17)
    assert outcome.baseline_close == 100.0
    assert (outcome.post_id, outcome.advisor_id, outcome.ticker) == ("p1", "a", "SAN")


def test_rise_just_below_threshold_fails():
    series = flat_series(MONDAY, 20, high=flat_bar(date(2024, 1, 10), 100.0, high=102.9))
    outcome = verify_forecast(R, series, MONDAY)
    assert outcome.status is OutcomeStatus.FAILURE
    assert outcome.trigger_date is None


def test_move_on_publish_day_does_not_count():
    series = flat_series(MONDAY, 20, low=flat_bar(MONDAY, 100.0, low=90.0))
    assert verify_forecast(D, series, MONDAY).status is OutcomeStatus.FAILURE


def test_window_after_friday_and_weekend_posts():
    config = VerificationConfig()
    friday, saturday = date(2024, 1, 12), date(2024, 1, 13)
    window = trading_window(friday, config)
    assert window[0] == date(2024, 1, 15)
    assert window[-1] == date(2024, 2, 2)
    assert len(window) == 15
    assert trading_window(saturday, config) == window

    series = flat_series(date(2024, 1, 1), 30)
    saturday_outcome = verify_forecast(D, series, saturday, config)
    assert saturday_outcome.baseline_close == series.bar_on_or_before(friday).close


def test_holidays_shrink_the_window():
    config = VerificationConfig(calendar=WeekdayCalendar(holidays=frozenset({date(2024, 1, 16)})))
    window = trading_window(date(2024, 1, 12), config)
    assert len(window) == 14
    assert date(2024, 1, 16) not in window
    assert window[-1] == date(2024, 2, 2)


def test_short_series_is_indeterminate_unless_triggered():
    quiet = flat_series(MONDAY, 5)
    outcome = verify_forecast(D, quiet, MONDAY)
    assert (outcome.status, outcome.reason) == (OutcomeStatus.INDETERMINATE, NO_WINDOW_DATA)

    moved = flat_series(MONDAY, 5, low=flat_bar(date(2024, 1, 10), 95.0))
    assert verify_forecast(D, moved, MONDAY).status is OutcomeStatus.SUCCESS


@pytest.mark.parametrize(
    "category, series, reason",
    [
        (O, None, CLASSIFIED_OTHER),
        (D, None, NO_SERIES),
        (R, flat_series(date(2024, 1, 15), 20), NO_BASELINE),
        (R, flat_series(date(2024, 1, 1), 5), NO_WINDOW_DATA),
    ],
)
def test_indeterminate_reasons(category, series, reason):
    outcome = verify_forecast(category, series, MONDAY)
    assert outcome.status is OutcomeStatus.INDETERMINATE
    assert outcome.reason == reason


class DictProvider:
    def __init__(self, series: dict[str, PriceSeries]):
        self.series = series
        self.requests: list[tuple[str, date, date]] = []

    def get_series(self, ticker, start, end):
        self.requests.append((ticker, start, end))
        return self.series.get(ticker)


def record(category, tickers):
    return ClassificationRecord(
        post_id="p1", advisor_id="a", category=category, source=ClassificationSource.ML, tickers=tickers
    )


def test_verify_post_per_ticker():
    provider = DictProvider({"SAN": flat_series(date(2024, 1, 1), 30, low=flat_bar(date(2024, 1, 15), 95.0))})
    published = datetime(2024, 1, 12, 23, 30, tzinfo=timezone.utc)
    outcomes = verify_post(record(D, ["SAN", "NNOX"]), published, provider)

    assert [(outcome.ticker, outcome.status) for outcome in outcomes] == [
        ("SAN", OutcomeStatus.SUCCESS),
        ("NNOX", OutcomeStatus.INDETERMINATE),
    ]
    assert outcomes[1].reason == NO_SERIES
    ticker, start, end = provider.requests[0]
    assert (ticker, start, end) == ("SAN", date(2023, 12, 30), date(2024, 2, 2))


def test_verify_post_without_forecast():
    published = datetime(2024, 1, 8, tzinfo=timezone.utc)
    assert verify_post(record(O, ["SAN"]), published, None)[0].reason == CLASSIFIED_OTHER
    assert verify_post(record(R, []), published, None)[0].reason == NO_TICKER


def test_publish_day_uses_exchange_time():
    late_friday = datetime(2024, 1, 12, 23, 30, tzinfo=timezone.utc)
    assert publish_day(late_friday, VerificationConfig()) == date(2024, 1, 13)
    assert publish_day(late_friday, VerificationConfig(exchange_timezone="America/New_York")) == date(2024, 1, 12)


def outcome(advisor_id, category, status):
    return ForecastOutcome(post_id="p", advisor_id=advisor_id, category=category, status=status)


def test_assess_advisor():
    rank = assess_advisor(
        "a",
        [
            outcome("a", D, OutcomeStatus.SUCCESS),
            outcome("a", D, OutcomeStatus.FAILURE),
            outcome("a", R, OutcomeStatus.SUCCESS),
            outcome("a", R, OutcomeStatus.SUCCESS),
            outcome("a", R, OutcomeStatus.INDETERMINATE),
            outcome("a", O, OutcomeStatus.INDETERMINATE),
        ],
    )
    assert (rank.drop_quality, rank.rise_quality, rank.global_quality) == (0.5, 1.0, 0.75)
    assert (rank.drop_verified, rank.rise_verified, rank.indeterminate) == (2, 2, 2)


def test_advisor_without_forecasts_has_no_quality():
    rank = assess_advisor("quiet", [outcome("quiet", O, OutcomeStatus.INDETERMINATE)])
    assert rank.global_quality is None and rank.drop_quality is None


def test_rank_order():
    outcomes = [
        outcome("b", D, OutcomeStatus.SUCCESS),
        outcome("c", D, OutcomeStatus.SUCCESS),
        outcome("a", R, OutcomeStatus.FAILURE),
        outcome("d", R, OutcomeStatus.SUCCESS),
        outcome("d", D, OutcomeStatus.FAILURE),
    ]
    ranks = rank_advisors(outcomes, ["e", "a"])
    assert [rank.advisor_id for rank in ranks] == ["b", "c", "d", "a", "e"]
    assert ranks[-1].global_quality is None


def test_global_quality_lies_between_category_qualities():
    rng = np.random.default_rng(11)
    statuses = list(OutcomeStatus)
    categories = [D, R, O]
    for _ in range(300):
        outcomes = [
            outcome("a", categories[rng.integers(3)], statuses[rng.integers(len(statuses))])
            for _ in range(rng.integers(0, 30))
        ]
        rank = assess_advisor("a", outcomes)
        defined = [quality for quality in (rank.drop_quality, rank.rise_quality) if quality is not None]
        if not defined:
            assert rank.global_quality is None
            continue
        assert min(defined) - 1e-12 <= rank.global_quality <= max(defined) + 1e-12


class FailingProvider:
    def get_series(self, ticker, start, end):
        if ticker == "BAD":
            raise PriceDataError(f"price provider error 503 for {ticker}")
        return flat_series(date(2024, 1, 1), 30, low=flat_bar(date(2024, 1, 15), 95.0))


def test_price_failure_for_one_ticker_keeps_the_rest():
    published = datetime(2024, 1, 12, 12, 0, tzinfo=timezone.utc)
    outcomes = verify_post(record(D, ["BAD", "SAN"]), published, FailingProvider())

    assert [(outcome.ticker, outcome.status) for outcome in outcomes] == [
        ("BAD", OutcomeStatus.INDETERMINATE),
        ("SAN", OutcomeStatus.SUCCESS),
    ]
    assert outcomes[0].reason == PRICE_UNAVAILABLE


class FakeResponse:
    def __init__(self, status_code, payload=None):
        self.status_code = status_code
        self.payload = payload

    def json(self):
        if self.payload is None:
            raise ValueError("no json")
        return self.payload


class FakeSession:
    def __init__(self, response=None, error=None):
        self.response = response
        self.error = error
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append((url, params, timeout))
        if self.error is not None:
            raise self.error
        return self.response


def http_bar(day, price=100.0, **fields):
    return {"date": day, "open": price, "high": price, "low": price, "close": price, **fields}


def http_provider(session):
    return HttpPriceProvider("https://prices.example/api/", timeout=3.0, session=session)


def test_http_provider_queries_ticker_range():
    session = FakeSession(FakeResponse(200, [http_bar("2024-01-03", 101.0), http_bar("2024-01-02")]))
    series = http_provider(session).get_series("san", date(2024, 1, 1), date(2024, 1, 31))

    assert session.calls == [
        ("https://prices.example/api/SAN", {"from": "2024-01-01", "to": "2024-01-31"}, 3.0)
    ]
    assert series.ticker == "SAN"
    assert [bar.date for bar in series.bars] == [date(2024, 1, 2), date(2024, 1, 3)]
    assert series.bars[1].close == 101.0


def test_http_provider_unknown_ticker_has_no_series():
    assert http_provider(FakeSession(FakeResponse(404))).get_series("NNOX", date(2024, 1, 1), date(2024, 1, 31)) is None


@pytest.mark.parametrize(
    "session, message",
    [
        (FakeSession(FakeResponse(503)), "error 503"),
        (FakeSession(error=requests.ConnectionError("refused")), "unavailable"),
        (FakeSession(FakeResponse(200)), "invalid"),
        (FakeSession(FakeResponse(200, {"bars": []})), "invalid"),
    ],
)
def test_http_provider_failures(session, message):
    with pytest.raises(PriceDataError, match=message):
        http_provider(session).get_series("SAN", date(2024, 1, 1), date(2024, 1, 31))


def test_http_provider_rejects_bad_bars():
    bad_bar = FakeSession(FakeResponse(200, [http_bar("2024-01-02"), http_bar("2024-01-03", low=120.0)]))
    with pytest.raises(PriceDataError) as excinfo:
        http_provider(bad_bar).get_series("SAN", date(2024, 1, 1), date(2024, 1, 31))
    assert excinfo.value.row == 2

    duplicated = FakeSession(FakeResponse(200, [http_bar("2024-01-02"), http_bar("2024-01-02", 99.0)]))
    with pytest.raises(PriceDataError, match="strictly increasing"):
        http_provider(duplicated).get_series("SAN", date(2024, 1, 1), date(2024, 1, 31))
