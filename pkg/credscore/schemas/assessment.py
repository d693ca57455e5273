from datetime import date
from enum import Enum
from typing import Optional, Protocol, runtime_checkable

from pydantic import BaseModel, ConfigDict, Field

from .corpus import Category


@runtime_checkable
class TradingCalendar(Protocol):
    def is_trading_day(self, day: date) -> bool: ...


class WeekdayCalendar(BaseModel):
    """Monday-Friday trading calendar minus an explicit holiday set."""

    model_config = ConfigDict(frozen=True)

    holidays: frozenset[date] = frozenset()

    def is_trading_day(self, day: date) -> bool:
        return day.weekday() < 5 and day not in self.holidays


class VerificationConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    threshold_fraction: float = Field(default=0.03, gt=0, lt=1)
    window_weeks: int = Field(default=3, ge=1)
    exchange_timezone: str = "Europe/Madrid"
    calendar: TradingCalendar = Field(default_factory=WeekdayCalendar, exclude=True)


class OutcomeStatus(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    INDETERMINATE = "indeterminate"


class ForecastOutcome(BaseModel):
    post_id: str
    advisor_id: str = ""
    ticker: Optional[str] = None
    category: Category
    baseline_close: Optional[float] = None
    trigger_date: Optional[date] = None
    status: OutcomeStatus
    reason: Optional[str] = None


class CredibilityRank(BaseModel):
    advisor_id: str
    drop_quality: Optional[float] = None
    rise_quality: Optional[float] = None
    global_quality: Optional[float] = None
    drop_verified: int = 0
    rise_verified: int = 0
    drop_successes: int = 0
    rise_successes: int = 0
    indeterminate: int = 0


class CorrelationCell(BaseModel):
    r: Optional[float] = None
    n: int = 0
    undefined: bool = False


class CorrelationRow(BaseModel):
    metric: str
    drop: CorrelationCell
    rise: CorrelationCell
    global_: CorrelationCell = Field(alias="global")

    model_config = ConfigDict(populate_by_name=True)


class CorrelationTable(BaseModel):
    method: str
    rows: list[CorrelationRow]

    def cell(self, metric: str, column: str) -> CorrelationCell:
        for row in self.rows:
            if row.metric == metric:
                return row.global_ if column == "global" else getattr(row, column)
        raise KeyError(metric)


class Attribution(BaseModel):
    index: int
    name: str
    weight: float


class Explanation(BaseModel):
    post_id: str
    category: Category
    source: str
    matched_terms: list[str] = Field(default_factory=list)
    top_features: list[str] = Field(default_factory=list)
    rendered_text: str
