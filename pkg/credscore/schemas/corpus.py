from datetime import date, datetime
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


class Category(str, Enum):
    DROP = "drop"
    RISE = "rise"
    OTHER = "other"

    @property
    def display_name(self) -> str:
        return CATEGORY_DISPLAY_NAMES[self]


# Frozen class order; every tie-break in classification follows it.
CLASS_ORDER: tuple[Category, ...] = (Category.DROP, Category.RISE, Category.OTHER)
FORECAST_CATEGORIES: tuple[Category, ...] = (Category.DROP, Category.RISE)

CATEGORY_DISPLAY_NAMES = {
    Category.DROP: "short-term drop",
    Category.RISE: "short-term rise",
    Category.OTHER: "other",
}


class Post(FrozenModel):
    id: str
    advisor_id: str
    published_at: datetime
    text: str
    cashtags: list[str] = Field(default_factory=list)
    hashtags: list[str] = Field(default_factory=list)

    @field_validator("text")
    @classmethod
    def _text_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("empty text")
        return value


class LabeledPost(FrozenModel):
    post: Post
    label: Optional[Category] = None


class PriceBar(FrozenModel):
    date: date
    open: float = Field(gt=0)
    high: float = Field(gt=0)
    low: float = Field(gt=0)
    close: float = Field(gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "PriceBar":
        if self.low > self.high:
            raise ValueError("low>high")
        if self.low > min(self.open, self.close):
            raise ValueError("low>min(open,close)")
        if self.high < max(self.open, self.close):
            raise ValueError("high<max(open,close)")
        return self


class PriceSeries(FrozenModel):
    ticker: str
    bars: tuple[PriceBar, ...]

    @model_validator(mode="after")
    def _check_dates(self) -> "PriceSeries":
        for previous, current in zip(self.bars, self.bars[1:]):
            if current.date <= previous.date:
                raise ValueError(f"dates not strictly increasing at {current.date.isoformat()}")
        return self

    def bar_on_or_before(self, day: date) -> Optional[PriceBar]:
        candidate = None
        for bar in self.bars:
            if bar.date > day:
                break
            candidate = bar
        return candidate

    @property
    def last_date(self) -> Optional[date]:
        return self.bars[-1].date if self.bars else None


class TickerDictionary(FrozenModel):
    """Alias (lowercase) -> canonical uppercase ticker."""

    aliases: dict[str, str]

    @field_validator("aliases")
    @classmethod
    def _normalize(cls, value: dict[str, str]) -> dict[str, str]:
        return {alias.strip().lower(): ticker.strip().upper() for alias, ticker in value.items()}

    def lookup(self, alias: str) -> Optional[str]:
        return self.aliases.get(alias.lstrip("#").strip().lower())

    def __len__(self) -> int:
        return len(self.aliases)


class SocialMetrics(FrozenModel):
    # avg <= max is not enforced.
    advisor_id: str
    followers: float = Field(ge=0)
    retweets_avg: float = Field(ge=0)
    retweets_max: float = Field(ge=0)
    likes_avg: float = Field(ge=0)
    likes_max: float = Field(ge=0)
    replies_avg: float = Field(ge=0)
    replies_max: float = Field(ge=0)


SOCIAL_METRIC_FIELDS: tuple[str, ...] = (
    "followers",
    "retweets_avg",
    "retweets_max",
    "likes_avg",
    "likes_max",
    "replies_avg",
    "replies_max",
)


class CleanPost(FrozenModel):
    post_id: str
    tickers: list[str]
    tokens: list[str]
    clean_text: str


class CategoryShare(BaseModel):
    advisor_id: str
    total: int
    drop_pct: float
    rise_pct: float
    other_pct: float
    unlabeled: int = 0


class CorpusSummary(BaseModel):
    posts: int
    advisors: int
    by_advisor: list[CategoryShare]
    overall: CategoryShare
