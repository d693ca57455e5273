from datetime import date, datetime, timezone
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from credscore.core.config import RESOURCES_DIR, VectorizerSet
from credscore.schemas import Category, CleanPost, LabeledPost, Post, PriceBar, PriceSeries

DEMO_DIR = RESOURCES_DIR / "demo"


def make_post(
    post_id: str,
    text: str,
    *,
    advisor_id: str = "adv",
    published_at: Optional[datetime] = None,
) -> Post:
    return Post(
        id=post_id,
        advisor_id=advisor_id,
        published_at=published_at or datetime(2024, 1, 8, 12, 0, tzinfo=timezone.utc),
        text=text,
    )


def make_clean(post_id: str, tokens: Sequence[str], tickers: Sequence[str] = ()) -> CleanPost:
    return CleanPost(post_id=post_id, tickers=list(tickers), tokens=list(tokens), clean_text=" ".join(tokens))


def flat_bar(day: date, price: float, *, low: Optional[float] = None, high: Optional[float] = None) -> PriceBar:
    return PriceBar(
        date=day,
        open=price,
        close=price,
        low=price if low is None else low,
        high=price if high is None else high,
    )


def weekdays(start: date, count: int) -> list[date]:
    return [day.date() for day in pd.bdate_range(start=start, periods=count)]


def random_series(rng: np.random.Generator, start: date, count: int, ticker: str = "TST") -> PriceSeries:
    bars = []
    close = 100.0
    for day in weekdays(start, count):
        open_ = close
        close = open_ * (1 + rng.normal(0, 0.02))
        high = max(open_, close) * (1 + rng.uniform(0, 0.02))
        low = min(open_, close) * (1 - rng.uniform(0, 0.02))
        bars.append(PriceBar(date=day, open=open_, high=high, low=low, close=close))
    return PriceSeries(ticker=ticker, bars=tuple(bars))


def labeled_corpus(rows: Sequence[tuple[str, Category]], advisor_id: str = "adv") -> list[LabeledPost]:
    return [
        LabeledPost(post=make_post(f"p{index}", text, advisor_id=advisor_id), label=label)
        for index, (text, label) in enumerate(rows)
    ]


def small_vectorizers() -> VectorizerSet:
    """Loose document-frequency bounds that still yield terms on a handful of posts."""
    return VectorizerSet.model_validate(
        {
            "char": {"mode": "char", "ngram_range": [3, 4], "min_df": 0.1, "max_df": 0.5},
            "word": {"mode": "word", "ngram_range": [1, 1], "min_df": 0.1, "max_df": 0.5},
            "char_wb": {"mode": "char_wb", "ngram_range": [3, 5], "min_df": 0.1, "max_df": 0.5},
        }
    )
