from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field

from .corpus import Category


class Algorithm(str, Enum):
    MNB = "mnb"
    CNB = "cnb"
    KNN = "knn"
    DT = "dt"
    RF = "rf"


class ModelSpec(BaseModel):
    algorithm: Algorithm
    hyperparameters: dict[str, Any] = Field(default_factory=dict)


class LexiconEntry(BaseModel):
    term: str
    freq: int


class CategoryLexicons(BaseModel):
    entries: dict[Category, list[LexiconEntry]]

    def terms(self, category: Category) -> list[str]:
        return [entry.term for entry in self.entries.get(category, [])]


class LexiconMatch(BaseModel):
    category: Category
    terms: list[str]


class ClassMetrics(BaseModel):
    precision: float
    recall: float
    f1: float
    support: int = 0
    # names of metrics whose denominator was zero (reported as 0)
    undefined: list[str] = Field(default_factory=list)


class EvalReport(BaseModel):
    drop: ClassMetrics
    rise: ClassMetrics
    fit_seconds: Optional[float] = None
    predict_seconds: Optional[float] = None


class AdvisorClassification(BaseModel):
    advisor_id: str
    drop_samples: int
    rise_samples: int
    other_samples: int
    drop_precision: float
    rise_precision: float
    drop_recall: float
    rise_recall: float


class GridPointScore(BaseModel):
    hyperparameters: dict[str, Any]
    mean_macro_f1: float


class GridSearchResult(BaseModel):
    best: ModelSpec
    best_score: float
    scores: list[GridPointScore]


class ClassificationSource(str, Enum):
    LEXICON = "lexicon"
    ML = "ml"


class ClassificationRecord(BaseModel):
    post_id: str
    advisor_id: str
    category: Category
    source: ClassificationSource
    tickers: list[str] = Field(default_factory=list)
    matched_terms: list[str] = Field(default_factory=list)
    scores: Optional[dict[Category, float]] = None
