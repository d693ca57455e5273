from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class VectorizerMode(str, Enum):
    CHAR = "char"
    WORD = "word"
    CHAR_WB = "char_wb"


class VectorizerConfig(BaseModel):
    mode: VectorizerMode
    ngram_range: tuple[int, int]
    min_df: float
    max_df: float
    max_features: Optional[int] = None

    @model_validator(mode="after")
    def _check_bounds(self) -> "VectorizerConfig":
        lo, hi = self.ngram_range
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid ngram_range {self.ngram_range}")
        if not 0 < self.min_df < self.max_df <= 1:
            raise ValueError("document-frequency bounds must satisfy 0 < min_df < max_df <= 1")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be positive")
        return self


EMOTIONS: tuple[str, ...] = ("anger", "fear", "happiness", "sadness", "surprise")
POS_CLASSES: tuple[str, ...] = (
    "adjectives",
    "adverbs",
    "auxiliaries",
    "determiners",
    "nouns",
    "pronouns",
    "punctuation",
)


class ScalarFeatures(BaseModel):
    emotions: tuple[bool, bool, bool, bool, bool] = (False, False, False, False, False)
    complex_words: int = Field(default=0, ge=0)
    fre: float = 0.0
    hashtags: int = Field(default=0, ge=0)
    mer: float = 0.0
    neg_num: int = Field(default=0, ge=0)
    neg_per: int = Field(default=0, ge=0)
    polarity: int = Field(default=0, ge=-1, le=1)
    pos_dist: tuple[float, float, float, float, float, float, float] = (0.0,) * 7
    pos_num: int = Field(default=0, ge=0)
    pos_per: int = Field(default=0, ge=0)
    reading_time_ms: float = Field(default=0.0, ge=0)
    word_count: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_pos_dist(self) -> "ScalarFeatures":
        if any(value < 0 or value > 100 for value in self.pos_dist):
            raise ValueError("pos_dist entries must lie in [0, 100]")
        if sum(self.pos_dist) > 100 + 1e-9:
            raise ValueError("pos_dist must not sum above 100")
        return self

    def as_list(self) -> list[float]:
        """Values in SCALAR_FEATURE_NAMES order."""
        return [
            *(float(flag) for flag in self.emotions),
            float(self.complex_words),
            self.fre,
            float(self.hashtags),
            self.mer,
            float(self.neg_num),
            float(self.neg_per),
            float(self.polarity),
            *self.pos_dist,
            float(self.pos_num),
            float(self.pos_per),
            self.reading_time_ms,
            float(self.word_count),
        ]


# Frozen scalar layout: (internal name, display name). Display names follow the
# feature table used in explanations.
SCALAR_FEATURES: tuple[tuple[str, str], ...] = (
    *((f"emotion_{emotion}", f"Emotion ({emotion})") for emotion in EMOTIONS),
    ("complex_words", "Complex word counter"),
    ("fre", "FRE"),
    ("hashtags", "Hashtag counter"),
    ("mer", "MER"),
    ("neg_num", "Neg. num."),
    ("neg_per", "Neg. per."),
    ("polarity", "Polarity"),
    *((f"pos_{cls}", f"POS distributions ({cls})") for cls in POS_CLASSES),
    ("pos_num", "Pos. num."),
    ("pos_per", "Pos. per."),
    ("reading_time_ms", "Reading time"),
    ("word_count", "Word count"),
)
SCALAR_FEATURE_NAMES: tuple[str, ...] = tuple(name for name, _ in SCALAR_FEATURES)
SCALAR_DISPLAY_NAMES: dict[str, str] = dict(SCALAR_FEATURES)


class Vocabulary(BaseModel):
    mode: VectorizerMode
    ngram_range: tuple[int, int]
    terms: dict[str, int]
    document_frequency: dict[str, int]
    n_documents: int

    def __len__(self) -> int:
        return len(self.terms)

    def ordered_terms(self) -> list[str]:
        return sorted(self.terms, key=self.terms.__getitem__)


class FeatureVector(BaseModel):
    scalars: ScalarFeatures
    # block name ("char" | "word" | "char_wb") -> column index -> count
    counts: dict[str, dict[int, int]]
