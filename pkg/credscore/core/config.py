import hashlib
import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, ValidationInfo, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..schemas import Algorithm, VectorizerConfig, VectorizerMode, VerificationConfig
from .errors import ConfigError

_ROOT_DIR = Path(__file__).resolve().parents[2]
load_dotenv(_ROOT_DIR / ".env")

RESOURCES_DIR = Path(__file__).resolve().parents[1] / "resources"
DEMO_CONFIG_PATH = RESOURCES_DIR / "demo" / "config.json"


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables or .env."""

    model_config = SettingsConfigDict(
        env_prefix="CREDSCORE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    app_name: str = "credscore"
    environment: str = "development"
    log_level: str = "INFO"
    price_base_url: Optional[str] = None
    http_timeout_seconds: float = 10.0


@lru_cache
def get_settings() -> Settings:
    return Settings()


def _resolve_path(value: Optional[Path], info: ValidationInfo) -> Optional[Path]:
    if value is None:
        return None
    base_dir = (info.context or {}).get("base_dir")
    if base_dir is not None and not value.is_absolute():
        return (Path(base_dir) / value).resolve()
    return value


class ResourceConfig(BaseModel):
    stopwords: Path = RESOURCES_DIR / "stopwords_es.txt"
    lemma_exceptions: Path = RESOURCES_DIR / "lemma_exceptions.csv"
    suffix_rules: Path = RESOURCES_DIR / "suffix_rules.txt"
    affect_lexicon: Path = RESOURCES_DIR / "affect_lexicon.csv"
    pos_lexicon: Path = RESOURCES_DIR / "pos_lexicon.csv"
    template: Path = RESOURCES_DIR / "explanation_template_en.txt"
    grids: Path = RESOURCES_DIR / "grids.json"

    @field_validator("*", mode="after")
    @classmethod
    def _resolve(cls, value: Path, info: ValidationInfo) -> Path:
        return _resolve_path(value, info)


class VectorizerSet(BaseModel):
    char: VectorizerConfig = VectorizerConfig(
        mode=VectorizerMode.CHAR, ngram_range=(3, 4), min_df=0.03, max_df=0.40
    )
    word: VectorizerConfig = VectorizerConfig(
        mode=VectorizerMode.WORD, ngram_range=(1, 1), min_df=0.01, max_df=0.23
    )
    char_wb: VectorizerConfig = VectorizerConfig(
        mode=VectorizerMode.CHAR_WB, ngram_range=(3, 5), min_df=0.02, max_df=0.26
    )

    def blocks(self) -> list[tuple[str, VectorizerConfig]]:
        return [("char", self.char), ("word", self.word), ("char_wb", self.char_wb)]


class LexiconConfig(BaseModel):
    fraction: float = Field(default=0.10, gt=0, le=1)
    # "unique": fraction of unique-term candidates; "all": of every distinct term
    candidate_base: Literal["unique", "all"] = "unique"


class FeatureConfig(BaseModel):
    currency_words: bool = False
    fre_base: float = 206.835
    fre_sentence_weight: float = 1.015
    fre_syllable_weight: float = 84.6
    ms_per_char: float = 14.69


class ModelConfig(BaseModel):
    algorithm: Algorithm = Algorithm.RF
    hyperparameters: dict[str, Any] = Field(default_factory=dict)
    grid_search: bool = False
    tune_vectorizers: bool = False
    folds: int = Field(default=10, ge=2)
    n_jobs: int = 1


class ExplainConfig(BaseModel):
    n_samples: int = Field(default=500, ge=50)
    top_k: int = Field(default=5, ge=1)
    kernel_width: Optional[float] = Field(default=None, gt=0)
    ridge_lambda: float = Field(default=1e-3, gt=0)


class PipelineConfig(BaseModel):
    posts: Path
    prices_dir: Optional[Path] = None
    price_base_url: Optional[str] = None
    ticker_dictionaries: list[Path] = Field(default_factory=list)
    social_metrics: Optional[Path] = None
    holidays: Optional[Path] = None
    output_dir: Path = Path("out")
    model_dir: Optional[Path] = None
    seed: int = 42
    resources: ResourceConfig = Field(default_factory=ResourceConfig)
    vectorizers: VectorizerSet = Field(default_factory=VectorizerSet)
    lexicon: LexiconConfig = Field(default_factory=LexiconConfig)
    features: FeatureConfig = Field(default_factory=FeatureConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    verification: VerificationConfig = Field(default_factory=VerificationConfig)
    explain: ExplainConfig = Field(default_factory=ExplainConfig)
    correlation_method: Literal["pearson", "spearman"] = "pearson"

    @field_validator("posts", "prices_dir", "social_metrics", "holidays", "output_dir", "model_dir")
    @classmethod
    def _resolve(cls, value: Optional[Path], info: ValidationInfo) -> Optional[Path]:
        return _resolve_path(value, info)

    @field_validator("ticker_dictionaries")
    @classmethod
    def _resolve_many(cls, value: list[Path], info: ValidationInfo) -> list[Path]:
        return [_resolve_path(path, info) for path in value]

    @property
    def artifacts_dir(self) -> Path:
        return self.model_dir or self.output_dir / "model"

    def effective_price_base_url(self) -> Optional[str]:
        return get_settings().price_base_url or self.price_base_url

    def digest(self) -> str:
        """Hash of the run-relevant configuration (output locations excluded)."""
        payload = self.model_dump(mode="json", exclude={"output_dir", "model_dir"})
        encoded = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(encoded).hexdigest()


def load_pipeline_config(
    path: Path,
    *,
    seed: Optional[int] = None,
    output_dir: Optional[Path] = None,
) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        config = PipelineConfig.model_validate(raw, context={"base_dir": path.resolve().parent})
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    updates: dict[str, Any] = {}
    if seed is not None:
        updates["seed"] = seed
    if output_dir is not None:
        updates["output_dir"] = Path(output_dir).resolve()
    return config.model_copy(update=updates) if updates else config
