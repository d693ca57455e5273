"""Shared loaders for the subcommands: config, resources, corpus, artifacts."""

import argparse
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

from ..core.config import DEMO_CONFIG_PATH, PipelineConfig, get_settings, load_pipeline_config
from ..core.errors import ConfigError
from ..schemas import (
    CleanPost,
    ClassificationRecord,
    LabeledPost,
    Post,
    TickerDictionary,
    VerificationConfig,
    WeekdayCalendar,
)
from ..services.corpus import load_holidays, load_posts, load_ticker_dictionary
from ..services.pipeline import FittedPipeline, Resources, load_pipeline, load_resources
from ..services.prices import CsvPriceStore, HttpPriceProvider, PriceProvider
from ..services.reports import read_jsonl, record_manifest

logger = logging.getLogger(__name__)

CLASSIFICATIONS_FILE = "classifications.jsonl"
COVERAGE_FILE = "coverage.json"
OUTCOMES_FILE = "outcomes.jsonl"
RANKINGS_FILE = "rankings.json"
RANKINGS_CSV = "rankings.csv"
CORRELATIONS_FILE = "correlations.json"
CORRELATIONS_CSV = "correlations.csv"
EXPLANATIONS_FILE = "explanations.jsonl"


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=Path,
        default=DEMO_CONFIG_PATH,
        help="pipeline config JSON (default: bundled demo fixture)",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", type=Path, default=None, help="override the output directory")


def require_paths(*paths: Optional[Path], what: str = "input") -> None:
    missing = [str(path) for path in paths if path is not None and not Path(path).exists()]
    if missing:
        raise ConfigError(f"missing {what}: {', '.join(missing)}")


@dataclass
class CommandContext:
    """Per-run state; expensive pieces load on first use."""

    name: str
    config: PipelineConfig
    outputs: list[str] = field(default_factory=list)

    @property
    def out_dir(self) -> Path:
        return self.config.output_dir

    def output(self, name: str) -> Path:
        if name not in self.outputs:
            self.outputs.append(name)
        return self.out_dir / name

    def existing_output(self, name: str, producer: str) -> Path:
        path = self.out_dir / name
        if not path.is_file():
            raise ConfigError(f"{path} not found; run `credscore {producer}` first")
        return path

    @cached_property
    def resources(self) -> Resources:
        config = self.config.resources
        require_paths(*config.model_dump().values(), what="resource file")
        return load_resources(config)

    @cached_property
    def dictionary(self) -> Optional[TickerDictionary]:
        if not self.config.ticker_dictionaries:
            return None
        require_paths(*self.config.ticker_dictionaries, what="ticker dictionary")
        return load_ticker_dictionary(self.config.ticker_dictionaries)

    @cached_property
    def verification(self) -> VerificationConfig:
        verification = self.config.verification
        if self.config.holidays is None:
            return verification
        require_paths(self.config.holidays, what="holiday file")
        calendar = WeekdayCalendar(holidays=load_holidays(self.config.holidays))
        return verification.model_copy(update={"calendar": calendar})

    @cached_property
    def price_provider(self) -> Optional[PriceProvider]:
        base_url = self.config.effective_price_base_url()
        if base_url:
            return HttpPriceProvider(base_url, timeout=get_settings().http_timeout_seconds)
        if self.config.prices_dir is None:
            logger.warning("no price source configured; every forecast will be indeterminate")
            return None
        require_paths(self.config.prices_dir, what="price directory")
        return CsvPriceStore(self.config.prices_dir)

    @cached_property
    def pipeline(self) -> FittedPipeline:
        return load_pipeline(self.config.artifacts_dir, self.resources, self.config.features)

    def load_corpus(self, *, require_labels: bool = False) -> list[LabeledPost]:
        require_paths(self.config.posts, what="posts file")
        return load_posts(self.config.posts, require_labels=require_labels)

    def preprocess(self, posts: Iterable[Post]) -> list[CleanPost]:
        preprocessor = self.resources.preprocessor(self.dictionary)
        return [preprocessor.run(post) for post in posts]

    def check_inputs(self) -> list[str]:
        """Load every configured side input so a bad file fails before any work."""
        checked = []
        if self.dictionary is not None:
            checked.append("ticker dictionary")
        if self.price_provider is not None:
            checked.append("price source")
        if self.verification.calendar is not None and self.config.holidays is not None:
            checked.append("holidays")
        return checked

    def load_classifications(self) -> list[ClassificationRecord]:
        path = self.existing_output(CLASSIFICATIONS_FILE, "classify")
        return [ClassificationRecord.model_validate(item) for item in read_jsonl(path)]

    def input_paths(self) -> list[Optional[Path]]:
        config = self.config
        return [
            config.posts,
            config.prices_dir,
            config.social_metrics,
            config.holidays,
            *config.ticker_dictionaries,
        ]

    def finish(self) -> None:
        record_manifest(
            self.out_dir,
            self.name,
            self.config.digest(),
            self.config.seed,
            self.input_paths(),
            self.outputs,
        )
        logger.info("%s: wrote %d file(s) to %s", self.name, len(self.outputs), self.out_dir)


def get_context(args: argparse.Namespace) -> CommandContext:
    config = load_pipeline_config(args.config, seed=args.seed, output_dir=args.out)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return CommandContext(name=args.command, config=config)
