"""Fitting, cross-validating and persisting the full hybrid pipeline."""

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from ..core.config import FeatureConfig, PipelineConfig, ResourceConfig
from ..core.errors import ModelError
from ..schemas import (
    AdvisorClassification,
    Category,
    CategoryLexicons,
    ClassificationRecord,
    CleanPost,
    EvalReport,
    ModelSpec,
    Post,
    TickerDictionary,
)
from .classify import DESCRIPTOR_FILE, MODEL_FILE, TrainedModel, load_grids, load_model, save_model, train
from .explain import load_template
from .features import FeatureExtractor, load_vocabularies
from .hybrid import HybridClassifier, lexicon_coverage
from .lexicon import induce_lexicons, lexicons_payload, load_lexicons
from .linguistics import AffectLexicon, DictionaryPosTagger
from .model_selection import advisor_metrics, evaluate, stratified_kfold
from .preprocess import Preprocessor, RuleLemmatizer, load_stopwords
from .reports import read_json, write_json

logger = logging.getLogger(__name__)

LEXICONS_FILE = "lexicons.json"
VOCABULARIES_FILE = "vectorizers.json"
WORD_FREQUENCIES_FILE = "word_frequencies.json"


@dataclass
class Resources:
    stopwords: frozenset[str]
    lemmatizer: RuleLemmatizer
    affect: AffectLexicon
    tagger: DictionaryPosTagger
    template: str
    grids: dict[str, Any]

    def preprocessor(self, dictionary: Optional[TickerDictionary] = None) -> Preprocessor:
        return Preprocessor(self.stopwords, self.lemmatizer, dictionary)


def load_resources(config: ResourceConfig) -> Resources:
    return Resources(
        stopwords=load_stopwords(config.stopwords),
        lemmatizer=RuleLemmatizer.from_files(config.lemma_exceptions, config.suffix_rules),
        affect=AffectLexicon.from_csv(config.affect_lexicon),
        tagger=DictionaryPosTagger.from_csv(config.pos_lexicon),
        template=load_template(config.template),
        grids=load_grids(config.grids),
    )


@dataclass
class FittedPipeline:
    lexicons: CategoryLexicons
    extractor: FeatureExtractor
    model: TrainedModel
    word_frequencies: dict[str, int] = field(default_factory=dict)

    def classifier(self) -> HybridClassifier:
        return HybridClassifier(self.lexicons, self.model, self.extractor)


def word_frequencies(cleans: Sequence[CleanPost]) -> dict[str, int]:
    counts = Counter(token for clean in cleans for token in clean.tokens)
    return dict(sorted(counts.items()))


def fit_pipeline(
    posts: Sequence[Post],
    cleans: Sequence[CleanPost],
    labels: Sequence[Category],
    config: PipelineConfig,
    resources: Resources,
    spec: ModelSpec,
    seed: int,
) -> FittedPipeline:
    lexicons = induce_lexicons(
        [clean.tokens for clean in cleans],
        labels,
        config.lexicon.fraction,
        candidate_base=config.lexicon.candidate_base,
    )
    extractor = FeatureExtractor.fit(
        [clean.clean_text for clean in cleans],
        config.vectorizers,
        resources.affect,
        resources.tagger,
        config.features,
    )
    X = extractor.transform(cleans, [post.text for post in posts])
    model = train(spec, X, labels, seed, feature_names=extractor.feature_names(), grids=resources.grids)
    return FittedPipeline(lexicons, extractor, model, word_frequencies(cleans))


@dataclass
class CrossValidationResult:
    records: list[ClassificationRecord]
    report: EvalReport
    by_advisor: list[AdvisorClassification]
    coverage: float


def cross_validate(
    posts: Sequence[Post],
    cleans: Sequence[CleanPost],
    labels: Sequence[Category],
    config: PipelineConfig,
    resources: Resources,
    spec: ModelSpec,
    seed: int,
) -> CrossValidationResult:
    """Out-of-fold hybrid predictions; lexicons and vocabularies are refit per fold."""
    folds = stratified_kfold(labels, config.model.folds, seed)
    records: list[Optional[ClassificationRecord]] = [None] * len(posts)
    fit_times, predict_times = [], []
    for number, (train_idx, test_idx) in enumerate(folds, start=1):
        started = time.perf_counter()
        fitted = fit_pipeline(
            [posts[i] for i in train_idx],
            [cleans[i] for i in train_idx],
            [labels[i] for i in train_idx],
            config,
            resources,
            spec,
            seed,
        )
        fit_times.append(time.perf_counter() - started)
        started = time.perf_counter()
        predicted = fitted.classifier().classify_many(
            [posts[i] for i in test_idx], [cleans[i] for i in test_idx]
        )
        predict_times.append(time.perf_counter() - started)
        for index, record in zip(test_idx, predicted):
            records[index] = record
        logger.info("fold %d/%d done", number, len(folds))

    if any(record is None for record in records):
        raise ModelError("cross-validation left posts unpredicted")
    predictions = [record.category for record in records]
    return CrossValidationResult(
        records=records,
        report=evaluate(
            predictions,
            labels,
            fit_seconds=float(np.mean(fit_times)),
            predict_seconds=float(np.mean(predict_times)),
        ),
        by_advisor=advisor_metrics([post.advisor_id for post in posts], predictions, labels),
        coverage=lexicon_coverage(records),
    )


def save_pipeline(fitted: FittedPipeline, directory: Path) -> list[Path]:
    directory = Path(directory)
    save_model(fitted.model, directory)
    return [
        write_json(directory / LEXICONS_FILE, lexicons_payload(fitted.lexicons)),
        write_json(directory / VOCABULARIES_FILE, fitted.extractor.vocabularies_payload()),
        write_json(directory / WORD_FREQUENCIES_FILE, fitted.word_frequencies),
    ]


def load_pipeline(directory: Path, resources: Resources, features: Optional[FeatureConfig] = None) -> FittedPipeline:
    directory = Path(directory)
    missing = [
        name
        for name in (DESCRIPTOR_FILE, MODEL_FILE, LEXICONS_FILE, VOCABULARIES_FILE, WORD_FREQUENCIES_FILE)
        if not (directory / name).is_file()
    ]
    if missing:
        raise ModelError(f"model artifacts missing in {directory}: {', '.join(missing)}; run train first")
    extractor = FeatureExtractor(
        load_vocabularies(directory / VOCABULARIES_FILE), resources.affect, resources.tagger, features
    )
    model = load_model(directory)
    if model.n_features != extractor.dimension:
        raise ModelError(
            f"model expects {model.n_features} features, vocabularies give {extractor.dimension}"
        )
    return FittedPipeline(
        lexicons=load_lexicons(directory / LEXICONS_FILE),
        extractor=extractor,
        model=model,
        word_frequencies=read_json(directory / WORD_FREQUENCIES_FILE),
    )
