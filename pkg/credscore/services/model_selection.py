import logging
from collections import Counter
from typing import Any, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from pydantic import ValidationError
from sklearn.metrics import confusion_matrix, f1_score
from sklearn.model_selection import ParameterGrid, StratifiedKFold

from ..core.errors import ModelError, VocabularyError
from ..schemas import (
    CLASS_ORDER,
    AdvisorClassification,
    Algorithm,
    Category,
    ClassMetrics,
    EvalReport,
    GridPointScore,
    GridSearchResult,
    ModelSpec,
    VectorizerConfig,
    VectorizerMode,
)
from .classify import encode_labels, train
from .vectorizer import fit_vectorizer, transform

logger = logging.getLogger(__name__)

Fold = tuple[np.ndarray, np.ndarray]


def stratified_kfold(y: Sequence[Category], k: int = 10, seed: int = 0) -> list[Fold]:
    """(train, test) index pairs; every fold keeps class shares within one sample."""
    if k < 2:
        raise ModelError(f"need at least 2 folds, got {k}")
    counts = Counter(Category(label) for label in y)
    small = sorted(category.value for category, count in counts.items() if count < k)
    if small:
        raise ModelError(f"classes with fewer than {k} members: {', '.join(small)}")
    labels = encode_labels(y)
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return [(train_idx, test_idx) for train_idx, test_idx in splitter.split(np.zeros(len(labels)), labels)]


def _score_point(
    spec: ModelSpec,
    X: Any,
    y: Sequence[Category],
    folds: Sequence[Fold],
    seed: int,
    grids: Optional[dict[str, Any]],
    strict: bool,
) -> float:
    labels = encode_labels(y)
    scores = []
    for train_idx, test_idx in folds:
        model = train(spec, X[train_idx], [y[i] for i in train_idx], seed, grids=grids, strict=strict)
        predicted = encode_labels(model.predict(X[test_idx]))
        present = sorted(set(labels[test_idx]) | set(predicted))
        scores.append(f1_score(labels[test_idx], predicted, labels=present, average="macro", zero_division=0))
    return float(np.mean(scores))


def grid_search(
    algorithm: Algorithm,
    grid: dict[str, list[Any]],
    X: Any,
    y: Sequence[Category],
    k: int = 10,
    seed: int = 0,
    *,
    n_jobs: int = 1,
    grids: Optional[dict[str, Any]] = None,
    strict: bool = True,
) -> GridSearchResult:
    """Exhaustive search by mean macro-F1; ties go to the earliest grid point."""
    points = list(ParameterGrid(grid))
    if not points:
        raise ModelError("empty hyperparameter grid")
    folds = stratified_kfold(y, k, seed)
    specs = [ModelSpec(algorithm=algorithm, hyperparameters=point) for point in points]
    logger.info("grid search %s: %d points x %d folds", algorithm.value, len(specs), k)
    scores = Parallel(n_jobs=n_jobs)(
        delayed(_score_point)(spec, X, list(y), folds, seed, grids, strict) for spec in specs
    )
    best_index = 0
    for index, score in enumerate(scores):
        if score > scores[best_index]:
            best_index = index
    return GridSearchResult(
        best=specs[best_index],
        best_score=scores[best_index],
        scores=[
            GridPointScore(hyperparameters=spec.hyperparameters, mean_macro_f1=score)
            for spec, score in zip(specs, scores)
        ],
    )


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return 100.0 * numerator / denominator if denominator else None


def class_metrics(matrix: np.ndarray, index: int) -> ClassMetrics:
    tp = int(matrix[index, index])
    fp = int(matrix[:, index].sum()) - tp
    fn = int(matrix[index, :].sum()) - tp
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    undefined = [name for name, value in (("precision", precision), ("recall", recall)) if value is None]
    precision, recall = precision or 0.0, recall or 0.0
    if precision + recall == 0:
        f1 = 0.0
        if not undefined:
            undefined.append("f1")
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return ClassMetrics(precision=precision, recall=recall, f1=f1, support=tp + fn, undefined=undefined)


def evaluate(
    predictions: Sequence[Category],
    truth: Sequence[Category],
    *,
    fit_seconds: Optional[float] = None,
    predict_seconds: Optional[float] = None,
) -> EvalReport:
    if len(predictions) != len(truth):
        raise ModelError(f"{len(predictions)} predictions for {len(truth)} labels")
    matrix = confusion_matrix(
        encode_labels(truth), encode_labels(predictions), labels=list(range(len(CLASS_ORDER)))
    )
    return EvalReport(
        drop=class_metrics(matrix, CLASS_ORDER.index(Category.DROP)),
        rise=class_metrics(matrix, CLASS_ORDER.index(Category.RISE)),
        fit_seconds=fit_seconds,
        predict_seconds=predict_seconds,
    )


def advisor_metrics(
    advisor_ids: Sequence[str],
    predictions: Sequence[Category],
    truth: Sequence[Category],
) -> list[AdvisorClassification]:
    rows = []
    for advisor_id in sorted(set(advisor_ids)):
        idx = [i for i, owner in enumerate(advisor_ids) if owner == advisor_id]
        report = evaluate([predictions[i] for i in idx], [truth[i] for i in idx])
        counts = Counter(Category(truth[i]) for i in idx)
        rows.append(
            AdvisorClassification(
                advisor_id=advisor_id,
                drop_samples=counts[Category.DROP],
                rise_samples=counts[Category.RISE],
                other_samples=counts[Category.OTHER],
                drop_precision=report.drop.precision,
                rise_precision=report.rise.precision,
                drop_recall=report.drop.recall,
                rise_recall=report.rise.recall,
            )
        )
    return rows


def _score_vectorizer(
    config: VectorizerConfig,
    texts: Sequence[str],
    y: Sequence[Category],
    spec: ModelSpec,
    folds: Sequence[Fold],
    seed: int,
    grids: Optional[dict[str, Any]],
) -> Optional[float]:
    labels = encode_labels(y)
    scores = []
    for train_idx, test_idx in folds:
        train_texts = [texts[i] for i in train_idx]
        try:
            vocab = fit_vectorizer(train_texts, config)
        except VocabularyError:
            return None
        model = train(spec, transform(train_texts, vocab), [y[i] for i in train_idx], seed, grids=grids)
        predicted = encode_labels(model.predict(transform([texts[i] for i in test_idx], vocab)))
        present = sorted(set(labels[test_idx]) | set(predicted))
        scores.append(f1_score(labels[test_idx], predicted, labels=present, average="macro", zero_division=0))
    return float(np.mean(scores))


def vectorizer_grid_search(
    mode: VectorizerMode,
    grid: dict[str, list[Any]],
    texts: Sequence[str],
    y: Sequence[Category],
    spec: ModelSpec,
    k: int = 10,
    seed: int = 0,
    *,
    n_jobs: int = 1,
    grids: Optional[dict[str, Any]] = None,
) -> tuple[VectorizerConfig, float]:
    """Best n-gram settings for one block, scored on that block's counts alone.

    Points with invalid bounds or an empty vocabulary in some fold are skipped.
    """
    candidates = []
    for point in ParameterGrid(grid):
        try:
            candidates.append(VectorizerConfig(mode=mode, **point))
        except ValidationError:
            continue
    if not candidates:
        raise ModelError(f"no valid {mode.value} vectorizer settings in grid")
    folds = stratified_kfold(y, k, seed)
    logger.info("vectorizer search %s: %d points x %d folds", mode.value, len(candidates), k)
    scores = Parallel(n_jobs=n_jobs)(
        delayed(_score_vectorizer)(config, list(texts), list(y), spec, folds, seed, grids) for config in candidates
    )
    best_index = None
    for index, score in enumerate(scores):
        if score is not None and (best_index is None or score > scores[best_index]):
            best_index = index
    if best_index is None:
        raise VocabularyError(f"every {mode.value} vectorizer setting produced an empty vocabulary")
    return candidates[best_index], scores[best_index]
