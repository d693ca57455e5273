"""Fall-back ML classifiers over assembled feature rows.

Labels are encoded by their position in CLASS_ORDER, so every argmax over the
three score columns breaks ties as Drop < Rise < Other.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Protocol, Sequence

import joblib
import numpy as np
import scipy.sparse as sp
import sklearn
from sklearn.ensemble import RandomForestClassifier
from sklearn.naive_bayes import ComplementNB, MultinomialNB
from sklearn.neighbors import KNeighborsClassifier
from sklearn.tree import DecisionTreeClassifier

from ..core.config import RESOURCES_DIR
from ..core.errors import ModelError
from ..schemas import CLASS_ORDER, Algorithm, Category, ModelSpec
from .reports import write_json

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
MODEL_FILE = "model.joblib"
DESCRIPTOR_FILE = "model.json"
DEFAULT_GRIDS_PATH = RESOURCES_DIR / "grids.json"

DEFAULT_HYPERPARAMETERS: dict[Algorithm, dict[str, Any]] = {
    Algorithm.MNB: {"alpha": 0.25, "fit_prior": True},
    Algorithm.CNB: {"alpha": 0.25, "fit_prior": True, "norm": False},
    Algorithm.KNN: {
        "n_neighbors": 10,
        "weights": "distance",
        "algorithm": "kd_tree",
        "leaf_size": 10,
        "p": 1,
        "metric": "minkowski",
    },
    Algorithm.DT: {
        "criterion": "gini",
        "splitter": "best",
        "class_weight": None,
        "max_features": "sqrt",
        "max_depth": 100,
        "min_samples_split": 0.01,
        "min_samples_leaf": 1,
    },
    Algorithm.RF: {
        "n_estimators": 250,
        "criterion": "gini",
        "class_weight": None,
        "max_features": "sqrt",
        "max_depth": 50,
        "min_samples_split": 0.001,
        "min_samples_leaf": 0.0001,
    },
}

_ESTIMATORS = {
    Algorithm.MNB: MultinomialNB,
    Algorithm.CNB: ComplementNB,
    Algorithm.KNN: KNeighborsClassifier,
    Algorithm.DT: DecisionTreeClassifier,
    Algorithm.RF: RandomForestClassifier,
}
_SEEDED = {Algorithm.DT, Algorithm.RF}
_NAIVE_BAYES = {Algorithm.MNB, Algorithm.CNB}


def load_grids(path: Optional[Path] = None) -> dict[str, Any]:
    """Hyperparameter grids per algorithm plus vectorizer grids under "vectorizers"."""
    path = Path(path or DEFAULT_GRIDS_PATH)
    try:
        grids = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot read hyperparameter grids {path}: {exc}") from exc
    if not isinstance(grids, dict):
        raise ModelError(f"hyperparameter grids {path} must be a JSON object")
    return grids


def _coerce(name: str, value: Any) -> Any:
    if value == "None":
        return None
    # an integer 1 is not a valid split size; the grid value means "all samples"
    if name == "min_samples_split" and value == 1:
        return 1.0
    return value


def resolve_hyperparameters(
    spec: ModelSpec,
    grids: Optional[dict[str, Any]] = None,
    *,
    strict: bool = True,
) -> dict[str, Any]:
    """Defaults overlaid with the spec's values, checked against the grids.

    Unknown names always fail; with strict=False values outside the grid are
    accepted.
    """
    grids = grids if grids is not None else load_grids()
    grid = grids.get(spec.algorithm.value)
    if grid is None:
        raise ModelError(f"no hyperparameter grid for {spec.algorithm.value}")
    params = dict(DEFAULT_HYPERPARAMETERS[spec.algorithm])
    for name, value in spec.hyperparameters.items():
        if name not in grid:
            raise ModelError(f"unknown hyperparameter {name!r} for {spec.algorithm.value}")
        if strict and _coerce(name, value) not in [_coerce(name, allowed) for allowed in grid[name]]:
            raise ModelError(
                f"{spec.algorithm.value} {name}={value!r} outside grid {grid[name]!r}"
            )
        params[name] = value
    return {name: _coerce(name, value) for name, value in params.items()}


def encode_labels(y: Sequence[Category]) -> np.ndarray:
    return np.array([CLASS_ORDER.index(Category(label)) for label in y], dtype=int)


class ScoringModel(Protocol):
    @property
    def n_features(self) -> int: ...

    def predict_scores(self, X: Any) -> np.ndarray: ...


@dataclass
class TrainedModel:
    spec: ModelSpec
    estimator: Any
    feature_names: list[str]
    seed: int
    # per-column offset making naive Bayes inputs non-negative
    shift: Optional[np.ndarray] = None

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def _prepare(self, X: Any) -> Any:
        X = sp.csr_matrix(X, dtype=float)
        if X.shape[1] != self.n_features:
            raise ModelError(f"expected {self.n_features} features, got {X.shape[1]}")
        if self.spec.algorithm in _NAIVE_BAYES:
            X = _apply_shift(X, self.shift)
        elif self.spec.algorithm is Algorithm.KNN:
            X = X.toarray()
        return X

    def predict_scores(self, X: Any) -> np.ndarray:
        """(n, 3) class scores in CLASS_ORDER columns; absent classes score 0."""
        X = self._prepare(X)
        scores = np.zeros((X.shape[0], len(CLASS_ORDER)))
        if self.spec.algorithm is Algorithm.RF:
            classes = self.estimator.classes_
            for tree in self.estimator.estimators_:
                votes = classes[tree.predict(X).astype(int)]
                scores[np.arange(X.shape[0]), votes] += 1
            return scores / len(self.estimator.estimators_)
        scores[:, self.estimator.classes_] = self.estimator.predict_proba(X)
        return scores

    def predict(self, X: Any) -> list[Category]:
        return [CLASS_ORDER[index] for index in np.argmax(self.predict_scores(X), axis=1)]


def _nonnegative_shift(X: sp.csr_matrix) -> np.ndarray:
    minimum = np.asarray(X.min(axis=0).todense()).ravel()
    return np.where(minimum < 0, -minimum, 0.0)


def _apply_shift(X: sp.csr_matrix, shift: Optional[np.ndarray]) -> sp.csr_matrix:
    if shift is not None and shift.any():
        cols = np.flatnonzero(shift)
        n = X.shape[0]
        offset = sp.csr_matrix(
            (np.tile(shift[cols], n), (np.repeat(np.arange(n), len(cols)), np.tile(cols, n))),
            shape=X.shape,
        )
        X = (X + offset).tocsr()
    X = X.copy()
    X.data = np.maximum(X.data, 0.0)
    return X


def train(
    spec: ModelSpec,
    X: Any,
    y: Sequence[Category],
    seed: int,
    *,
    feature_names: Optional[Sequence[str]] = None,
    grids: Optional[dict[str, Any]] = None,
    strict: bool = True,
) -> TrainedModel:
    X = sp.csr_matrix(X, dtype=float)
    labels = encode_labels(y)
    if X.shape[0] == 0 or X.shape[0] != len(labels):
        raise ModelError(f"need |X| = |y| > 0, got {X.shape[0]} rows and {len(labels)} labels")
    if len(np.unique(labels)) < 2:
        raise ModelError("training labels hold a single class")
    params = resolve_hyperparameters(spec, grids, strict=strict)
    if spec.algorithm in _SEEDED:
        params["random_state"] = seed

    names = list(feature_names) if feature_names is not None else [f"f{i}" for i in range(X.shape[1])]
    if len(names) != X.shape[1]:
        raise ModelError(f"{len(names)} feature names for {X.shape[1]} columns")

    shift = _nonnegative_shift(X) if spec.algorithm in _NAIVE_BAYES else None
    model = TrainedModel(
        spec=spec,
        estimator=_ESTIMATORS[spec.algorithm](**params),
        feature_names=names,
        seed=seed,
        shift=shift,
    )
    try:
        model.estimator.fit(model._prepare(X), labels)
    except ValueError as exc:
        raise ModelError(f"{spec.algorithm.value} training failed: {exc}") from exc
    logger.debug("trained %s on %d rows x %d features", spec.algorithm.value, *X.shape)
    return model


def predict(model: ScoringModel, x: Any) -> tuple[Category, dict[Category, float]]:
    scores = model.predict_scores(sp.csr_matrix(x, dtype=float).reshape(1, -1))[0]
    return CLASS_ORDER[int(np.argmax(scores))], dict(zip(CLASS_ORDER, scores.tolist()))


def model_descriptor(model: TrainedModel) -> dict[str, Any]:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "spec": model.spec.model_dump(mode="json"),
        "seed": model.seed,
        "class_order": [category.value for category in CLASS_ORDER],
        "feature_names": model.feature_names,
        "shift": model.shift.tolist() if model.shift is not None else None,
        "sklearn_version": sklearn.__version__,
    }


def save_model(model: TrainedModel, directory: Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    joblib.dump(model.estimator, directory / MODEL_FILE)
    write_json(directory / DESCRIPTOR_FILE, model_descriptor(model))


def load_model(directory: Path) -> TrainedModel:
    directory = Path(directory)
    try:
        descriptor = json.loads((directory / DESCRIPTOR_FILE).read_text(encoding="utf-8"))
        estimator = joblib.load(directory / MODEL_FILE)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot load model from {directory}: {exc}") from exc
    if descriptor.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelError(f"unsupported model format {descriptor.get('format_version')!r}")
    if descriptor.get("class_order") != [category.value for category in CLASS_ORDER]:
        raise ModelError("model class order does not match")
    if descriptor.get("sklearn_version") != sklearn.__version__:
        logger.warning(
            "model saved with scikit-learn %s, running %s",
            descriptor.get("sklearn_version"),
            sklearn.__version__,
        )
    shift = descriptor.get("shift")
    return TrainedModel(
        spec=ModelSpec.model_validate(descriptor["spec"]),
        estimator=estimator,
        feature_names=descriptor["feature_names"],
        seed=descriptor["seed"],
        shift=np.asarray(shift, dtype=float) if shift is not None else None,
    )
