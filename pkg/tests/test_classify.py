import json

import numpy as np
import pytest

from credscore.core.errors import ModelError
from credscore.schemas import CLASS_ORDER, Algorithm, Category, ModelSpec
from credscore.services.classify import (
    DESCRIPTOR_FILE,
    load_grids,
    load_model,
    predict,
    resolve_hyperparameters,
    save_model,
    train,
)


@pytest.fixture(scope="module")
def grids():
    return load_grids()


def count_data(seed: int, per_class: int = 20):
    """Poisson counts whose rates depend on the class."""
    rng = np.random.default_rng(seed)
    rates = np.array([[6, 1, 1, 2], [1, 6, 1, 2], [1, 1, 6, 2]], dtype=float)
    X, y = [], []
    for index, category in enumerate(CLASS_ORDER):
        X.append(rng.poisson(rates[index], size=(per_class, rates.shape[1])))
        y.extend([category] * per_class)
    return np.vstack(X).astype(float), y


def test_multinomial_nb_hand_posterior(grids):
    X = np.array([[2.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
    y = [Category.DROP, Category.RISE, Category.OTHER]
    spec = ModelSpec(algorithm=Algorithm.MNB, hyperparameters={"alpha": 1, "fit_prior": False})
    model = train(spec, X, y, seed=0, grids=grids)

    scores = model.predict_scores(np.array([[1.0, 0.0]]))[0]
    np.testing.assert_allclose(scores, [0.5, 1 / 6, 1 / 3])
    category, by_class = predict(model, np.array([1.0, 0.0]))
    assert category is Category.DROP
    assert by_class[Category.OTHER] == pytest.approx(1 / 3)


def test_naive_bayes_shifts_negative_columns(grids):
    X, y = count_data(1)
    X[:, 3] -= 5
    model = train(ModelSpec(algorithm=Algorithm.CNB), X, y, seed=0, grids=grids)
    assert model.shift[3] == pytest.approx(-X[:, 3].min())
    assert not model.shift[:3].any()
    scores = model.predict_scores(X)
    np.testing.assert_allclose(scores.sum(axis=1), 1.0)


def test_random_forest_scores_are_vote_shares(grids):
    X, y = count_data(2)
    spec = ModelSpec(algorithm=Algorithm.RF, hyperparameters={"n_estimators": 50})
    model = train(spec, X, y, seed=3, grids=grids)
    rows = np.random.default_rng(8).poisson(3, size=(100, X.shape[1])).astype(float)

    votes = np.array([tree.predict(rows) for tree in model.estimator.estimators_]).astype(int)
    counts = np.array([np.bincount(column, minlength=len(CLASS_ORDER)) for column in votes.T])
    np.testing.assert_allclose(model.predict_scores(rows), counts / 50)
    assert model.predict(rows) == [CLASS_ORDER[index] for index in counts.argmax(axis=1)]


def test_decision_tree_fits_separable_data(grids):
    rng = np.random.default_rng(6)
    X = rng.integers(0, 3, size=(60, 4)).astype(float)
    y = [CLASS_ORDER[index % 3] for index in range(60)]
    for row, category in enumerate(y):
        X[row, CLASS_ORDER.index(category)] += 10
    model = train(ModelSpec(algorithm=Algorithm.DT), X, y, seed=0, grids=grids)
    assert model.predict(X) == y


@pytest.mark.parametrize("algorithm", list(Algorithm))
def test_training_is_deterministic(grids, algorithm):
    X, y = count_data(4)
    first = train(ModelSpec(algorithm=algorithm), X, y, seed=11, grids=grids)
    second = train(ModelSpec(algorithm=algorithm), X, y, seed=11, grids=grids)
    np.testing.assert_array_equal(first.predict_scores(X), second.predict_scores(X))
    assert first.predict_scores(X).shape == (len(y), len(CLASS_ORDER))


def test_absent_class_scores_zero(grids):
    X, y = count_data(5)
    keep = [index for index, label in enumerate(y) if label is not Category.OTHER]
    model = train(ModelSpec(algorithm=Algorithm.MNB), X[keep], [y[i] for i in keep], seed=0, grids=grids)
    assert not model.predict_scores(X)[:, CLASS_ORDER.index(Category.OTHER)].any()


def test_single_class_is_rejected(grids):
    X, _ = count_data(6)
    with pytest.raises(ModelError, match="single class"):
        train(ModelSpec(algorithm=Algorithm.MNB), X, [Category.RISE] * len(X), seed=0, grids=grids)


def test_unknown_hyperparameter_is_rejected(grids):
    X, y = count_data(6)
    spec = ModelSpec(algorithm=Algorithm.KNN, hyperparameters={"k": 3})
    with pytest.raises(ModelError, match="unknown hyperparameter 'k'"):
        train(spec, X, y, seed=0, grids=grids)
    with pytest.raises(ModelError, match="unknown hyperparameter"):
        train(spec, X, y, seed=0, grids=grids, strict=False)


def test_nearest_neighbour_reproduces_training_labels(grids):
    X, y = count_data(7)
    X = X + np.arange(len(X))[:, None] * 1e-3
    spec = ModelSpec(algorithm=Algorithm.KNN, hyperparameters={"n_neighbors": 1, "weights": "uniform"})
    with pytest.raises(ModelError, match="outside grid"):
        train(spec, X, y, seed=0, grids=grids)
    model = train(spec, X, y, seed=0, grids=grids, strict=False)
    assert model.predict(X) == y


def test_split_size_one_means_all_samples(grids):
    spec = ModelSpec(algorithm=Algorithm.DT, hyperparameters={"min_samples_split": 1, "class_weight": "None"})
    params = resolve_hyperparameters(spec, grids)
    assert params["min_samples_split"] == 1.0
    assert isinstance(params["min_samples_split"], float)
    assert params["class_weight"] is None
    assert params["max_depth"] == 100


def test_dimension_mismatch(grids):
    X, y = count_data(8)
    model = train(ModelSpec(algorithm=Algorithm.DT), X, y, seed=0, grids=grids)
    with pytest.raises(ModelError, match="expected 4 features"):
        model.predict_scores(X[:, :3])
    with pytest.raises(ModelError, match="feature names"):
        train(ModelSpec(algorithm=Algorithm.DT), X, y, seed=0, feature_names=["a"], grids=grids)


def test_saved_model_scores_identically(tmp_path, grids):
    X, y = count_data(9)
    names = ["a", "b", "c", "d"]
    model = train(ModelSpec(algorithm=Algorithm.MNB), X - 1, y, seed=5, feature_names=names, grids=grids)
    save_model(model, tmp_path)

    loaded = load_model(tmp_path)
    assert loaded.feature_names == names
    assert loaded.spec == model.spec
    np.testing.assert_array_equal(loaded.predict_scores(X), model.predict_scores(X))


def test_unknown_model_format_is_rejected(tmp_path, grids):
    X, y = count_data(10)
    save_model(train(ModelSpec(algorithm=Algorithm.MNB), X, y, seed=0, grids=grids), tmp_path)
    descriptor = json.loads((tmp_path / DESCRIPTOR_FILE).read_text())
    descriptor["format_version"] = 99
    (tmp_path / DESCRIPTOR_FILE).write_text(json.dumps(descriptor))
    with pytest.raises(ModelError, match="format"):
        load_model(tmp_path)
    with pytest.raises(ModelError, match="cannot load"):
        load_model(tmp_path / "missing")
