import numpy as np
import pytest

from credscore.schemas import CLASS_ORDER, Category, ClassificationSource
from credscore.services.features import FeatureExtractor
from credscore.services.hybrid import HybridClassifier, hybrid_classify, lexicon_coverage
from credscore.services.lexicon import induce_lexicons

from factories import make_clean, make_post, small_vectorizers

# one planted term per category; "mercado" and "hoy" appear in every category
PLANTED_DOCUMENTS = [
    ["caida", "mercado"],
    ["caida", "hoy"],
    ["subida", "mercado"],
    ["subida", "hoy"],
    ["junta", "mercado"],
    ["junta", "hoy"],
]
PLANTED_LABELS = [Category.DROP, Category.DROP, Category.RISE, Category.RISE, Category.OTHER, Category.OTHER]
LEXICONS = induce_lexicons(PLANTED_DOCUMENTS, PLANTED_LABELS, 1.0)
TEXTS = [
    "caida fuerte hoy",
    "caida soporte",
    "nueva caida",
    "subida rapida",
    "subida cierre",
    "junta accionistas",
    "mercado lateral",
    "sesion tranquila",
    "volumen bajo hoy",
    "mercado cierre",
]


class RecordingModel:
    """Scores every row as Other and remembers what it was asked."""

    def __init__(self, n_features: int):
        self.n_features = n_features
        self.calls: list[int] = []

    def predict_scores(self, X):
        assert X.shape[1] == self.n_features
        self.calls.append(X.shape[0])
        return np.tile([0.2, 0.3, 0.5], (X.shape[0], 1))


@pytest.fixture
def classifier(resources):
    cleans = [make_clean(f"p{i}", text.split()) for i, text in enumerate(TEXTS)]
    extractor = FeatureExtractor.fit(
        [clean.clean_text for clean in cleans], small_vectorizers(), resources.affect, resources.tagger
    )
    return HybridClassifier(LEXICONS, RecordingModel(extractor.dimension), extractor)


def corpus(texts):
    posts = [make_post(f"p{i}", text) for i, text in enumerate(texts)]
    cleans = [make_clean(f"p{i}", text.split(), tickers=["SAN"]) for i, text in enumerate(texts)]
    return posts, cleans


def test_lexicon_decides_before_the_model(classifier):
    records = classifier.classify_many(*corpus(TEXTS))

    assert [record.post_id for record in records] == [f"p{i}" for i in range(len(TEXTS))]
    assert [record.source for record in records] == [ClassificationSource.LEXICON] * 6 + [ClassificationSource.ML] * 4
    assert [record.category for record in records[:6]] == [Category.DROP] * 3 + [Category.RISE] * 2 + [Category.OTHER]
    assert records[0].matched_terms == ["caida"] and records[0].scores is None
    assert records[6].category is Category.OTHER
    assert records[6].scores == dict(zip(CLASS_ORDER, [0.2, 0.3, 0.5]))
    assert records[6].tickers == ["SAN"]
    assert classifier.model.calls == [4]
    assert lexicon_coverage(records) == pytest.approx(0.6)


def test_model_not_called_when_every_post_matches(classifier):
    records = classifier.classify_many(*corpus(TEXTS[:6]))
    assert classifier.model.calls == []
    assert lexicon_coverage(records) == 1.0


def test_tied_lexicon_match_falls_back_to_model(classifier):
    posts, cleans = corpus(["caida y subida"])
    record = hybrid_classify(posts[0], cleans[0], classifier.lexicons, classifier.model, classifier.extractor)
    assert record.source is ClassificationSource.ML
    assert classifier.model.calls == [1]


def test_coverage_of_nothing():
    assert lexicon_coverage([]) == 0.0


def test_induced_lexicons_cover_planted_posts(classifier):
    assert [LEXICONS.terms(category) for category in CLASS_ORDER] == [["caida"], ["subida"], ["junta"]]
    records = classifier.classify_many(*corpus(TEXTS))
    assert lexicon_coverage(records) == 6 / 10
