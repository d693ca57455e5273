import numpy as np
import pytest

from credscore.core.errors import VocabularyError
from credscore.schemas import VectorizerConfig, VectorizerMode
from credscore.services.vectorizer import fit_vectorizer, transform, vectorize


def word_config(**overrides) -> VectorizerConfig:
    values = {"mode": VectorizerMode.WORD, "ngram_range": (1, 1), "min_df": 0.01, "max_df": 1.0}
    values.update(overrides)
    return VectorizerConfig(**values)


def random_corpus(seed: int, size: int = 40) -> list[str]:
    rng = np.random.default_rng(seed)
    alphabet = [f"t{index}" for index in range(15)]
    return [" ".join(rng.choice(alphabet, size=rng.integers(1, 8))) for _ in range(size)]


@pytest.mark.parametrize("seed", range(5))
def test_document_frequency_bounds(seed):
    corpus = random_corpus(seed)
    config = word_config(min_df=0.2, max_df=0.6)
    vocab = fit_vectorizer(corpus, config)

    expected = set()
    for term in {token for text in corpus for token in text.split()}:
        share = sum(term in text.split() for text in corpus) / len(corpus)
        if 0.2 <= share <= 0.6:
            expected.add(term)
    assert set(vocab.terms) == expected
    assert sorted(vocab.terms.values()) == list(range(len(vocab)))
    assert vocab.ordered_terms() == sorted(expected)
    assert vocab.n_documents == len(corpus)


def letter_corpus(rng: np.random.Generator, size: int) -> list[str]:
    words = ["".join(rng.choice(list("abcd"), size=rng.integers(1, 5))) for _ in range(rng.integers(1, 6))]
    return [" ".join(rng.choice(words, size=rng.integers(1, 5))) for _ in range(size)]


def recount_grams(text: str, mode: VectorizerMode, low: int, high: int) -> set[str]:
    grams = set()
    if mode is VectorizerMode.WORD:
        tokens = text.split()
        for n in range(low, high + 1):
            grams.update(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    elif mode is VectorizerMode.CHAR:
        for n in range(low, high + 1):
            grams.update(text[i : i + n] for i in range(len(text) - n + 1))
    else:
        for word in text.split():
            padded = f" {word} "
            for n in range(low, high + 1):
                if len(padded) <= n:
                    grams.add(padded)
                    break
                grams.update(padded[i : i + n] for i in range(len(padded) - n + 1))
    return grams


@pytest.mark.parametrize("mode", list(VectorizerMode))
def test_document_frequency_bounds_match_recount(mode):
    rng = np.random.default_rng(len(mode.value))
    low, high = (1, 2) if mode is VectorizerMode.WORD else (2, 3)
    config = VectorizerConfig(mode=mode, ngram_range=(low, high), min_df=0.2, max_df=0.6)
    for _ in range(60):
        corpus = letter_corpus(rng, int(rng.integers(5, 30)))
        per_document = [recount_grams(text, mode, low, high) for text in corpus]
        expected = {
            term
            for term in set().union(*per_document)
            if 0.2 <= sum(term in grams for grams in per_document) / len(corpus) <= 0.6
        }
        if not expected:
            with pytest.raises(VocabularyError, match="widen"):
                fit_vectorizer(corpus, config)
            continue
        vocab = fit_vectorizer(corpus, config)
        assert set(vocab.terms) == expected
        for term, df in vocab.document_frequency.items():
            assert df == sum(term in grams for grams in per_document)


def test_max_features_breaks_ties_by_term():
    vocab = fit_vectorizer(["aa bb", "aa cc", "bb dd"], word_config(max_features=3))
    assert vocab.terms == {"aa": 0, "bb": 1, "cc": 2}
    assert vocab.document_frequency == {"aa": 2, "bb": 2, "cc": 1}


def test_char_wb_pads_word_edges():
    vocab = fit_vectorizer(
        ["abc", "xyz"],
        VectorizerConfig(mode=VectorizerMode.CHAR_WB, ngram_range=(3, 3), min_df=0.1, max_df=1.0),
    )
    assert {" ab", "abc", "bc "} <= set(vocab.terms)


def test_vectorize_is_additive_over_words():
    corpus = random_corpus(7)
    vocab = fit_vectorizer(corpus, word_config())
    left, right = corpus[0], corpus[1]
    combined = vectorize(f"{left} {right}", vocab)
    separate = vectorize(left, vocab)
    for index, count in vectorize(right, vocab).items():
        separate[index] = separate.get(index, 0) + count
    assert combined == separate


def test_transform_agrees_with_vectorize():
    corpus = random_corpus(3)
    vocab = fit_vectorizer(corpus, word_config(min_df=0.05, max_df=0.5))
    matrix = transform(corpus, vocab)
    assert matrix.shape == (len(corpus), len(vocab))
    for row, text in enumerate(corpus):
        dense = matrix[row].toarray().ravel()
        assert {int(col): int(dense[col]) for col in np.flatnonzero(dense)} == vectorize(text, vocab)


def test_unknown_and_empty_texts_vectorize_to_nothing():
    vocab = fit_vectorizer(["aa bb", "cc"], word_config())
    assert vectorize("", vocab) == {}
    assert vectorize("zz yy", vocab) == {}


def test_empty_vocabulary_is_an_error():
    with pytest.raises(VocabularyError, match="widen"):
        fit_vectorizer(["aa", "bb", "cc"], word_config(min_df=0.9, max_df=1.0))
    with pytest.raises(VocabularyError):
        fit_vectorizer([], word_config())


@pytest.mark.parametrize(
    "overrides", [{"ngram_range": (2, 1)}, {"min_df": 0.5, "max_df": 0.4}, {"max_df": 1.5}, {"max_features": 0}]
)
def test_invalid_config_is_rejected(overrides):
    with pytest.raises(ValueError):
        word_config(**overrides)
