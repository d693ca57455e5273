import logging
from collections import Counter
from functools import lru_cache
from typing import Callable, Sequence

import scipy.sparse as sp
from sklearn.feature_extraction.text import CountVectorizer

from ..core.errors import VocabularyError
from ..schemas import VectorizerConfig, VectorizerMode, Vocabulary

logger = logging.getLogger(__name__)

# Input texts are already folded, space-joined lemma sequences.
_TOKEN_PATTERN = r"\S+"


def _count_vectorizer(mode: VectorizerMode, ngram_range: tuple[int, int], **kwargs) -> CountVectorizer:
    return CountVectorizer(
        analyzer=mode.value,
        ngram_range=tuple(ngram_range),
        lowercase=False,
        token_pattern=_TOKEN_PATTERN,
        **kwargs,
    )


@lru_cache(maxsize=16)
def _analyzer(mode: VectorizerMode, ngram_range: tuple[int, int]) -> Callable[[str], list[str]]:
    return _count_vectorizer(mode, ngram_range).build_analyzer()


def fit_vectorizer(corpus: Sequence[str], config: VectorizerConfig) -> Vocabulary:
    if not corpus:
        raise VocabularyError("cannot fit a vocabulary on an empty corpus")
    analyze = _analyzer(config.mode, tuple(config.ngram_range))
    document_frequency: Counter[str] = Counter()
    total_frequency: Counter[str] = Counter()
    for text in corpus:
        grams = analyze(text)
        total_frequency.update(grams)
        document_frequency.update(set(grams))

    n_documents = len(corpus)
    retained = [
        term
        for term, df in document_frequency.items()
        if config.min_df <= df / n_documents <= config.max_df
    ]
    if config.max_features is not None and len(retained) > config.max_features:
        retained = sorted(retained, key=lambda term: (-total_frequency[term], term))[: config.max_features]
    if not retained:
        raise VocabularyError(
            f"{config.mode.value} vocabulary is empty for min_df={config.min_df}, "
            f"max_df={config.max_df}; widen the document-frequency bounds"
        )

    terms = {term: index for index, term in enumerate(sorted(retained))}
    logger.info("%s vocabulary: %d terms from %d documents", config.mode.value, len(terms), n_documents)
    return Vocabulary(
        mode=config.mode,
        ngram_range=tuple(config.ngram_range),
        terms=terms,
        document_frequency={term: document_frequency[term] for term in terms},
        n_documents=n_documents,
    )


def vectorize(text: str, vocab: Vocabulary) -> dict[int, int]:
    analyze = _analyzer(vocab.mode, tuple(vocab.ngram_range))
    counts: dict[int, int] = {}
    for gram in analyze(text):
        index = vocab.terms.get(gram)
        if index is not None:
            counts[index] = counts.get(index, 0) + 1
    return dict(sorted(counts.items()))


def transform(texts: Sequence[str], vocab: Vocabulary) -> sp.csr_matrix:
    vectorizer = _count_vectorizer(vocab.mode, tuple(vocab.ngram_range), vocabulary=vocab.terms)
    return vectorizer.transform(list(texts)).tocsr()
