"""Scalar stylometric features plus the three n-gram count blocks.

Column layout of an assembled row is frozen: the 23 scalar slots in
SCALAR_FEATURE_NAMES order, then the char, word and char_wb blocks, each in
vocabulary index order. Explanations rely on this layout.
"""

import json
import logging
import re
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..core.config import FeatureConfig, VectorizerSet
from ..core.errors import EmptyTextError, VocabularyError
from ..schemas import (
    SCALAR_DISPLAY_NAMES,
    SCALAR_FEATURE_NAMES,
    CleanPost,
    FeatureVector,
    ScalarFeatures,
    Vocabulary,
)
from .linguistics import AffectAnnotator, PosTagger, annotate_affect, pos_distribution
from .preprocess import HASHTAG_RE, LINK_RE, strip_noise
from .readability import (
    complex_word_count,
    flesch_reading_ease,
    mcalpine_eflaw,
    reading_time_ms,
    word_count,
)
from .vectorizer import fit_vectorizer, transform, vectorize

logger = logging.getLogger(__name__)

QUANTITY_RE = re.compile(r"-?[0-9.,]+[\$€\%]")
CURRENCY_WORD_RE = re.compile(r"(-?[0-9.,]*[0-9])\s?(?:euros?|d[oó]lares|usd|eur)\b", re.IGNORECASE)
POS_TOKEN_RE = re.compile(r"\w+|[^\w\s]")
BLOCKS: tuple[str, ...] = ("char", "word", "char_wb")


def count_signed_quantities(text: str, *, currency_words: bool = False) -> tuple[int, int, int, int]:
    """(pos_num, neg_num, pos_per, neg_per) over symbol-suffixed figures."""
    pos_num = neg_num = pos_per = neg_per = 0
    for match in QUANTITY_RE.findall(text):
        negative = match.startswith("-")
        if match.endswith("%"):
            neg_per += negative
            pos_per += not negative
        else:
            neg_num += negative
            pos_num += not negative
    if currency_words:
        for amount in CURRENCY_WORD_RE.findall(text):
            negative = amount.startswith("-")
            neg_num += negative
            pos_num += not negative
    return pos_num, neg_num, pos_per, neg_per


def count_hashtags(text: str) -> int:
    return len(HASHTAG_RE.findall(text))


def pos_tokens(text: str) -> list[str]:
    return POS_TOKEN_RE.findall(LINK_RE.sub(" ", text))


def _or_zero(func, *args, **kwargs) -> float:
    try:
        return func(*args, **kwargs)
    except EmptyTextError:
        return 0.0


def compute_scalar_features(
    clean: CleanPost,
    raw_text: str,
    affect: AffectAnnotator,
    tagger: PosTagger,
    config: Optional[FeatureConfig] = None,
) -> ScalarFeatures:
    config = config or FeatureConfig()
    readable = strip_noise(raw_text)
    emotions, polarity = annotate_affect(clean.clean_text, affect)
    pos_num, neg_num, pos_per, neg_per = count_signed_quantities(
        raw_text, currency_words=config.currency_words
    )
    return ScalarFeatures(
        emotions=emotions,
        complex_words=complex_word_count(clean.tokens),
        fre=_or_zero(
            flesch_reading_ease,
            readable,
            base=config.fre_base,
            sentence_weight=config.fre_sentence_weight,
            syllable_weight=config.fre_syllable_weight,
        ),
        hashtags=count_hashtags(raw_text),
        mer=_or_zero(mcalpine_eflaw, readable),
        neg_num=neg_num,
        neg_per=neg_per,
        polarity=polarity,
        pos_dist=pos_distribution(pos_tokens(raw_text), tagger),
        pos_num=pos_num,
        pos_per=pos_per,
        reading_time_ms=reading_time_ms(raw_text, ms_per_char=config.ms_per_char),
        word_count=word_count(clean.tokens),
    )


def build_feature_vector(
    clean: CleanPost,
    raw_text: str,
    vocabularies: dict[str, Vocabulary],
    affect: AffectAnnotator,
    tagger: PosTagger,
    config: Optional[FeatureConfig] = None,
) -> FeatureVector:
    missing = [block for block in BLOCKS if block not in vocabularies]
    if missing:
        raise VocabularyError(f"vocabularies not fitted: {', '.join(missing)}")
    return FeatureVector(
        scalars=compute_scalar_features(clean, raw_text, affect, tagger, config),
        counts={block: vectorize(clean.clean_text, vocabularies[block]) for block in BLOCKS},
    )


class FeatureExtractor:
    def __init__(
        self,
        vocabularies: dict[str, Vocabulary],
        affect: AffectAnnotator,
        tagger: PosTagger,
        config: Optional[FeatureConfig] = None,
    ):
        self.vocabularies = {block: vocabularies[block] for block in BLOCKS}
        self.affect = affect
        self.tagger = tagger
        self.config = config or FeatureConfig()

    @classmethod
    def fit(
        cls,
        clean_texts: Sequence[str],
        vectorizers: VectorizerSet,
        affect: AffectAnnotator,
        tagger: PosTagger,
        config: Optional[FeatureConfig] = None,
    ) -> "FeatureExtractor":
        vocabularies = {block: fit_vectorizer(clean_texts, cfg) for block, cfg in vectorizers.blocks()}
        return cls(vocabularies, affect, tagger, config)

    @property
    def dimension(self) -> int:
        return len(SCALAR_FEATURE_NAMES) + sum(len(vocab) for vocab in self.vocabularies.values())

    def block_offsets(self) -> dict[str, int]:
        offsets, offset = {}, len(SCALAR_FEATURE_NAMES)
        for block in BLOCKS:
            offsets[block] = offset
            offset += len(self.vocabularies[block])
        return offsets

    def feature_names(self) -> list[str]:
        names = list(SCALAR_FEATURE_NAMES)
        for block in BLOCKS:
            names.extend(f"{block}:{term}" for term in self.vocabularies[block].ordered_terms())
        return names

    def build_feature_vector(self, clean: CleanPost, raw_text: str) -> FeatureVector:
        return build_feature_vector(clean, raw_text, self.vocabularies, self.affect, self.tagger, self.config)

    def to_matrix(self, vectors: Sequence[FeatureVector]) -> sp.csr_matrix:
        scalars = np.array([vector.scalars.as_list() for vector in vectors], dtype=float)
        scalars = scalars.reshape(len(vectors), len(SCALAR_FEATURE_NAMES))
        blocks = [sp.csr_matrix(scalars)]
        for block in BLOCKS:
            rows, cols, data = [], [], []
            for row, vector in enumerate(vectors):
                for col, count in vector.counts.get(block, {}).items():
                    rows.append(row)
                    cols.append(col)
                    data.append(count)
            shape = (len(vectors), len(self.vocabularies[block]))
            blocks.append(sp.csr_matrix((np.asarray(data, dtype=float), (rows, cols)), shape=shape))
        return sp.hstack(blocks, format="csr")

    def transform(self, cleans: Sequence[CleanPost], raw_texts: Sequence[str]) -> sp.csr_matrix:
        """Batch equivalent of to_matrix over build_feature_vector."""
        scalars = np.array(
            [
                compute_scalar_features(clean, raw, self.affect, self.tagger, self.config).as_list()
                for clean, raw in zip(cleans, raw_texts)
            ],
            dtype=float,
        ).reshape(len(cleans), len(SCALAR_FEATURE_NAMES))
        texts = [clean.clean_text for clean in cleans]
        blocks = [sp.csr_matrix(scalars)]
        blocks += [transform(texts, self.vocabularies[block]).astype(float) for block in BLOCKS]
        return sp.hstack(blocks, format="csr")

    def vocabularies_payload(self) -> dict:
        return {block: vocab.model_dump(mode="json") for block, vocab in self.vocabularies.items()}


def load_vocabularies(path: Path) -> dict[str, Vocabulary]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    missing = [block for block in BLOCKS if block not in raw]
    if missing:
        raise VocabularyError(f"{path}: missing vocabularies {', '.join(missing)}")
    return {block: Vocabulary.model_validate(raw[block]) for block in BLOCKS}


def display_name(feature_name: str) -> str:
    if feature_name in SCALAR_DISPLAY_NAMES:
        return SCALAR_DISPLAY_NAMES[feature_name]
    return feature_name.split(":", 1)[1]
