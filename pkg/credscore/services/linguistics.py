"""Bundled lexicon-based annotators: affect (emotions, polarity) and POS tags.

Both sit behind small protocols so a model-backed annotator can replace them.
"""

import unicodedata
from pathlib import Path
from typing import Optional, Protocol, Sequence

import pandas as pd

from ..core.errors import ConfigError
from ..schemas import EMOTIONS, POS_CLASSES
from .preprocess import fold


class AffectAnnotator(Protocol):
    def annotate(self, tokens: Sequence[str]) -> tuple[tuple[bool, ...], int]: ...


class PosTagger(Protocol):
    def tag(self, token: str) -> Optional[str]: ...


class AffectLexicon:
    def __init__(self, entries: dict[str, tuple[frozenset[str], float]]):
        self.entries = {fold(word).strip(): value for word, value in entries.items()}

    @classmethod
    def from_csv(cls, path: Path) -> "AffectLexicon":
        frame = pd.read_csv(path, dtype={"word": str, "emotion_tags": str}, keep_default_na=False)
        entries = {}
        for word, tags, sentiment in zip(frame["word"], frame["emotion_tags"], frame["sentiment"]):
            emotions = frozenset(tag.strip() for tag in tags.split("|") if tag.strip())
            unknown = emotions - set(EMOTIONS)
            if unknown:
                raise ConfigError(f"unknown emotion tag(s) for {word!r}: {sorted(unknown)}")
            entries[word] = (emotions, float(sentiment))
        return cls(entries)

    def annotate(self, tokens: Sequence[str]) -> tuple[tuple[bool, ...], int]:
        present: set[str] = set()
        score = 0.0
        for token in tokens:
            entry = self.entries.get(token)
            if entry is None:
                continue
            present |= entry[0]
            score += entry[1]
        polarity = (score > 0) - (score < 0)
        return tuple(emotion in present for emotion in EMOTIONS), polarity


def annotate_affect(text: str, annotator: AffectAnnotator) -> tuple[tuple[bool, ...], int]:
    return annotator.annotate(fold(text).split())


ADVERB_SUFFIXES = ("mente",)
ADJECTIVE_SUFFIXES = (
    "ista", "istas", "oso", "osa", "osos", "osas", "ble", "bles",
    "ivo", "iva", "ivos", "ivas", "ico", "ica", "icos", "icas", "al", "ales",
)
# closed-class words outside the seven counted classes (prepositions, conjunctions)
UNTAGGED = "other"


class DictionaryPosTagger:
    """Closed classes by lookup, open classes by suffix, residual nouns.

    Numbers, symbols (emoji, currency signs) and words tagged "other" are left
    untagged, so the distribution can sum below 100.
    """

    def __init__(self, closed_classes: dict[str, str]):
        unknown = set(closed_classes.values()) - set(POS_CLASSES) - {UNTAGGED}
        if unknown:
            raise ConfigError(f"unknown POS class(es): {sorted(unknown)}")
        self.closed_classes = {fold(word).strip(): tag for word, tag in closed_classes.items()}

    @classmethod
    def from_csv(cls, path: Path) -> "DictionaryPosTagger":
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        return cls(dict(zip(frame["word"], frame["tag"])))

    def tag(self, token: str) -> Optional[str]:
        if token and all(unicodedata.category(char).startswith("P") for char in token):
            return "punctuation"
        folded = fold(token).strip()
        if not folded or not any(char.isalpha() for char in folded):
            return None
        if folded in self.closed_classes:
            tag = self.closed_classes[folded]
            return None if tag == UNTAGGED else tag
        if folded.endswith(ADVERB_SUFFIXES):
            return "adverbs"
        if folded.endswith(ADJECTIVE_SUFFIXES):
            return "adjectives"
        return "nouns"


def pos_distribution(tokens: Sequence[str], tagger: PosTagger) -> tuple[float, ...]:
    if not tokens:
        return (0.0,) * len(POS_CLASSES)
    counts = dict.fromkeys(POS_CLASSES, 0)
    for token in tokens:
        tag = tagger.tag(token)
        if tag is not None:
            counts[tag] += 1
    return tuple(100.0 * counts[cls] / len(tokens) for cls in POS_CLASSES)
