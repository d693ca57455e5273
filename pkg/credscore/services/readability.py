import re
from typing import Sequence

from ..core.errors import EmptyTextError

VOWEL_GROUP_RE = re.compile(r"[aeiouáéíóúü]+", re.IGNORECASE)
SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")
_EDGE_PUNCT = "\"'¡¿()[]{}«»,;:.!?…-"

FRE_BASE = 206.835
FRE_SENTENCE_WEIGHT = 1.015
FRE_SYLLABLE_WEIGHT = 84.6
MS_PER_CHAR = 14.69
MINIWORD_MAX_CHARS = 3
COMPLEX_MIN_SYLLABLES = 3


def syllables(word: str) -> int:
    """Maximal vowel groups, at least one per word."""
    return max(1, len(VOWEL_GROUP_RE.findall(word)))


def words(text: str) -> list[str]:
    stripped = (token.strip(_EDGE_PUNCT) for token in text.split())
    return [token for token in stripped if any(char.isalnum() for char in token)]


def sentence_count(text: str) -> int:
    return sum(1 for segment in SENTENCE_SPLIT_RE.split(text) if words(segment))


def flesch_reading_ease(
    text: str,
    *,
    base: float = FRE_BASE,
    sentence_weight: float = FRE_SENTENCE_WEIGHT,
    syllable_weight: float = FRE_SYLLABLE_WEIGHT,
) -> float:
    tokens = words(text)
    if not tokens:
        raise EmptyTextError("empty text")
    n_sentences = max(1, sentence_count(text))
    n_syllables = sum(syllables(token) for token in tokens)
    return base - sentence_weight * len(tokens) / n_sentences - syllable_weight * n_syllables / len(tokens)


def mcalpine_eflaw(text: str) -> float:
    n_sentences = sentence_count(text)
    if n_sentences == 0:
        raise EmptyTextError("no sentences")
    tokens = words(text)
    miniwords = sum(1 for token in tokens if len(token) <= MINIWORD_MAX_CHARS)
    return (len(tokens) + miniwords) / n_sentences


def reading_time_ms(text: str, *, ms_per_char: float = MS_PER_CHAR) -> float:
    return len(text.strip()) * ms_per_char


def complex_word_count(tokens: Sequence[str]) -> int:
    return sum(1 for token in tokens if syllables(token) >= COMPLEX_MIN_SYLLABLES)


def word_count(tokens: Sequence[str]) -> int:
    return len(tokens)
