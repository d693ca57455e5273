import logging
import re
import unicodedata
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Protocol, Sequence

import pandas as pd

from ..schemas import CleanPost, Post, TickerDictionary

logger = logging.getLogger(__name__)

CASHTAG_RE = re.compile(r"\$[a-zA-Z0-9=][a-zA-Z][a-zA-Z0-9=]+")
CARET_TAG_RE = re.compile(r"\^[a-zA-Z0-9=][a-zA-Z][a-zA-Z0-9=]+")
HASHTAG_RE = re.compile(r"\#[a-zA-Z0-9]+")
# Applied verbatim: it also swallows any "word:" prefixed token (e.g. "14:30").
LINK_RE = re.compile(r"(?:(pic.|http|www|\w+)?\:(//)*)\S+")
SPECIAL_CHAR_RE = re.compile(r"(\*|\[|\]|=|\(|\)|\$|\"|\}|\{|\||\+|&|€|£|/|°)+")
_WHITESPACE_RE = re.compile(r"\s+")


def extract_cashtags(text: str) -> list[str]:
    matches = [(m.start(), m.group()) for m in CASHTAG_RE.finditer(text)]
    matches += [(m.start(), m.group()) for m in CARET_TAG_RE.finditer(text)]
    tickers: list[str] = []
    for _, raw in sorted(matches):
        ticker = raw[1:].upper()
        if ticker not in tickers:
            tickers.append(ticker)
    return tickers


def extract_hashtags(text: str) -> list[str]:
    return [match[1:] for match in HASHTAG_RE.findall(text)]


def strip_noise(text: str) -> str:
    text = LINK_RE.sub(" ", text)
    text = SPECIAL_CHAR_RE.sub("", text)
    return _WHITESPACE_RE.sub(" ", text).strip()


@lru_cache(maxsize=32)
def _alias_pattern(aliases: tuple[str, ...]) -> Optional[re.Pattern[str]]:
    if not aliases:
        return None
    ordered = sorted(aliases, key=lambda alias: (-len(alias), alias))
    body = "|".join(re.escape(alias) for alias in ordered)
    return re.compile(rf"(?<!\w)#?({body})(?!\w)", re.IGNORECASE)


def detect_dictionary_tickers(text: str, dictionary: TickerDictionary) -> list[str]:
    pattern = _alias_pattern(tuple(sorted(dictionary.aliases)))
    if pattern is None:
        return []
    tickers: list[str] = []
    for match in pattern.finditer(text):
        ticker = dictionary.lookup(match.group(1))
        if ticker and ticker not in tickers:
            tickers.append(ticker)
    return tickers


def fold(text: str) -> str:
    """Lowercase, NFKD-decompose and keep only letters, digits and whitespace."""
    decomposed = unicodedata.normalize("NFKD", text.lower())
    return "".join(
        char
        for char in decomposed
        if char.isspace() or unicodedata.category(char)[0] in ("L", "N")
    )


def load_stopwords(path: Path) -> frozenset[str]:
    words = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(folded for word in words if (folded := fold(word).strip()))


@lru_cache(maxsize=8)
def _folded_stopwords(stopwords: frozenset[str]) -> frozenset[str]:
    return frozenset(folded for word in stopwords if (folded := fold(word).strip()))


def normalize_and_tokenize(text: str, stopwords: Iterable[str]) -> list[str]:
    stop = _folded_stopwords(frozenset(stopwords))
    return [token for token in fold(text).split() if token not in stop]


class Lemmatizer(Protocol):
    def lemmatize(self, tokens: Sequence[str]) -> list[str]: ...


class RuleLemmatizer:
    """Exceptions dictionary first, then the first matching suffix rule."""

    def __init__(
        self,
        exceptions: dict[str, str] | None = None,
        suffix_rules: Sequence[tuple[str, str]] = (),
        *,
        min_stem: int = 3,
    ):
        self.exceptions = {fold(form).strip(): fold(lemma).strip() for form, lemma in (exceptions or {}).items()}
        self.suffix_rules = list(suffix_rules)
        self.min_stem = min_stem

    @classmethod
    def from_files(cls, exceptions_path: Path, rules_path: Path) -> "RuleLemmatizer":
        frame = pd.read_csv(exceptions_path, dtype=str, keep_default_na=False)
        exceptions = dict(zip(frame["form"], frame["lemma"]))
        rules = []
        for line in Path(rules_path).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            suffix, _, replacement = line.partition("->")
            rules.append((suffix.strip(), replacement.strip()))
        return cls(exceptions, rules)

    def lemmatize_token(self, token: str) -> str:
        if token in self.exceptions:
            return self.exceptions[token]
        if not (token.isalpha() and token.islower()):
            return token
        for suffix, replacement in self.suffix_rules:
            if token.endswith(suffix) and len(token) - len(suffix) >= self.min_stem:
                return token[: len(token) - len(suffix)] + replacement
        return token

    def lemmatize(self, tokens: Sequence[str]) -> list[str]:
        return [self.lemmatize_token(token) for token in tokens]


def lemmatize(tokens: Sequence[str], lemmatizer: Lemmatizer) -> list[str]:
    return lemmatizer.lemmatize(tokens)


class Preprocessor:
    """Fixed order: cashtags, dictionary tickers, noise, tokens, lemmas."""

    def __init__(
        self,
        stopwords: frozenset[str],
        lemmatizer: Lemmatizer,
        dictionary: Optional[TickerDictionary] = None,
    ):
        self.stopwords = stopwords
        self.lemmatizer = lemmatizer
        self.dictionary = dictionary

    def tickers(self, text: str) -> list[str]:
        tickers = extract_cashtags(text)
        if self.dictionary is not None:
            for ticker in detect_dictionary_tickers(text, self.dictionary):
                if ticker not in tickers:
                    tickers.append(ticker)
        return tickers

    def run(self, post: Post) -> CleanPost:
        tickers = self.tickers(post.text)
        for ticker in post.cashtags:
            if ticker.upper() not in tickers:
                tickers.append(ticker.upper())
        cleaned = strip_noise(post.text)
        lemmas = self.lemmatizer.lemmatize(normalize_and_tokenize(cleaned, self.stopwords))
        tokens = [lemma for lemma in lemmas if lemma and lemma not in self.stopwords]
        return CleanPost(
            post_id=post.id,
            tickers=tickers,
            tokens=tokens,
            clean_text=" ".join(tokens),
        )
