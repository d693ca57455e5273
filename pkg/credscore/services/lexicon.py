import json
import logging
import math
from collections import Counter, defaultdict
from pathlib import Path
from typing import Literal, Optional, Sequence

from ..core.errors import LexiconError
from ..schemas import CLASS_ORDER, Category, CategoryLexicons, LexiconEntry, LexiconMatch

logger = logging.getLogger(__name__)


def induce_lexicons(
    documents: Sequence[Sequence[str]],
    labels: Sequence[Category],
    fraction: float = 0.10,
    *,
    candidate_base: Literal["unique", "all"] = "unique",
) -> CategoryLexicons:
    """Keep the most frequent terms that occur in posts of exactly one category.

    With candidate_base="all" the cut is ceil(fraction * distinct terms of the
    category) but only unique terms are ever kept.
    """
    if len(documents) != len(labels):
        raise LexiconError(f"{len(documents)} documents but {len(labels)} labels")
    if not 0 < fraction <= 1:
        raise LexiconError(f"fraction must lie in (0, 1], got {fraction}")
    missing = [category.value for category in CLASS_ORDER if category not in set(labels)]
    if missing:
        raise LexiconError(f"categories absent from corpus: {', '.join(missing)}")

    frequency: dict[Category, Counter[str]] = {category: Counter() for category in CLASS_ORDER}
    seen_in: dict[str, set[Category]] = defaultdict(set)
    for tokens, label in zip(documents, labels):
        frequency[label].update(tokens)
        for token in tokens:
            seen_in[token].add(label)

    entries: dict[Category, list[LexiconEntry]] = {}
    for category in CLASS_ORDER:
        candidates = [term for term in frequency[category] if seen_in[term] == {category}]
        if not candidates:
            logger.warning("no unique terms for category %s; its lexicon is empty", category.value)
            entries[category] = []
            continue
        base = len(candidates) if candidate_base == "unique" else len(frequency[category])
        keep = min(len(candidates), math.ceil(fraction * base))
        ranked = sorted(candidates, key=lambda term: (-frequency[category][term], term))[:keep]
        entries[category] = [LexiconEntry(term=term, freq=frequency[category][term]) for term in ranked]
        logger.info("%s lexicon: %d of %d unique terms", category.value, keep, len(candidates))

    lexicons = CategoryLexicons(entries=entries)
    check_disjoint(lexicons)
    return lexicons


def check_disjoint(lexicons: CategoryLexicons) -> None:
    owner: dict[str, Category] = {}
    for category, items in lexicons.entries.items():
        for entry in items:
            if entry.term in owner and owner[entry.term] != category:
                raise LexiconError(
                    f"term {entry.term!r} in both {owner[entry.term].value} and {category.value} lexicons"
                )
            owner[entry.term] = category


def match_lexicon(tokens: Sequence[str], lexicons: CategoryLexicons) -> Optional[LexiconMatch]:
    present = set(tokens)
    hits = {
        category: [term for term in lexicons.terms(category) if term in present]
        for category in CLASS_ORDER
    }
    hits = {category: terms for category, terms in hits.items() if terms}
    if not hits:
        return None
    best = max(len(terms) for terms in hits.values())
    leaders = [category for category, terms in hits.items() if len(terms) == best]
    if len(leaders) > 1:
        return None
    return LexiconMatch(category=leaders[0], terms=hits[leaders[0]])


def lexicons_payload(lexicons: CategoryLexicons) -> dict:
    return {
        category.value: [entry.model_dump() for entry in lexicons.entries.get(category, [])]
        for category in CLASS_ORDER
    }


def load_lexicons(path: Path) -> CategoryLexicons:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        lexicons = CategoryLexicons.model_validate({"entries": raw})
    except (OSError, ValueError) as exc:
        raise LexiconError(f"cannot load lexicons from {path}: {exc}") from exc
    check_disjoint(lexicons)
    return lexicons
