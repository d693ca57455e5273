"""Natural-language explanations.

Lexicon decisions are explained by their matched terms. Model decisions get a
local surrogate: active features of the row are switched off at random, the
model rescores every sample, and a kernel-weighted ridge fit of the
predicted-class score on the keep-masks gives one signed weight per feature.
"""

import hashlib
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.linear_model import Ridge

from ..core.config import ExplainConfig
from ..core.errors import ExplanationError
from ..schemas import (
    Attribution,
    Category,
    ClassificationRecord,
    ClassificationSource,
    CleanPost,
    Explanation,
    Post,
)
from .classify import ScoringModel
from .features import FeatureExtractor, display_name

logger = logging.getLogger(__name__)

MIN_SAMPLES = 50
KERNEL_WIDTH_FACTOR = 0.75
TEXT_BLOCKS = ("char", "word", "char_wb")
PLACEHOLDER_RE = re.compile(r"<(tweet|category|terms|features)>")


@dataclass
class Perturbation:
    active: np.ndarray  # column indices of the nonzero features of x
    masks: np.ndarray  # (n, len(active)) bool, True = feature kept
    samples: sp.csr_matrix  # (n, d), row 0 is x itself


def _as_row(x: Any) -> np.ndarray:
    if sp.issparse(x):
        x = x.toarray()
    return np.asarray(x, dtype=float).ravel()


def perturb(x: Any, n: int, seed: int) -> Perturbation:
    if n < MIN_SAMPLES:
        raise ExplanationError(f"need at least {MIN_SAMPLES} samples, got {n}")
    row = _as_row(x)
    active = np.flatnonzero(row)
    if active.size == 0:
        raise ExplanationError("nothing to perturb")
    rng = np.random.default_rng(seed)
    masks = np.ones((n, active.size), dtype=bool)
    masks[1:] = rng.random((n - 1, active.size)) < 0.5
    kept_rows, kept_cols = np.nonzero(masks)
    samples = sp.csr_matrix(
        (row[active][kept_cols], (kept_rows, active[kept_cols])),
        shape=(n, row.size),
    )
    return Perturbation(active=active, masks=masks, samples=samples)


def fit_surrogate(
    model: ScoringModel,
    x: Any,
    perturbation: Perturbation,
    kernel_width: Optional[float] = None,
    *,
    feature_names: Optional[Sequence[str]] = None,
    ridge_lambda: float = 1e-3,
    target: Optional[int] = None,
) -> list[Attribution]:
    """Per-active-feature weights toward the predicted class, in column order."""
    scores = model.predict_scores(perturbation.samples)
    if target is None:
        target = int(np.argmax(model.predict_scores(sp.csr_matrix(_as_row(x)))[0]))
    y = scores[:, target]
    masks = perturbation.masks.astype(float)
    m = masks.shape[1]
    width = kernel_width if kernel_width is not None else KERNEL_WIDTH_FACTOR * math.sqrt(m)
    removed = 1.0 - masks.mean(axis=1)
    weights = np.exp(-(removed**2) / width**2)

    # alpha scales with total weight; duplicated sample sets give identical coefficients
    surrogate = Ridge(alpha=ridge_lambda * weights.sum(), fit_intercept=True)
    surrogate.fit(masks, y, sample_weight=weights)

    names = list(feature_names) if feature_names is not None else None
    attributions = []
    for column, weight in zip(perturbation.active, surrogate.coef_):
        name = names[column] if names is not None else f"f{column}"
        attributions.append(Attribution(index=int(column), name=name, weight=float(weight)))
    return attributions


def top_features(attributions: Sequence[Attribution], k: int = 5) -> tuple[list[str], bool]:
    """Names of the k largest |weight|, ties by column; flag set when every weight is zero."""
    ranked = sorted(attributions, key=lambda item: (-abs(item.weight), item.index))
    degenerate = all(item.weight == 0 for item in attributions)
    return [item.name for item in ranked[:k]], degenerate


def chargram_to_word(gram: str, frequencies: dict[str, int]) -> str:
    needle = gram.strip()
    if not needle:
        return gram
    best = None
    for word, count in frequencies.items():
        if needle in word and (best is None or (-count, word) < (-frequencies[best], best)):
            best = word
    return best if best is not None else gram


def load_template(path: Path) -> str:
    template = Path(path).read_text(encoding="utf-8").strip("\n")
    for placeholder in ("<tweet>", "<category>", "<terms>"):
        if placeholder not in template:
            raise ExplanationError(f"template {path} lacks {placeholder}")
    return template


def render(
    tweet: str,
    category: Category,
    matched_terms: Sequence[str],
    feature_names: Sequence[str],
    template: str,
) -> str:
    """First template line always; second line only when feature_names is non-empty."""
    values = {
        "tweet": tweet,
        "category": Category(category).display_name,
        "terms": repr(list(matched_terms)),
        "features": repr(list(feature_names)),
    }

    def fill(line: str) -> str:
        # single pass: substituted values are never rescanned
        return PLACEHOLDER_RE.sub(lambda match: values[match.group(1)], line)

    terms_line, _, features_line = template.partition("\n")
    text = fill(terms_line)
    if feature_names and features_line:
        text += " " + fill(features_line.strip())
    return text


def derive_seed(seed: int, post_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{post_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def _dedupe(items: Sequence[str]) -> list[str]:
    return list(dict.fromkeys(items))


class Explainer:
    def __init__(
        self,
        model: ScoringModel,
        extractor: FeatureExtractor,
        word_frequencies: dict[str, int],
        template: str,
        config: Optional[ExplainConfig] = None,
        seed: int = 0,
    ):
        self.model = model
        self.extractor = extractor
        self.word_frequencies = word_frequencies
        self.template = template
        self.config = config or ExplainConfig()
        self.seed = seed
        self.feature_names = extractor.feature_names()

    def attribute(self, post: Post, clean: CleanPost) -> list[Attribution]:
        x = self.extractor.transform([clean], [post.text])
        perturbation = perturb(x, self.config.n_samples, derive_seed(self.seed, post.id))
        return fit_surrogate(
            self.model,
            x,
            perturbation,
            self.config.kernel_width,
            feature_names=self.feature_names,
            ridge_lambda=self.config.ridge_lambda,
        )

    def readable(self, feature_name: str) -> tuple[str, bool]:
        """(human-readable name, is textual term)."""
        block = feature_name.split(":", 1)[0]
        if block not in TEXT_BLOCKS or ":" not in feature_name:
            return display_name(feature_name), False
        term = display_name(feature_name)
        if block == "word":
            return term, True
        return chargram_to_word(term, self.word_frequencies), True

    def explain(self, post: Post, clean: CleanPost, record: ClassificationRecord) -> Explanation:
        if record.source is ClassificationSource.LEXICON:
            if not record.matched_terms:
                raise ExplanationError(f"lexicon decision for {post.id} carries no terms")
            terms, features, top = list(record.matched_terms), [], []
        else:
            names, degenerate = top_features(self.attribute(post, clean), self.config.top_k)
            if degenerate:
                logger.warning("all surrogate weights are zero for post %s", post.id)
            readable = [self.readable(name) for name in names]
            top = _dedupe([name for name, _ in readable])
            terms = _dedupe([name for name, textual in readable if textual])
            features = _dedupe([name for name, textual in readable if not textual])
        return Explanation(
            post_id=post.id,
            category=record.category,
            source=record.source.value,
            matched_terms=terms,
            top_features=top,
            rendered_text=render(post.text, record.category, terms, features, self.template),
        )
