import logging
from typing import Optional, Sequence

from ..schemas import (
    CLASS_ORDER,
    CategoryLexicons,
    ClassificationRecord,
    ClassificationSource,
    CleanPost,
    Post,
)
from .classify import ScoringModel
from .features import FeatureExtractor
from .lexicon import match_lexicon

logger = logging.getLogger(__name__)


class HybridClassifier:
    """Lexicon match first; the model only sees posts no lexicon decides."""

    def __init__(self, lexicons: CategoryLexicons, model: ScoringModel, extractor: FeatureExtractor):
        self.lexicons = lexicons
        self.model = model
        self.extractor = extractor

    def classify_many(self, posts: Sequence[Post], cleans: Sequence[CleanPost]) -> list[ClassificationRecord]:
        records: list[Optional[ClassificationRecord]] = [None] * len(posts)
        pending: list[int] = []
        for index, (post, clean) in enumerate(zip(posts, cleans)):
            match = match_lexicon(clean.tokens, self.lexicons)
            if match is None:
                pending.append(index)
                continue
            records[index] = ClassificationRecord(
                post_id=post.id,
                advisor_id=post.advisor_id,
                category=match.category,
                source=ClassificationSource.LEXICON,
                tickers=clean.tickers,
                matched_terms=match.terms,
            )

        if pending:
            X = self.extractor.transform([cleans[i] for i in pending], [posts[i].text for i in pending])
            for index, row in zip(pending, self.model.predict_scores(X)):
                scores = dict(zip(CLASS_ORDER, row.tolist()))
                records[index] = ClassificationRecord(
                    post_id=posts[index].id,
                    advisor_id=posts[index].advisor_id,
                    category=CLASS_ORDER[int(row.argmax())],
                    source=ClassificationSource.ML,
                    tickers=cleans[index].tickers,
                    scores=scores,
                )
        logger.info(
            "classified %d posts, %d by lexicon", len(records), len(records) - len(pending)
        )
        return records

    def classify(self, post: Post, clean: CleanPost) -> ClassificationRecord:
        return self.classify_many([post], [clean])[0]


def hybrid_classify(
    post: Post,
    clean: CleanPost,
    lexicons: CategoryLexicons,
    model: ScoringModel,
    extractor: FeatureExtractor,
) -> ClassificationRecord:
    return HybridClassifier(lexicons, model, extractor).classify(post, clean)


def lexicon_coverage(records: Sequence[ClassificationRecord]) -> float:
    if not records:
        return 0.0
    decided = sum(1 for record in records if record.source is ClassificationSource.LEXICON)
    return decided / len(records)
