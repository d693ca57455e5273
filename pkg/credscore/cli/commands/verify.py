import argparse
import logging
from collections import Counter
from typing import Sequence

from ...schemas import ClassificationRecord, ForecastOutcome, Post
from ...services.reports import write_jsonl
from ...services.verify import verify_post
from ..deps import OUTCOMES_FILE, CommandContext, add_common_arguments

logger = logging.getLogger(__name__)

NAME = "verify"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="check drop/rise forecasts against price series")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def verify_records(
    ctx: CommandContext, posts: Sequence[Post], records: Sequence[ClassificationRecord]
) -> list[ForecastOutcome]:
    published = {post.id: post.published_at for post in posts}
    outcomes = []
    for record in records:
        outcomes.extend(verify_post(record, published[record.post_id], ctx.price_provider, ctx.verification))
    write_jsonl(ctx.output(OUTCOMES_FILE), outcomes)
    counts = Counter(outcome.status.value for outcome in outcomes)
    logger.info("outcomes: %s", ", ".join(f"{status}={counts[status]}" for status in sorted(counts)))
    return outcomes


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    posts = [item.post for item in ctx.load_corpus()]
    verify_records(ctx, posts, ctx.load_classifications())
    return 0
