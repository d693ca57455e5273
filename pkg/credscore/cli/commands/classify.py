import argparse
import logging

from ...schemas import ClassificationRecord, CleanPost, Post
from ...services.hybrid import lexicon_coverage
from ...services.reports import write_json, write_jsonl
from ..deps import CLASSIFICATIONS_FILE, COVERAGE_FILE, CommandContext, add_common_arguments

logger = logging.getLogger(__name__)

NAME = "classify"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="classify every post with the trained hybrid pipeline")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def classify_corpus(ctx: CommandContext) -> tuple[list[Post], list[CleanPost], list[ClassificationRecord]]:
    posts = [item.post for item in ctx.load_corpus()]
    cleans = ctx.preprocess(posts)
    records = ctx.pipeline.classifier().classify_many(posts, cleans)
    write_jsonl(ctx.output(CLASSIFICATIONS_FILE), records)
    coverage = lexicon_coverage(records)
    write_json(ctx.output(COVERAGE_FILE), {"lexicon_coverage": coverage, "posts": len(records)})
    logger.info("lexicon stage decided %.2f%% of %d posts", 100 * coverage, len(records))
    return posts, cleans, records


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    classify_corpus(ctx)
    return 0
