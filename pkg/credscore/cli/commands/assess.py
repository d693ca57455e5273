import argparse
import logging

from ...services.hybrid import lexicon_coverage
from ..deps import CommandContext, add_common_arguments
from .classify import classify_corpus
from .correlate import correlate_ranks
from .explain import add_explain_only, explain_records
from .rank import rank_outcomes
from .report import build_report
from .verify import verify_records

logger = logging.getLogger(__name__)

NAME = "assess"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        NAME, help="classify, verify, rank, correlate and explain in one run"
    )
    add_common_arguments(parser)
    add_explain_only(parser)
    parser.set_defaults(handler=run)


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    if args.explain_only is not None:
        posts = [item.post for item in ctx.load_corpus() if item.post.id == args.explain_only]
        cleans = ctx.preprocess(posts)
        records = ctx.pipeline.classifier().classify_many(posts, cleans)
        explain_records(ctx, posts, cleans, records, args.explain_only)
        return 0

    posts, cleans, records = classify_corpus(ctx)
    outcomes = verify_records(ctx, posts, records)
    ranks = rank_outcomes(ctx, outcomes, [post.advisor_id for post in posts])
    correlations = correlate_ranks(ctx, ranks)
    explain_records(ctx, posts, cleans, records)
    coverage = {"lexicon_coverage": lexicon_coverage(records), "posts": len(records)}
    build_report(ctx, ranks, outcomes, coverage, correlations)
    return 0
