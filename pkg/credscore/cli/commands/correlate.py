import argparse
import logging
from typing import Optional, Sequence

from ...schemas import CorrelationTable, CredibilityRank
from ...services.corpus import load_social_metrics
from ...services.insight import correlate_metrics, correlation_frame
from ...services.reports import read_json, write_csv, write_json
from ..deps import (
    CORRELATIONS_CSV,
    CORRELATIONS_FILE,
    RANKINGS_FILE,
    CommandContext,
    add_common_arguments,
    require_paths,
)

logger = logging.getLogger(__name__)

NAME = "correlate"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="correlate credibility ranks with social-media metrics")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def correlate_ranks(ctx: CommandContext, ranks: Sequence[CredibilityRank]) -> Optional[CorrelationTable]:
    if ctx.config.social_metrics is None:
        logger.warning("no social metrics configured; skipping correlations")
        return None
    require_paths(ctx.config.social_metrics, what="social metrics file")
    table = correlate_metrics(ranks, load_social_metrics(ctx.config.social_metrics), method=ctx.config.correlation_method)
    write_json(ctx.output(CORRELATIONS_FILE), table)
    write_csv(ctx.output(CORRELATIONS_CSV), correlation_frame(table))
    return table


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    path = ctx.existing_output(RANKINGS_FILE, "rank")
    ranks = [CredibilityRank.model_validate(item) for item in read_json(path)]
    correlate_ranks(ctx, ranks)
    return 0
