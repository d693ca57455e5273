import argparse
import logging
from typing import Sequence

from ...schemas import CredibilityRank, ForecastOutcome
from ...services.insight import ranking_frame, ranking_records
from ...services.reports import read_jsonl, write_csv, write_json
from ...services.verify import rank_advisors
from ..deps import OUTCOMES_FILE, RANKINGS_CSV, RANKINGS_FILE, CommandContext, add_common_arguments

logger = logging.getLogger(__name__)

NAME = "rank"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="per-advisor credibility ranking from verified outcomes")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def rank_outcomes(
    ctx: CommandContext, outcomes: Sequence[ForecastOutcome], advisor_ids: Sequence[str]
) -> list[CredibilityRank]:
    ranks = rank_advisors(outcomes, sorted(set(advisor_ids)))
    write_json(ctx.output(RANKINGS_FILE), ranking_records(ranks))
    write_csv(ctx.output(RANKINGS_CSV), ranking_frame(ranks))
    logger.info("ranked %d advisors", len(ranks))
    return ranks


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    advisor_ids = [item.post.advisor_id for item in ctx.load_corpus()]
    path = ctx.existing_output(OUTCOMES_FILE, "verify")
    outcomes = [ForecastOutcome.model_validate(item) for item in read_jsonl(path)]
    rank_outcomes(ctx, outcomes, advisor_ids)
    return 0
