import argparse
import logging
from collections import Counter
from typing import Optional, Sequence

import pandas as pd

from ...schemas import CorrelationTable, CredibilityRank, ForecastOutcome
from ...services.insight import correlation_frame, ranking_frame, ranking_records
from ...services.reports import atomic_write_text, read_json, read_jsonl, write_json
from ..deps import (
    CORRELATIONS_FILE,
    COVERAGE_FILE,
    OUTCOMES_FILE,
    RANKINGS_FILE,
    CommandContext,
    add_common_arguments,
)

logger = logging.getLogger(__name__)

NAME = "report"
REPORT_FILE = "report.json"
REPORT_TEXT = "report.txt"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="bundle rankings, correlations and coverage into one report")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def _table(title: str, frame: pd.DataFrame) -> str:
    body = frame.to_string(index=False, na_rep="-", float_format=lambda value: f"{value:.2f}")
    return f"{title}\n{'=' * len(title)}\n{body}\n"


def build_report(
    ctx: CommandContext,
    ranks: Sequence[CredibilityRank],
    outcomes: Sequence[ForecastOutcome],
    coverage: Optional[dict],
    correlations: Optional[CorrelationTable],
) -> dict:
    statuses = Counter(outcome.status.value for outcome in outcomes)
    reasons = Counter(outcome.reason for outcome in outcomes if outcome.reason)
    report = {
        "seed": ctx.config.seed,
        "config_digest": ctx.config.digest(),
        "rankings": ranking_records(ranks),
        "outcomes": {
            "total": len(outcomes),
            "by_status": dict(sorted(statuses.items())),
            "indeterminate_reasons": dict(sorted(reasons.items())),
        },
        "coverage": coverage,
        "correlations": correlations,
    }
    write_json(ctx.output(REPORT_FILE), report)

    sections = [_table("Advisor rankings (%)", ranking_frame(ranks))]
    if correlations is not None:
        sections.append(_table(f"Correlations ({correlations.method})", correlation_frame(correlations)))
    if coverage is not None:
        sections.append(f"Lexicon coverage: {100 * coverage['lexicon_coverage']:.2f}% of {coverage['posts']} posts\n")
    atomic_write_text(ctx.output(REPORT_TEXT), "\n".join(sections))
    return report


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    ranks = [CredibilityRank.model_validate(item) for item in read_json(ctx.existing_output(RANKINGS_FILE, "rank"))]
    outcomes = [ForecastOutcome.model_validate(item) for item in read_jsonl(ctx.existing_output(OUTCOMES_FILE, "verify"))]
    coverage_path = ctx.out_dir / COVERAGE_FILE
    coverage = read_json(coverage_path) if coverage_path.is_file() else None
    correlations_path = ctx.out_dir / CORRELATIONS_FILE
    correlations = (
        CorrelationTable.model_validate(read_json(correlations_path)) if correlations_path.is_file() else None
    )
    build_report(ctx, ranks, outcomes, coverage, correlations)
    return 0
