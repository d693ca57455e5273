import argparse
import logging

import pandas as pd

from ...schemas import CorpusSummary
from ...services.corpus import load_social_metrics, summarize_corpus
from ...services.reports import write_csv, write_json, write_jsonl
from ..deps import CommandContext, add_common_arguments, require_paths

logger = logging.getLogger(__name__)

NAME = "ingest"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="validate inputs, report the corpus distribution, preprocess posts")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def summary_frame(summary: CorpusSummary) -> pd.DataFrame:
    rows = [share.model_dump() for share in [*summary.by_advisor, summary.overall]]
    columns = ["advisor_id", "total", "drop_pct", "rise_pct", "other_pct", "unlabeled"]
    return pd.DataFrame.from_records(rows, columns=columns)


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    labeled = ctx.load_corpus()
    summary = summarize_corpus(labeled)
    write_json(ctx.output("corpus_summary.json"), summary)
    write_csv(ctx.output("corpus_summary.csv"), summary_frame(summary))

    if ctx.config.social_metrics is not None:
        require_paths(ctx.config.social_metrics, what="social metrics file")
        metrics = load_social_metrics(ctx.config.social_metrics)
        logger.info("social metrics for %d advisors", len(metrics))
    checked = ctx.check_inputs()
    if checked:
        logger.info("checked %s", ", ".join(checked))

    cleans = ctx.preprocess([item.post for item in labeled])
    write_jsonl(ctx.output("clean_posts.jsonl"), cleans)
    logger.info("ingested %d posts from %d advisors", summary.posts, summary.advisors)
    return 0
