import argparse
import json
import logging
from typing import Optional, Sequence

from ...core.errors import ExplanationError
from ...schemas import ClassificationRecord, CleanPost, Explanation, Post
from ...services.explain import Explainer
from ...services.reports import write_jsonl
from ..deps import EXPLANATIONS_FILE, CommandContext, add_common_arguments

logger = logging.getLogger(__name__)

NAME = "explain"


def add_explain_only(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--explain-only",
        metavar="POST_ID",
        default=None,
        help="print the explanation of one post to stdout instead of writing the explanation file",
    )


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="render a natural-language explanation per classified post")
    add_common_arguments(parser)
    add_explain_only(parser)
    parser.set_defaults(handler=run)


def explanation_record(explanation: Explanation) -> dict:
    return {
        "post_id": explanation.post_id,
        "category": explanation.category.value,
        "source": explanation.source,
        "terms": explanation.matched_terms,
        "features": explanation.top_features,
        "text": explanation.rendered_text,
    }


def get_explainer(ctx: CommandContext) -> Explainer:
    pipeline = ctx.pipeline
    return Explainer(
        pipeline.model,
        pipeline.extractor,
        pipeline.word_frequencies,
        ctx.resources.template,
        ctx.config.explain,
        ctx.config.seed,
    )


def explain_records(
    ctx: CommandContext,
    posts: Sequence[Post],
    cleans: Sequence[CleanPost],
    records: Sequence[ClassificationRecord],
    only: Optional[str] = None,
) -> list[Explanation]:
    explainer = get_explainer(ctx)
    by_id = {post.id: (post, clean) for post, clean in zip(posts, cleans)}
    if only is not None:
        record = next((record for record in records if record.post_id == only), None)
        if record is None or only not in by_id:
            raise ExplanationError(f"unknown post id {only!r}")
        explanation = explainer.explain(*by_id[only], record)
        print(json.dumps(explanation_record(explanation), ensure_ascii=False, sort_keys=True))
        return [explanation]

    explanations = [explainer.explain(*by_id[record.post_id], record) for record in records]
    write_jsonl(ctx.output(EXPLANATIONS_FILE), [explanation_record(item) for item in explanations])
    logger.info("explained %d posts", len(explanations))
    return explanations


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    posts = [item.post for item in ctx.load_corpus()]
    cleans = ctx.preprocess(posts)
    explain_records(ctx, posts, cleans, ctx.load_classifications(), args.explain_only)
    return 0
