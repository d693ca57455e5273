import argparse
import logging
from dataclasses import replace
from pathlib import Path

import pandas as pd

from ...schemas import Algorithm, EvalReport, ModelSpec, VectorizerMode
from ...services.classify import load_grids
from ...services.features import FeatureExtractor
from ...services.model_selection import grid_search, vectorizer_grid_search
from ...services.pipeline import cross_validate, fit_pipeline, save_pipeline
from ...services.reports import write_csv, write_json
from ..deps import CommandContext, add_common_arguments, require_paths

logger = logging.getLogger(__name__)

NAME = "train"
# `--grid` without a file
BUNDLED_GRIDS = ""


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="cross-validate the hybrid classifier and train the final model")
    add_common_arguments(parser)
    parser.add_argument("--algo", type=Algorithm, choices=list(Algorithm), default=None, help="override the model algorithm")
    parser.add_argument("--folds", type=int, default=None, help="override the number of CV folds")
    parser.add_argument(
        "--grid",
        nargs="?",
        const=BUNDLED_GRIDS,
        default=None,
        metavar="GRIDS_JSON",
        help="grid-search hyperparameters before training; a file overrides the bundled grids per algorithm",
    )
    parser.set_defaults(handler=run)


def metrics_frame(algorithm: Algorithm, report: EvalReport) -> pd.DataFrame:
    rows = [
        {
            "algorithm": algorithm.value,
            "class": name,
            "precision": metrics.precision,
            "recall": metrics.recall,
            "f1": metrics.f1,
            "support": metrics.support,
        }
        for name, metrics in (("drop", report.drop), ("rise", report.rise))
    ]
    return pd.DataFrame.from_records(rows)


def run(ctx: CommandContext, args: argparse.Namespace) -> int:
    config = ctx.config
    model_config = config.model.model_copy(
        update={
            key: value
            for key, value in (
                ("algorithm", args.algo),
                ("folds", args.folds),
                ("grid_search", True if args.grid is not None else None),
            )
            if value is not None
        }
    )
    config = config.model_copy(update={"model": model_config})
    ctx.config = config
    if args.grid:
        grids_path = Path(args.grid)
        require_paths(grids_path, what="hyperparameter grids")
        ctx.resources = replace(ctx.resources, grids={**ctx.resources.grids, **load_grids(grids_path)})
    resources = ctx.resources

    labeled = ctx.load_corpus(require_labels=True)
    posts = [item.post for item in labeled]
    labels = [item.label for item in labeled]
    cleans = ctx.preprocess(posts)
    spec = ModelSpec(algorithm=model_config.algorithm, hyperparameters=model_config.hyperparameters)

    if model_config.tune_vectorizers:
        tuned = {}
        texts = [clean.clean_text for clean in cleans]
        for block, _ in config.vectorizers.blocks():
            grid = resources.grids["vectorizers"][block]
            tuned[block], score = vectorizer_grid_search(
                VectorizerMode(block), grid, texts, labels, spec, model_config.folds, config.seed,
                n_jobs=model_config.n_jobs, grids=resources.grids,
            )
            logger.info("%s vectorizer: %s (macro-F1 %.4f)", block, tuned[block].model_dump(), score)
        config = config.model_copy(update={"vectorizers": config.vectorizers.model_copy(update=tuned)})
        ctx.config = config
        write_json(ctx.output("vectorizer_search.json"), tuned)

    if model_config.grid_search:
        extractor = FeatureExtractor.fit(
            [clean.clean_text for clean in cleans], config.vectorizers, resources.affect, resources.tagger, config.features
        )
        X = extractor.transform(cleans, [post.text for post in posts])
        result = grid_search(
            spec.algorithm,
            resources.grids[spec.algorithm.value],
            X,
            labels,
            model_config.folds,
            config.seed,
            n_jobs=model_config.n_jobs,
            grids=resources.grids,
        )
        spec = result.best
        write_json(ctx.output("grid_search.json"), result)
        logger.info("grid search best %s (macro-F1 %.4f)", spec.hyperparameters, result.best_score)

    cv = cross_validate(posts, cleans, labels, config, resources, spec, config.seed)
    report = cv.report
    write_json(
        ctx.output("metrics.json"),
        {
            "seed": config.seed,
            "folds": model_config.folds,
            "spec": spec,
            "drop": report.drop,
            "rise": report.rise,
            "lexicon_coverage": cv.coverage,
        },
    )
    write_csv(ctx.output("metrics.csv"), metrics_frame(spec.algorithm, report))
    write_csv(ctx.output("advisor_metrics.csv"), pd.DataFrame.from_records([row.model_dump() for row in cv.by_advisor]))
    write_json(ctx.output("coverage.json"), {"lexicon_coverage": cv.coverage, "posts": len(posts)})
    # wall-clock values, kept out of the metric files
    write_json(ctx.output("timings.json"), {"fit_seconds": report.fit_seconds, "predict_seconds": report.predict_seconds})

    fitted = fit_pipeline(posts, cleans, labels, config, resources, spec, config.seed)
    for path in save_pipeline(fitted, config.artifacts_dir):
        logger.debug("saved %s", path)
    logger.info(
        "drop P/R/F1 %.2f/%.2f/%.2f, rise P/R/F1 %.2f/%.2f/%.2f, lexicon coverage %.2f%%",
        report.drop.precision, report.drop.recall, report.drop.f1,
        report.rise.precision, report.rise.recall, report.rise.f1,
        100 * cv.coverage,
    )
    return 0
