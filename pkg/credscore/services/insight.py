import logging
import math
from typing import Literal, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from ..schemas import (
    SOCIAL_METRIC_FIELDS,
    CorrelationCell,
    CorrelationRow,
    CorrelationTable,
    CredibilityRank,
    SocialMetrics,
)

logger = logging.getLogger(__name__)

Method = Literal["pearson", "spearman"]
QUALITY_COLUMNS: tuple[str, ...] = ("drop", "rise", "global")


def pearson(xs: Sequence[float], ys: Sequence[float], *, method: Method = "pearson") -> Optional[float]:
    """Correlation coefficient, or None when fewer than two points or a constant vector."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        return None
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    if method == "spearman":
        r = stats.spearmanr(x, y).statistic
    else:
        r = stats.pearsonr(x, y).statistic
    if not math.isfinite(r):
        return None
    return float(min(1.0, max(-1.0, r)))


def _quality(rank: CredibilityRank, column: str) -> Optional[float]:
    return {"drop": rank.drop_quality, "rise": rank.rise_quality, "global": rank.global_quality}[column]


def correlate_metrics(
    ranks: Sequence[CredibilityRank],
    metrics: Sequence[SocialMetrics],
    *,
    method: Method = "pearson",
) -> CorrelationTable:
    by_advisor = {item.advisor_id: item for item in metrics}
    paired = sorted(
        ((rank, by_advisor[rank.advisor_id]) for rank in ranks if rank.advisor_id in by_advisor),
        key=lambda pair: pair[0].advisor_id,
    )
    unmatched = sorted({rank.advisor_id for rank in ranks} - set(by_advisor))
    if unmatched:
        logger.warning("no social metrics for advisors: %s", ", ".join(unmatched))

    rows = []
    for field in SOCIAL_METRIC_FIELDS:
        cells = {}
        for column in QUALITY_COLUMNS:
            pairs = [
                (getattr(social, field), quality)
                for rank, social in paired
                if (quality := _quality(rank, column)) is not None
            ]
            r = pearson([x for x, _ in pairs], [y for _, y in pairs], method=method)
            if r is None:
                logger.warning("correlation %s/%s undefined (%d usable advisors)", field, column, len(pairs))
            cells[column] = CorrelationCell(r=r, n=len(pairs), undefined=r is None)
        rows.append(CorrelationRow(metric=field, drop=cells["drop"], rise=cells["rise"], global_=cells["global"]))
    return CorrelationTable(method=method, rows=rows)


def correlation_frame(table: CorrelationTable) -> pd.DataFrame:
    """Metric rows by drop / rise / global columns; undefined cells stay empty."""
    records = [
        {"metric": row.metric, **{column: table.cell(row.metric, column).r for column in QUALITY_COLUMNS}}
        for row in table.rows
    ]
    return pd.DataFrame.from_records(records, columns=["metric", *QUALITY_COLUMNS])


def ranking_frame(ranks: Sequence[CredibilityRank]) -> pd.DataFrame:
    """Qualities as percentages; absent qualities stay empty."""
    frame = pd.DataFrame.from_records([rank.model_dump() for rank in ranks])
    if frame.empty:
        return pd.DataFrame(columns=["advisor_id", "drop_pct", "rise_pct", "global_pct", "flags"])
    for column in QUALITY_COLUMNS:
        frame[f"{column}_pct"] = frame[f"{column}_quality"].astype(float) * 100
    frame["flags"] = [";".join(quality_flags(rank)) for rank in ranks]
    return frame[
        [
            "advisor_id",
            "drop_pct",
            "rise_pct",
            "global_pct",
            "drop_verified",
            "rise_verified",
            "drop_successes",
            "rise_successes",
            "indeterminate",
            "flags",
        ]
    ]


def quality_flags(rank: CredibilityRank) -> list[str]:
    return [f"{column}_quality_absent" for column in QUALITY_COLUMNS if _quality(rank, column) is None]


def ranking_records(ranks: Sequence[CredibilityRank]) -> list[dict]:
    return [{**rank.model_dump(mode="json"), "flags": quality_flags(rank)} for rank in ranks]
