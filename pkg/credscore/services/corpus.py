import json
import logging
from collections import Counter, defaultdict
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import pandas as pd
from pydantic import ValidationError

from ..core.errors import IngestError, PriceDataError, TickerDictionaryError
from ..schemas import (
    SOCIAL_METRIC_FIELDS,
    Category,
    CategoryShare,
    CorpusSummary,
    LabeledPost,
    Post,
    PriceBar,
    PriceSeries,
    SocialMetrics,
    TickerDictionary,
)
from .preprocess import extract_cashtags, extract_hashtags
from .reports import atomic_write_text

logger = logging.getLogger(__name__)

POST_REQUIRED_FIELDS = ("id", "advisor_id", "published_at", "text")
PRICE_COLUMNS = ["date", "open", "high", "low", "close"]
_LABELS = {"drop": Category.DROP, "rise": Category.RISE, "other": Category.OTHER}


def _parse_published_at(value: object) -> datetime:
    if not isinstance(value, str):
        raise ValueError("published_at must be an ISO-8601 string")
    parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    field = ".".join(str(part) for part in error.get("loc", ()))
    message = error.get("msg", "invalid value").removeprefix("Value error, ")
    return f"{field}: {message}" if field else message


def parse_post_record(record: dict, *, line: int) -> LabeledPost:
    for field in POST_REQUIRED_FIELDS:
        if field not in record or record[field] is None:
            raise IngestError(f"missing {field}", line=line)
    try:
        published_at = _parse_published_at(record["published_at"])
    except ValueError as exc:
        raise IngestError(f"bad published_at: {exc}", line=line) from exc

    text = str(record["text"])
    label_value = record.get("label")
    label = None
    if label_value is not None:
        label = _LABELS.get(str(label_value).strip().lower())
        if label is None:
            raise IngestError(f"unknown label {label_value!r}", line=line)
    try:
        post = Post(
            id=str(record["id"]),
            advisor_id=str(record["advisor_id"]),
            published_at=published_at,
            text=text,
            cashtags=record.get("cashtags") or extract_cashtags(text),
            hashtags=record.get("hashtags") or extract_hashtags(text),
        )
    except ValidationError as exc:
        raise IngestError(_first_error(exc), line=line) from exc
    return LabeledPost(post=post, label=label)


def load_posts(path: Path, *, require_labels: bool = False) -> list[LabeledPost]:
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"posts file not found: {path}")
    posts: list[LabeledPost] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"malformed JSON ({exc.msg})", line=line_no) from exc
            if not isinstance(record, dict):
                raise IngestError("record is not a JSON object", line=line_no)
            labeled = parse_post_record(record, line=line_no)
            if labeled.post.id in seen:
                raise IngestError(f"duplicate id {labeled.post.id!r}", line=line_no)
            if require_labels and labeled.label is None:
                raise IngestError(f"post {labeled.post.id!r} has no label", line=line_no)
            seen.add(labeled.post.id)
            posts.append(labeled)
    logger.info("Loaded %d posts from %s", len(posts), path.name)
    return posts


def dump_posts(path: Path, posts: Iterable[LabeledPost]) -> None:
    lines = []
    for labeled in posts:
        record = labeled.post.model_dump(mode="json")
        if labeled.label is not None:
            record["label"] = labeled.label.value
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def load_price_csv(path: Path, ticker: str) -> PriceSeries:
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={"date": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise PriceDataError(f"cannot read {path}: {exc}") from exc
    if list(frame.columns) != PRICE_COLUMNS:
        raise PriceDataError(f"{path.name}: expected header {','.join(PRICE_COLUMNS)}")

    bars: list[PriceBar] = []
    for row_no, row in enumerate(frame.itertuples(index=False), start=1):
        try:
            bar_date = date.fromisoformat(str(row.date).strip())
        except ValueError as exc:
            raise PriceDataError(f"bad date {row.date!r}", row=row_no) from exc
        try:
            bars.append(
                PriceBar(date=bar_date, open=row.open, high=row.high, low=row.low, close=row.close)
            )
        except ValidationError as exc:
            raise PriceDataError(_first_error(exc), row=row_no) from exc

    bars.sort(key=lambda bar: bar.date)
    duplicates = [day for day, count in Counter(bar.date for bar in bars).items() if count > 1]
    if duplicates:
        raise PriceDataError(f"{path.name}: duplicate date {min(duplicates).isoformat()}")
    return PriceSeries(ticker=ticker.upper(), bars=tuple(bars))


def load_ticker_dictionary(paths: Sequence[Path]) -> TickerDictionary:
    if not paths:
        raise TickerDictionaryError("no ticker dictionary files given")
    aliases: dict[str, str] = {}
    for path in paths:
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
            raise TickerDictionaryError(f"cannot read {path}: {exc}") from exc
        if list(frame.columns) != ["alias", "ticker"]:
            raise TickerDictionaryError(f"{Path(path).name}: expected header alias,ticker")
        for alias, ticker in zip(frame["alias"], frame["ticker"]):
            if alias.strip() and ticker.strip():
                # later files win on collision
                aliases[alias.strip().lower()] = ticker.strip().upper()
    if not aliases:
        raise TickerDictionaryError("ticker dictionary is empty")
    return TickerDictionary(aliases=aliases)


def load_social_metrics(path: Path) -> list[SocialMetrics]:
    try:
        frame = pd.read_csv(path, dtype={"advisor_id": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    expected = ["advisor_id", *SOCIAL_METRIC_FIELDS]
    if list(frame.columns) != expected:
        raise IngestError(f"{Path(path).name}: expected header {','.join(expected)}")
    metrics = []
    for row_no, record in enumerate(frame.to_dict(orient="records"), start=1):
        try:
            metrics.append(SocialMetrics(**record))
        except ValidationError as exc:
            raise IngestError(_first_error(exc), line=row_no + 1) from exc
    return metrics


def load_holidays(path: Path) -> frozenset[date]:
    days = set()
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            days.add(date.fromisoformat(line))
        except ValueError as exc:
            raise IngestError(f"bad holiday date {line!r}", line=line_no) from exc
    return frozenset(days)


def _share(advisor_id: str, labels: list[Category | None]) -> CategoryShare:
    counts = Counter(label for label in labels if label is not None)
    labeled = sum(counts.values())

    def pct(category: Category) -> float:
        return round(100.0 * counts[category] / labeled, 2) if labeled else 0.0

    return CategoryShare(
        advisor_id=advisor_id,
        total=len(labels),
        drop_pct=pct(Category.DROP),
        rise_pct=pct(Category.RISE),
        other_pct=pct(Category.OTHER),
        unlabeled=len(labels) - labeled,
    )


def summarize_corpus(posts: Sequence[LabeledPost]) -> CorpusSummary:
    by_advisor: dict[str, list[Category | None]] = defaultdict(list)
    for labeled in posts:
        by_advisor[labeled.post.advisor_id].append(labeled.label)
    return CorpusSummary(
        posts=len(posts),
        advisors=len(by_advisor),
        by_advisor=[_share(advisor, labels) for advisor, labels in sorted(by_advisor.items())],
        overall=_share("all", [labeled.label for labeled in posts]),
    )
