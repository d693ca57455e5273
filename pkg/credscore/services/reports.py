"""Artifact writers. Every write goes to a sibling temp file first and is
then renamed into place, so a failed run never leaves a half-written file."""

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

from .. import __version__

MANIFEST_SUFFIX = ".manifest.json"


def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json", by_alias=True)
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, dict):
        return {str(key.value if hasattr(key, "value") else key): _jsonable(item) for key, item in value.items()}
    return value


def atomic_write_text(path: Path, content: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_name(f".{path.name}.tmp")
    tmp_path.write_text(content, encoding="utf-8")
    os.replace(tmp_path, path)
    return path


def write_json(path: Path, payload: Any) -> Path:
    text = json.dumps(_jsonable(payload), ensure_ascii=False, sort_keys=True, indent=2)
    return atomic_write_text(path, text + "\n")


def write_jsonl(path: Path, records: Iterable[Any]) -> Path:
    lines = [json.dumps(_jsonable(record), ensure_ascii=False, sort_keys=True) for record in records]
    return atomic_write_text(path, "".join(line + "\n" for line in lines))


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    return atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n", float_format="%.6g"))


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_jsonl(path: Path) -> list[Any]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]


def file_digest(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def input_digests(paths: Sequence[Optional[Path]]) -> dict[str, str]:
    digests: dict[str, str] = {}
    for path in paths:
        if path is None:
            continue
        path = Path(path)
        if path.is_dir():
            for child in sorted(path.glob("*.csv")):
                digests[f"{path.name}/{child.name}"] = file_digest(child)
        elif path.is_file():
            digests[path.name] = file_digest(path)
    return digests


def record_manifest(
    out_dir: Path,
    command: str,
    config_digest: str,
    seed: int,
    inputs: Sequence[Optional[Path]],
    outputs: Sequence[str] = (),
) -> Path:
    """Write the run manifest. It holds no timestamps so reruns are identical."""
    manifest = {
        "command": command,
        "version": __version__,
        "config_digest": config_digest,
        "seed": seed,
        "inputs": input_digests(inputs),
        "outputs": sorted(outputs),
    }
    return write_json(Path(out_dir) / f"{command}{MANIFEST_SUFFIX}", manifest)
