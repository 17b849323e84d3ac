"""CSV artifacts and run manifests.

A run is finished only when every artifact it names was written and holds
finite numbers; `check_written` is the last step of every command.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from .aioops import aiexists, write_text
from .logging_setup import get_logger
from .models import ArtifactError
from .version import VERSION

__all__ = ["check_written", "content_hash", "csv_text", "write_csv", "write_manifest"]

log = get_logger("artifacts")


def content_hash(path: str | Path) -> str:
    """Git blob hash of a file: sha1 of ``blob <size>\\0`` plus the content."""
    data = Path(path).read_bytes()
    return hashlib.sha1(b"blob %d\0" % len(data) + data, usedforsecurity=False).hexdigest()


def _check_finite(name: str, rows: Iterable[dict[str, Any]]) -> None:
    for number, row in enumerate(rows):
        for key, value in row.items():
            if isinstance(value, float) and not math.isfinite(value):
                msg = f"{name}: non-finite {key} in row {number}"
                raise ArtifactError(msg)


def csv_text(rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> str:
    """Render rows as CSV with round-trippable floats; None becomes an empty cell."""
    return pd.DataFrame(list(rows), columns=list(columns)).to_csv(index=False, float_format="%.17g", lineterminator="\n")


async def write_csv(path: str | Path, rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> Path:
    """Write rows after checking every float is finite.

    Raises:
        ArtifactError: non-finite value
    """
    path = Path(path)
    _check_finite(path.name, rows)
    await write_text(path, csv_text(rows, columns))
    log.info("wrote %s (%d rows)", path, len(rows))
    return path


async def write_manifest(  # noqa: PLR0913
    out_dir: Path,
    command: str,
    config: dict[str, Any],
    seed: int,
    inputs: Sequence[Path],
    artifacts: Sequence[Path],
    extra: dict[str, Any] | None = None,
) -> Path:
    """Write ``<command>.manifest.json``: config echo, seed, input hashes and artifact list."""
    manifest = {
        "command": command,
        "version": VERSION,
        "seed": seed,
        "config": config,
        "inputs": {str(p): content_hash(p) for p in inputs},
        "artifacts": [str(p) for p in artifacts],
        **(extra or {}),
    }
    path = out_dir / f"{command}.manifest.json"
    await write_text(path, json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


async def check_written(paths: Iterable[Path]) -> None:
    """Raise ArtifactError unless every path exists."""
    missing = [str(p) for p in paths if not await aiexists(p)]
    if missing:
        msg = f"artifacts missing: {', '.join(missing)}"
        raise ArtifactError(msg)
