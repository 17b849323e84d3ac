"""Checkpoint files: a text manifest plus a raw little-endian float64 payload.

Manifest layout::

    #tgmixer-checkpoint 1
    #K=30
    #d_time=100
    mixer.token1.weight 30 15 0
    ...

Header lines echo the run configuration; tensor lines are ``name rows cols offset``
with the byte offset into ``<prefix>.bin``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..logging_setup import get_logger
from ..models import CheckpointError, ShapeError
from .params import ParamGroup

__all__ = ["checkpoint_paths", "load_checkpoint", "load_into", "save_checkpoint"]

log = get_logger("checkpoint")

_MAGIC = "#tgmixer-checkpoint 1"
_DTYPE = np.dtype("<f8")


def checkpoint_paths(prefix: str | Path) -> tuple[Path, Path]:
    """(manifest, payload) file paths for `prefix`."""
    prefix = Path(prefix)
    return prefix.with_name(prefix.name + ".manifest"), prefix.with_name(prefix.name + ".bin")


def save_checkpoint(prefix: str | Path, params: ParamGroup, header: dict[str, object] | None = None) -> tuple[Path, Path]:
    """Write every parameter value in registration order.

    Returns:
        The manifest and payload paths
    """
    manifest_path, payload_path = checkpoint_paths(prefix)
    lines = [_MAGIC]
    lines.extend(f"#{key}={value}" for key, value in (header or {}).items())
    chunks = []
    offset = 0
    for p in params:
        rows, cols = p.shape
        lines.append(f"{p.name} {rows} {cols} {offset}")
        data = p.value.astype(_DTYPE).tobytes()
        chunks.append(data)
        offset += len(data)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    payload_path.write_bytes(b"".join(chunks))
    manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.debug("Saved %d tensors (%d bytes) to %s", len(params), offset, manifest_path)
    return manifest_path, payload_path


def load_checkpoint(prefix: str | Path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    """Read a checkpoint back.

    Returns:
        (header, tensors by name)

    Raises:
        CheckpointError: missing files, bad manifest, truncated payload
    """
    manifest_path, payload_path = checkpoint_paths(prefix)
    try:
        text = manifest_path.read_text(encoding="utf-8")
        payload = payload_path.read_bytes()
    except OSError as e:
        msg = f"cannot read checkpoint {prefix}: {e}"
        raise CheckpointError(msg) from e

    lines = text.splitlines()
    if not lines or lines[0] != _MAGIC:
        msg = f"{manifest_path} is not a tgmixer checkpoint manifest"
        raise CheckpointError(msg)

    header: dict[str, str] = {}
    tensors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            header[key.strip()] = value.strip()
            continue
        try:
            name, rows_s, cols_s, offset_s = line.split()
            rows, cols, offset = int(rows_s), int(cols_s), int(offset_s)
        except ValueError as e:
            msg = f"{manifest_path}:{lineno}: expected 'name rows cols offset'"
            raise CheckpointError(msg) from e
        end = offset + rows * cols * _DTYPE.itemsize
        if end > len(payload):
            msg = f"{payload_path} truncated: {name} needs bytes {offset}..{end}, file has {len(payload)}"
            raise CheckpointError(msg)
        tensors[name] = np.frombuffer(payload, dtype=_DTYPE, count=rows * cols, offset=offset).reshape(rows, cols).astype(np.float64)
    return header, tensors


def load_into(params: ParamGroup, tensors: dict[str, np.ndarray]) -> None:
    """Copy loaded tensors into `params`.

    Raises:
        ShapeError: a tensor is missing, extra, or has another shape (config mismatch)
    """
    extra = sorted(set(tensors) - set(params.names))
    if extra:
        msg = f"checkpoint has tensors the model does not: {', '.join(extra)}"
        raise ShapeError(msg)
    params.restore(tensors)
