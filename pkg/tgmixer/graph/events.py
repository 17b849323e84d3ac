"""Interaction events: the columnar log and its CSV ingestion."""

from __future__ import annotations

import re
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from ..logging_setup import get_logger
from ..models import DatasetError, GraphError

__all__ = ["EventLog", "EventRecord", "load_events", "write_events_csv"]

log = get_logger("graph")

# src, dst, timestamp, state_label
_FIXED_COLUMNS = 4

_PARSER_LINE = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


@dataclass(frozen=True, slots=True)
class EventRecord:
    """A single timestamped interaction."""

    event_id: int
    src: int
    dst: int
    timestamp: float
    link_features: np.ndarray


@dataclass(frozen=True)
class EventLog:
    """Events stored column-wise, stable-sorted by timestamp.

    Destinations occupy the id range [dst_lo, dst_hi), which is what negative sampling draws from.
    """

    src: np.ndarray
    dst: np.ndarray
    ts: np.ndarray
    link_features: np.ndarray
    num_nodes: int
    dst_lo: int = 0
    dst_hi: int = 0

    def __post_init__(self) -> None:
        n = len(self.ts)
        if not len(self.src) == len(self.dst) == n or self.link_features.shape[0] != n:
            msg = "event columns have different lengths"
            raise GraphError(msg)
        if self.dst_hi == 0:
            object.__setattr__(self, "dst_hi", self.num_nodes)

    @classmethod
    def from_arrays(
        cls,
        src: np.ndarray | list[int],
        dst: np.ndarray | list[int],
        ts: np.ndarray | list[float],
        link_features: np.ndarray | None = None,
        num_nodes: int | None = None,
        dst_range: tuple[int, int] | None = None,
    ) -> EventLog:
        """Build a log from already-remapped columns, sorting stably by timestamp.

        Args:
            src: Source node ids
            dst: Destination node ids
            ts: Timestamps
            link_features: E x d_link matrix (empty features when omitted)
            num_nodes: Node count (max id + 1 when omitted)
            dst_range: Negative-sampling destination range (all nodes when omitted)
        """
        src_a = np.asarray(src, dtype=np.int64)
        dst_a = np.asarray(dst, dtype=np.int64)
        ts_a = np.asarray(ts, dtype=np.float64)
        feats = np.zeros((len(ts_a), 0)) if link_features is None else np.asarray(link_features, dtype=np.float64)
        if feats.ndim != 2:  # noqa: PLR2004
            feats = feats.reshape(len(ts_a), -1 if feats.size else 0)
        if num_nodes is None:
            num_nodes = int(max(src_a.max(initial=-1), dst_a.max(initial=-1))) + 1
        order = np.argsort(ts_a, kind="stable")
        lo, hi = dst_range if dst_range is not None else (0, num_nodes)
        return cls(src_a[order], dst_a[order], ts_a[order], feats[order], num_nodes, lo, hi)

    def __len__(self) -> int:
        return len(self.ts)

    def __getitem__(self, event_id: int) -> EventRecord:
        return EventRecord(
            event_id=int(event_id),
            src=int(self.src[event_id]),
            dst=int(self.dst[event_id]),
            timestamp=float(self.ts[event_id]),
            link_features=self.link_features[event_id],
        )

    def __iter__(self) -> Iterator[EventRecord]:
        return (self[i] for i in range(len(self)))

    @property
    def d_link(self) -> int:
        """Link feature width (0 when the dataset has none)."""
        return int(self.link_features.shape[1])

    def validate(self) -> None:
        """Check node-id ranges and timestamps.

        Raises:
            GraphError: id out of [0, num_nodes) or a negative / non-finite timestamp
        """
        for name, ids in (("src", self.src), ("dst", self.dst)):
            if len(ids) and (ids.min() < 0 or ids.max() >= self.num_nodes):
                msg = f"{name} node id out of range [0, {self.num_nodes})"
                raise GraphError(msg)
        if not np.all(np.isfinite(self.ts)) or (len(self.ts) and self.ts.min() < 0):
            msg = "timestamps must be finite and >= 0"
            raise GraphError(msg)

    def concat(self, other: EventLog) -> EventLog:
        """Return a new log holding both event sets, re-sorted stably (self first on ties)."""
        if other.d_link != self.d_link:
            msg = f"link feature width mismatch: {self.d_link} vs {other.d_link}"
            raise GraphError(msg)
        return EventLog.from_arrays(
            np.concatenate([self.src, other.src]),
            np.concatenate([self.dst, other.dst]),
            np.concatenate([self.ts, other.ts]),
            np.concatenate([self.link_features, other.link_features]),
            num_nodes=max(self.num_nodes, other.num_nodes),
            dst_range=(self.dst_lo, self.dst_hi),
        )


def _read_table(path: Path, has_header: bool) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            header=None,
            skiprows=1 if has_header else 0,
            dtype=str,
            skipinitialspace=True,
            skip_blank_lines=False,
        )
    except FileNotFoundError as e:
        msg = f"dataset not found: {path}"
        raise DatasetError(msg) from e
    except pd.errors.EmptyDataError as e:
        msg = f"empty file: {path}"
        raise DatasetError(msg) from e
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        if match:
            expected, line, seen = (int(g) for g in match.groups())
            msg = f"inconsistent feature length: expected {expected} fields, saw {seen}"
            raise DatasetError(msg, line=line) from e
        msg = f"cannot parse {path}: {e}"
        raise DatasetError(msg) from e


def load_events(path: str | Path, has_header: bool = True) -> EventLog:
    """Load a JODIE-layout CSV: ``src,dst,timestamp,state_label,f1,...,fd``.

    Node ids are remapped densely: sources to [0, n_src), destinations to
    [n_src, n_src + n_dst). The state label is parsed then discarded.

    Args:
        path: CSV file
        has_header: Skip the first line

    Raises:
        DatasetError: missing/empty file, malformed row, inconsistent feature length
    """
    path = Path(path)
    table = _read_table(path, has_header)
    first_line = 2 if has_header else 1
    # blank lines are kept as all-NaN rows so row positions map back to file lines
    table = table[~table.isna().all(axis=1)]
    if table.empty:
        msg = f"empty file: {path}"
        raise DatasetError(msg)

    if table.shape[1] < _FIXED_COLUMNS:
        line = int(table.index[0]) + first_line
        msg = f"malformed row: expected at least {_FIXED_COLUMNS} fields, saw {table.shape[1]}"
        raise DatasetError(msg, line=line)

    missing = table.isna().to_numpy()
    numbers = table.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.isnan(numbers)
    if bad.any():
        row = int(np.flatnonzero(bad.any(axis=1))[0])
        line = int(table.index[row]) + first_line
        if missing[row, _FIXED_COLUMNS:].any() and not missing[row, :_FIXED_COLUMNS].any():
            present = int((~missing[row]).sum()) - _FIXED_COLUMNS
            msg = f"inconsistent feature length: expected {table.shape[1] - _FIXED_COLUMNS}, saw {present}"
        else:
            msg = "malformed row: non-numeric or missing field"
        raise DatasetError(msg, line=line)

    ts = numbers[:, 2]
    invalid_ts = ~np.isfinite(ts) | (ts < 0)
    if invalid_ts.any():
        row = int(np.flatnonzero(invalid_ts)[0])
        msg = f"invalid timestamp {ts[row]!r}"
        raise DatasetError(msg, line=int(table.index[row]) + first_line)
    if not np.all(np.isfinite(numbers[:, _FIXED_COLUMNS:])):
        row = int(np.flatnonzero(~np.isfinite(numbers[:, _FIXED_COLUMNS:]).all(axis=1))[0])
        msg = "non-finite link feature"
        raise DatasetError(msg, line=int(table.index[row]) + first_line)

    src_ids, src = np.unique(numbers[:, 0], return_inverse=True)
    dst_ids, dst = np.unique(numbers[:, 1], return_inverse=True)
    n_src, n_dst = len(src_ids), len(dst_ids)
    events = EventLog.from_arrays(
        src,
        dst + n_src,
        ts,
        numbers[:, _FIXED_COLUMNS:],
        num_nodes=n_src + n_dst,
        dst_range=(n_src, n_src + n_dst),
    )
    log.info("Loaded %s: %d nodes (%d sources), %d events, d_link=%d", path.name, events.num_nodes, n_src, len(events), events.d_link)
    return events


def write_events_csv(events: EventLog, path: str | Path) -> None:
    """Write a log back in the JODIE layout (state label 0, header line included)."""
    frame = pd.DataFrame(
        {
            "user_id": events.src,
            "item_id": events.dst,
            "timestamp": events.ts,
            "state_label": np.zeros(len(events), dtype=np.int64),
        }
    )
    for col in range(events.d_link):
        frame[f"f{col + 1}"] = events.link_features[:, col]
    frame.to_csv(path, index=False, float_format="%.17g")
