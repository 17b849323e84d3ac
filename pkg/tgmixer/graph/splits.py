"""Chronological 70/15/15 splits and the node-encoder window."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import DEFAULT_WINDOW_EVENTS, MIN_SPLIT_EVENTS
from ..logging_setup import get_logger
from ..models import GraphError, Split

__all__ = ["SplitBoundaries", "chronological_split", "compute_default_window"]

log = get_logger("graph")


@dataclass(frozen=True, slots=True)
class SplitBoundaries:
    """Exclusive end indices of the train and validation event ranges."""

    train_end: int
    val_end: int
    n_events: int

    def range_of(self, split: Split | str) -> range:
        """Event-index range covered by `split`."""
        match Split(split):
            case Split.TRAIN:
                return range(0, self.train_end)
            case Split.VAL:
                return range(self.train_end, self.val_end)
            case Split.TEST:
                return range(self.val_end, self.n_events)


def _round_percent(n: int, percent: int) -> int:
    # half-up on integers
    return (percent * n + 50) // 100


def chronological_split(n_events: int, min_events: int = MIN_SPLIT_EVENTS) -> SplitBoundaries:
    """Split `n_events` chronologically into 70% / 15% / 15%.

    Args:
        n_events: Number of events in the log
        min_events: Smallest accepted log

    Raises:
        GraphError: too few events
    """
    if n_events < max(1, min_events):
        msg = f"too few events for a chronological split: {n_events} < {max(1, min_events)}"
        raise GraphError(msg)
    train_end = max(1, _round_percent(n_events, 70))
    val_end = max(train_end, _round_percent(n_events, 85))
    return SplitBoundaries(train_end, val_end, n_events)


def compute_default_window(ts: np.ndarray, train_end: int, last_events: int = DEFAULT_WINDOW_EVENTS) -> float:
    """Time gap covered by the last `last_events` training interactions.

    Falls back to the full training span, then to 1.0, when the gap is zero.

    Raises:
        GraphError: fewer than 2 training events
    """
    if train_end < 2:  # noqa: PLR2004
        msg = f"need at least 2 training events to derive the window, got {train_end}"
        raise GraphError(msg)
    window = float(ts[train_end - 1] - ts[max(0, train_end - last_events)])
    if window > 0:
        return window
    span = float(ts[train_end - 1] - ts[0])
    if span > 0:
        log.warning("Last %d training events share one timestamp, using the full training span %g as window", last_events, span)
        return span
    log.warning("All training timestamps are equal, using window 1.0")
    return 1.0
