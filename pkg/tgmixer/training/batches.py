"""Training batches: chronological positives mirrored by resampled-destination negatives."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from ..constants import DEFAULT_BATCH_SIZE, MAX_NEGATIVE_RETRIES
from ..graph.events import EventLog
from ..models import GraphError

__all__ = ["Batch", "make_batches", "sample_negative_dst"]


@dataclass(frozen=True)
class Batch:
    """Positives first, then one negative per positive with the same (src, t0)."""

    src: np.ndarray
    dst: np.ndarray
    t0: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def positives(self) -> int:
        """Number of positive pairs (half the batch)."""
        return len(self.labels) // 2


def sample_negative_dst(
    positive_dst: np.ndarray,
    low: int,
    high: int,
    rng: np.random.Generator,
    max_retries: int = MAX_NEGATIVE_RETRIES,
) -> np.ndarray:
    """Uniform draws from [low, high), redrawn where they hit the positive destination.

    After `max_retries` rounds any remaining collision is accepted.
    """
    negatives = rng.integers(low, high, size=len(positive_dst))
    for _ in range(max_retries):
        clash = negatives == positive_dst
        if not clash.any():
            break
        negatives[clash] = rng.integers(low, high, size=int(clash.sum()))
    return negatives


def _check_range(events: EventLog, span: range) -> None:
    if not len(span):
        msg = "cannot build batches from an empty event range"
        raise GraphError(msg)
    if span.start < 0 or span.stop > len(events):
        msg = f"event range {span.start}..{span.stop} outside the log of {len(events)} events"
        raise GraphError(msg)


def make_batches(
    events: EventLog,
    span: range,
    batch_size: int = DEFAULT_BATCH_SIZE,
    rng: np.random.Generator | None = None,
    all_nodes: bool = False,
) -> Iterator[Batch]:
    """Yield batches over `span` in chronological order.

    Args:
        events: The event log
        span: Event indices to cover
        batch_size: Positives per batch
        rng: Negative sampling generator (seed 0 when omitted)
        all_nodes: Draw negatives from every node instead of the destination range

    Raises:
        GraphError: empty or out-of-bounds range
    """
    _check_range(events, span)
    rng = np.random.default_rng(0) if rng is None else rng
    low, high = (0, events.num_nodes) if all_nodes else (events.dst_lo, events.dst_hi)
    for start in range(span.start, span.stop, batch_size):
        idx = np.arange(start, min(start + batch_size, span.stop))
        src, dst, t0 = events.src[idx], events.dst[idx], events.ts[idx]
        negatives = sample_negative_dst(dst, low, high, rng)
        yield Batch(
            np.concatenate([src, src]),
            np.concatenate([dst, negatives]),
            np.concatenate([t0, t0]),
            np.concatenate([np.ones(len(idx)), np.zeros(len(idx))]),
        )
