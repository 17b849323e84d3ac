"""Per-node chronological adjacency and the neighbor queries the encoders use.

Adjacency is stored CSR-style: entries of node ``v`` live in
``[indptr[v], indptr[v + 1])`` and are ascending in timestamp, ties in event order.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..logging_setup import get_logger
from ..models import GraphError
from .events import EventLog

__all__ = ["Neighbor", "NeighborList", "TemporalGraph", "build_index"]

log = get_logger("graph")


class Neighbor(NamedTuple):
    """One temporal link seen from a node."""

    event_id: int
    neighbor: int
    timestamp: float


@dataclass(frozen=True)
class NeighborList:
    """Neighbor query result, most recent first.

    `event_ids` doubles as the handle into the link-feature matrix.
    """

    event_ids: np.ndarray
    neighbors: np.ndarray
    timestamps: np.ndarray

    @classmethod
    def empty(cls) -> NeighborList:
        """A result with no entries."""
        return cls(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))

    def __len__(self) -> int:
        return len(self.event_ids)

    def __iter__(self) -> Iterator[Neighbor]:
        for eid, nbr, ts in zip(self.event_ids, self.neighbors, self.timestamps, strict=True):
            yield Neighbor(int(eid), int(nbr), float(ts))

    def take(self, positions: np.ndarray) -> NeighborList:
        """Subset by positions, keeping the given order."""
        return NeighborList(self.event_ids[positions], self.neighbors[positions], self.timestamps[positions])

    def by_recency(self) -> NeighborList:
        """Reorder most recent first, ties broken by the later event first."""
        order = np.lexsort((-self.event_ids, -self.timestamps))
        return self.take(order)


@dataclass(frozen=True)
class TemporalGraph:
    """Immutable temporal index over an EventLog."""

    events: EventLog
    undirected: bool
    indptr: np.ndarray
    adj_event: np.ndarray
    adj_neighbor: np.ndarray
    adj_ts: np.ndarray

    @property
    def num_nodes(self) -> int:
        """Node count."""
        return self.events.num_nodes

    def adjacency(self, node: int) -> np.ndarray:
        """Event ids touching `node`, ascending in time."""
        return self.adj_event[self.indptr[node] : self.indptr[node + 1]]

    def link_features(self, event_ids: np.ndarray) -> np.ndarray:
        """Link feature rows for the given events."""
        return self.events.link_features[event_ids]

    def _bounds(self, node: int, t0: float) -> tuple[int, int]:
        """Slice of `node`'s adjacency strictly before `t0`."""
        if not math.isfinite(t0):
            msg = f"query time must be finite, got {t0}"
            raise GraphError(msg)
        if not 0 <= node < self.num_nodes:
            msg = f"node {node} out of range [0, {self.num_nodes})"
            raise GraphError(msg)
        lo, hi = int(self.indptr[node]), int(self.indptr[node + 1])
        return lo, lo + int(np.searchsorted(self.adj_ts[lo:hi], t0, side="left"))

    def _slice(self, positions: np.ndarray | slice) -> NeighborList:
        return NeighborList(self.adj_event[positions], self.adj_neighbor[positions], self.adj_ts[positions])

    def recent_neighbors(self, node: int, t0: float, k: int) -> NeighborList:
        """The `k` most recent links of `node` strictly before `t0`, most recent first."""
        if k < 1:
            msg = f"K must be >= 1, got {k}"
            raise GraphError(msg)
        lo, end = self._bounds(node, t0)
        start = max(lo, end - k)
        return self._slice(np.arange(end - 1, start - 1, -1))

    def windowed_neighbors(self, node: int, t0: float, window: float) -> np.ndarray:
        """Neighbor ids of links in ``[t0 - window, t0)``, one entry per link.

        Self-loop partners are left out. The result is a multiset in chronological order.
        """
        if not window > 0:
            msg = f"window must be > 0, got {window}"
            raise GraphError(msg)
        lo, end = self._bounds(node, t0)
        start = lo + int(np.searchsorted(self.adj_ts[lo:end], t0 - window, side="left"))
        neighbors = self.adj_neighbor[start:end]
        return neighbors[neighbors != node]

    def uniform_neighbors(self, node: int, t0: float, k: int, rng: np.random.Generator) -> NeighborList:
        """Up to `k` links before `t0` sampled uniformly without replacement, most recent first."""
        if k < 1:
            msg = f"K must be >= 1, got {k}"
            raise GraphError(msg)
        lo, end = self._bounds(node, t0)
        count = end - lo
        if count <= k:
            return self._slice(np.arange(end - 1, lo - 1, -1))
        picked = np.sort(rng.choice(count, size=k, replace=False))[::-1]
        return self._slice(lo + picked)

    def _pool(self, first: NeighborList, second: list[NeighborList]) -> NeighborList:
        pooled = NeighborList(
            np.concatenate([first.event_ids, *(s.event_ids for s in second)]),
            np.concatenate([first.neighbors, *(s.neighbors for s in second)]),
            np.concatenate([first.timestamps, *(s.timestamps for s in second)]),
        )
        # first occurrence wins, so a link already found at hop 1 keeps its hop-1 neighbor
        _, keep = np.unique(pooled.event_ids, return_index=True)
        return pooled.take(np.sort(keep))

    def _second_hop(self, first: NeighborList, fetch: Callable[[int, float], NeighborList]) -> list[NeighborList]:
        return [fetch(entry.neighbor, entry.timestamp) for entry in first]

    def two_hop_recent(self, node: int, t0: float, k: int) -> NeighborList:
        """Most recent `k` links pooled from 1-hop and 2-hop neighborhoods.

        Each 1-hop link contributes its neighbor's `k` most recent links before that
        link's own timestamp; the pool is deduplicated by event id.
        """
        first = self.recent_neighbors(node, t0, k)
        pooled = self._pool(first, self._second_hop(first, lambda v, t: self.recent_neighbors(v, t, k)))
        return pooled.by_recency().take(np.arange(min(k, len(pooled))))

    def uniform_two_hop(self, node: int, t0: float, k: int, rng: np.random.Generator) -> NeighborList:
        """Uniform counterpart of `two_hop_recent`: sample at each hop, then sample `k` from the pool."""
        first = self.uniform_neighbors(node, t0, k, rng)
        pooled = self._pool(first, self._second_hop(first, lambda v, t: self.uniform_neighbors(v, t, k, rng)))
        if len(pooled) > k:
            pooled = pooled.take(rng.choice(len(pooled), size=k, replace=False))
        return pooled.by_recency()


def build_index(events: EventLog, num_nodes: int | None = None, undirected: bool = True) -> TemporalGraph:
    """Index a stable-sorted EventLog.

    Undirected: every link is listed under both endpoints (once for a self-loop).
    Directed: only under its source.

    Raises:
        GraphError: unsorted events or node id out of range
    """
    num_nodes = events.num_nodes if num_nodes is None else num_nodes
    if num_nodes != events.num_nodes:
        events = EventLog(events.src, events.dst, events.ts, events.link_features, num_nodes, events.dst_lo, events.dst_hi)
    events.validate()
    if len(events) and np.any(np.diff(events.ts) < 0):
        msg = "events must be sorted by timestamp"
        raise GraphError(msg)

    eids = np.arange(len(events), dtype=np.int64)
    if undirected:
        # interleave (src, dst) per event so the stable grouping keeps time order
        owners = np.stack([events.src, events.dst], axis=1).ravel()
        others = np.stack([events.dst, events.src], axis=1).ravel()
        entry_events = np.repeat(eids, 2)
        keep = np.ones(len(owners), dtype=bool)
        keep[1::2] = events.src != events.dst
        owners, others, entry_events = owners[keep], others[keep], entry_events[keep]
    else:
        owners, others, entry_events = events.src, events.dst, eids

    order = np.argsort(owners, kind="stable")
    counts = np.bincount(owners, minlength=num_nodes)
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    graph = TemporalGraph(
        events=events,
        undirected=undirected,
        indptr=indptr,
        adj_event=entry_events[order],
        adj_neighbor=others[order],
        adj_ts=events.ts[entry_events[order]],
    )
    log.debug("Indexed %d events over %d nodes (undirected=%s)", len(events), num_nodes, undirected)
    return graph

