"""Per-node link token matrices.

Row j of a node's K x C matrix holds [time columns | link features] of its j-th
selected link, most recent first; rows past the real count are exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph.index import NeighborList, TemporalGraph
from ..time_encoding import TimeEncoder, TimeEncodingContext
from .settings import GraphMixerConfig, NeighborMode

__all__ = [
    "LinkInputs",
    "LinkTokenMatrix",
    "assemble_tokens",
    "build_link_token_matrix",
    "gather_link_inputs",
    "select_links",
    "time_grad_to_encoder",
]


@dataclass(frozen=True)
class LinkTokenMatrix:
    """One node's zero-padded token matrix."""

    tokens: np.ndarray
    real_count: int


@dataclass(frozen=True)
class LinkInputs:
    """Raw link inputs for a batch of (node, t0) roots, before time encoding."""

    time_values: np.ndarray
    link_features: np.ndarray
    real_counts: np.ndarray

    @property
    def mask(self) -> np.ndarray:
        """B x K, True on real rows."""
        k = self.time_values.shape[1]
        return np.arange(k)[None, :] < self.real_counts[:, None]


def select_links(graph: TemporalGraph, node: int, t0: float, config: GraphMixerConfig, rng: np.random.Generator | None) -> NeighborList:
    """Pick up to K links of `node` before `t0` per the configured neighbor mode."""
    if config.neighbor_mode.sampled and rng is None:
        rng = np.random.default_rng(0)
    match config.neighbor_mode:
        case NeighborMode.RECENT_1HOP:
            return graph.recent_neighbors(node, t0, config.k)
        case NeighborMode.UNIFORM_1HOP:
            return graph.uniform_neighbors(node, t0, config.k, rng)  # type: ignore[arg-type]
        case NeighborMode.RECENT_2HOP:
            return graph.two_hop_recent(node, t0, config.k)
        case NeighborMode.UNIFORM_2HOP:
            return graph.uniform_two_hop(node, t0, config.k, rng)  # type: ignore[arg-type]


def gather_link_inputs(
    graph: TemporalGraph,
    nodes: np.ndarray,
    t0s: np.ndarray,
    config: GraphMixerConfig,
    rng: np.random.Generator | None = None,
) -> LinkInputs:
    """Collect time values and link features for every root, zero-padded to K."""
    if rng is None and config.neighbor_mode.sampled:
        rng = np.random.default_rng(0)
    batch, k, d_link = len(nodes), config.k, graph.events.d_link
    time_values = np.zeros((batch, k))
    features = np.zeros((batch, k, d_link))
    counts = np.zeros(batch, dtype=np.int64)
    for row, (node, t0) in enumerate(zip(nodes, t0s, strict=True)):
        links = select_links(graph, int(node), float(t0), config, rng)
        n = len(links)
        counts[row] = n
        if not n:
            continue
        time_values[row, :n] = float(t0) - links.timestamps if config.time_mode.relative else links.timestamps
        if d_link:
            features[row, :n] = graph.link_features(links.event_ids)
    return LinkInputs(time_values, features, counts)


def assemble_tokens(inputs: LinkInputs, encoder: TimeEncoder, config: GraphMixerConfig) -> tuple[np.ndarray, TimeEncodingContext | None]:
    """Build B x K x C tokens; raw time modes put the value in column 0 of a d_time-wide block.

    Returns:
        Tokens and the encoder context (None unless the encoder needs one)
    """
    mask = inputs.mask[..., None]
    if config.time_mode.encoded:
        time_block, ctx = encoder.forward(inputs.time_values)
    else:
        time_block = np.zeros((*inputs.time_values.shape, config.d_time))
        time_block[..., 0] = inputs.time_values
        ctx = None
    tokens = np.concatenate([time_block, inputs.link_features], axis=-1) * mask
    return tokens, ctx


def time_grad_to_encoder(
    g_tokens: np.ndarray, inputs: LinkInputs, encoder: TimeEncoder, ctx: TimeEncodingContext | None, config: GraphMixerConfig
) -> None:
    """Route the time-column gradient of real rows into the encoder."""
    if ctx is None:
        return
    encoder.backward(ctx, g_tokens[..., : config.d_time] * inputs.mask[..., None])


def build_link_token_matrix(
    graph: TemporalGraph,
    node: int,
    t0: float,
    config: GraphMixerConfig,
    encoder: TimeEncoder,
    rng: np.random.Generator | None = None,
) -> LinkTokenMatrix:
    """Token matrix of one node at time `t0` (all zeros for an isolated node)."""
    inputs = gather_link_inputs(graph, np.array([node]), np.array([t0], dtype=np.float64), config, rng)
    tokens, _ = assemble_tokens(inputs, encoder, config)
    return LinkTokenMatrix(tokens[0], int(inputs.real_counts[0]))
