"""Mean-pool node encoder: s_i = x_i + mean of x_j over links in [t0 - T, t0).

The mean runs over the multiset of window links, so a partner seen twice
counts twice. In one-hot mode the sum is never materialized: each node owns an
embedding row, and the projection of the sparse s_i is a weighted sum of rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph.features import NodeFeatureMode, NodeFeatures
from ..graph.index import TemporalGraph
from ..tensor.layers import Linear, uniform_init
from ..tensor.params import ParamGroup, ParamTensor

__all__ = ["NodeEncoder", "NodeSummary", "node_encode", "summarize_nodes"]


@dataclass(frozen=True)
class NodeSummary:
    """Sparse s_i for a batch: weight `weights[n]` on node `indices[n]` of root `segments[n]`."""

    segments: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    batch: int

    def dense(self, features: NodeFeatures) -> np.ndarray:
        """B x d_node matrix of s_i (one-hot features become num_nodes wide)."""
        if features.matrix is None:
            out = np.zeros((self.batch, features.num_nodes))
            np.add.at(out, (self.segments, self.indices), self.weights)
            return out
        out = np.zeros((self.batch, features.d_node))
        np.add.at(out, self.segments, self.weights[:, None] * features.matrix[self.indices])
        return out


def summarize_nodes(graph: TemporalGraph, nodes: np.ndarray, t0s: np.ndarray, window: float) -> NodeSummary:
    """Root plus mean of window partners, for every (node, t0)."""
    segments, indices, weights = [], [], []
    for row, (node, t0) in enumerate(zip(nodes, t0s, strict=True)):
        partners = graph.windowed_neighbors(int(node), float(t0), window)
        segments.append(np.full(len(partners) + 1, row))
        indices.append(np.concatenate([[int(node)], partners]))
        weights.append(np.concatenate([[1.0], np.full(len(partners), 1.0 / max(len(partners), 1))]))
    if not segments:
        return NodeSummary(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0), 0)
    return NodeSummary(
        np.concatenate(segments).astype(np.int64),
        np.concatenate(indices).astype(np.int64),
        np.concatenate(weights),
        len(nodes),
    )


class NodeEncoder:
    """Projects s_i to d_hidden: a Linear on dense features, an embedding table for one-hot."""

    def __init__(self, params: ParamGroup, features: NodeFeatures, d_hidden: int, rng: np.random.Generator, name: str = "node") -> None:
        self.features = features
        self.d_hidden = d_hidden
        self.proj: Linear | None = None
        self.embedding: ParamTensor | None = None
        self.bias: ParamTensor | None = None
        if features.mode is NodeFeatureMode.DENSE:
            self.proj = Linear(params, f"{name}.proj", features.d_node, d_hidden, rng)
        else:
            self.embedding = params.add(f"{name}.embedding", uniform_init(rng, features.num_nodes, d_hidden))
            self.bias = params.add(f"{name}.bias", np.zeros((1, d_hidden)))

    def forward(self, summary: NodeSummary) -> tuple[np.ndarray, np.ndarray | None]:
        """B x d_hidden projections of s_i."""
        if self.proj is not None:
            return self.proj.forward(summary.dense(self.features))
        assert self.embedding is not None and self.bias is not None
        out = np.zeros((summary.batch, self.d_hidden))
        np.add.at(out, summary.segments, summary.weights[:, None] * self.embedding.value[summary.indices])
        return out + self.bias.value, None

    def backward(self, summary: NodeSummary, cache: np.ndarray | None, g: np.ndarray) -> None:
        """Accumulate parameter grads (node features are inputs, nothing flows further)."""
        if self.proj is not None:
            self.proj.backward(cache, g)  # type: ignore[arg-type]
            return
        assert self.embedding is not None and self.bias is not None
        np.add.at(self.embedding.grad, summary.indices, summary.weights[:, None] * g[summary.segments])
        self.bias.grad += g.sum(axis=0, keepdims=True)


def node_encode(graph: TemporalGraph, node: int, t0: float, window: float, features: NodeFeatures) -> np.ndarray:
    """s_i(t0) as a dense vector (length num_nodes in one-hot mode, for inspection only)."""
    summary = summarize_nodes(graph, np.array([node]), np.array([t0], dtype=np.float64), window)
    return summary.dense(features)[0]
