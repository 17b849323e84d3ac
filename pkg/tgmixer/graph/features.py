"""Node features: a dense matrix or implicit one-hot identities."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np

from ..models import DatasetError

__all__ = ["NodeFeatureMode", "NodeFeatures", "load_node_features"]


class NodeFeatureMode(StrEnum):
    """How node features are represented."""

    DENSE = "dense"
    ONE_HOT = "one_hot"


@dataclass(frozen=True)
class NodeFeatures:
    """Node feature store. One-hot mode never materializes the identity matrix."""

    mode: NodeFeatureMode
    num_nodes: int
    matrix: np.ndarray | None = None

    @classmethod
    def one_hot(cls, num_nodes: int) -> NodeFeatures:
        """Identity features for `num_nodes` nodes."""
        return cls(NodeFeatureMode.ONE_HOT, num_nodes)

    @classmethod
    def dense(cls, matrix: np.ndarray) -> NodeFeatures:
        """Dense features, one row per node.

        Raises:
            DatasetError: non-finite entries or not a matrix
        """
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:  # noqa: PLR2004
            msg = f"node features must be a matrix, got shape {matrix.shape}"
            raise DatasetError(msg)
        if not np.all(np.isfinite(matrix)):
            msg = "node features contain non-finite entries"
            raise DatasetError(msg)
        return cls(NodeFeatureMode.DENSE, matrix.shape[0], matrix)

    @property
    def d_node(self) -> int:
        """Feature width (num_nodes for one-hot)."""
        return self.num_nodes if self.matrix is None else int(self.matrix.shape[1])


def load_node_features(path: str | Path | None, num_nodes: int) -> NodeFeatures:
    """Load a ``.npy`` node feature matrix, or one-hot features when `path` is None.

    Raises:
        DatasetError: unreadable file, row count mismatch, non-finite entries
    """
    if not path:
        return NodeFeatures.one_hot(num_nodes)
    try:
        matrix = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as e:
        msg = f"cannot read node features {path}: {e}"
        raise DatasetError(msg) from e
    features = NodeFeatures.dense(matrix)
    if features.num_nodes != num_nodes:
        msg = f"node features have {features.num_nodes} rows, graph has {num_nodes} nodes"
        raise DatasetError(msg)
    return features
