"""Ranking metrics."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from ..constants import RECALL_K
from ..models import ShapeError

__all__ = ["auc", "average_precision", "rank_metrics", "ranks_of"]


def _pair(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape or scores.ndim != 1:
        msg = f"scores {scores.shape} and labels {labels.shape} must be equal-length vectors"
        raise ShapeError(msg)
    return scores, labels


def average_precision(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mean precision at each positive's rank; ties keep input order. 0.0 without positives."""
    scores, labels = _pair(scores, labels)
    order = np.argsort(-scores, kind="stable")
    hits = labels[order]
    if not hits.any():
        return 0.0
    precision = np.cumsum(hits) / np.arange(1, len(hits) + 1)
    return float(precision[hits].mean())


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of (positive, negative) pairs ordered correctly, ties counting 1/2.

    0.5 when either class is empty.
    """
    scores, labels = _pair(scores, labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if not n_pos or not n_neg:
        return 0.5
    ranks = rankdata(scores)
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def ranks_of(positive: np.ndarray, negatives: np.ndarray) -> np.ndarray:
    """1-based rank of each positive among its row of negatives; ties count against the positive."""
    positive = np.asarray(positive, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64)
    if negatives.ndim != 2 or negatives.shape[0] != len(positive):  # noqa: PLR2004
        msg = f"negatives {negatives.shape} must have one row per positive ({len(positive)})"
        raise ShapeError(msg)
    return 1 + (negatives >= positive[:, None]).sum(axis=1)


def rank_metrics(positive: np.ndarray, negatives: np.ndarray, k: int = RECALL_K) -> tuple[float, float]:
    """(Recall@k, MRR)."""
    ranks = ranks_of(positive, negatives)
    if not len(ranks):
        return 0.0, 0.0
    return float(np.mean(ranks <= k)), float(np.mean(1.0 / ranks))
