"""Two-layer link classifier on [h_src | h_dst]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..models import ShapeError
from ..tensor.layers import Linear
from ..tensor.ops import gelu_backward, gelu_forward
from ..tensor.params import ParamGroup

__all__ = ["LinkClassifier", "link_classify"]


@dataclass
class _ClassifierCache:
    hidden_in: np.ndarray
    hidden_pre: np.ndarray
    out_in: np.ndarray


class LinkClassifier:
    """Linear(2 * dim_h -> d_hidden), GELU, Linear(d_hidden -> 1). Not symmetric in (src, dst)."""

    def __init__(self, params: ParamGroup, dim_h: int, d_hidden: int, rng: np.random.Generator, name: str = "classifier") -> None:
        self.dim_h = dim_h
        self.hidden = Linear(params, f"{name}.hidden", 2 * dim_h, d_hidden, rng)
        self.out = Linear(params, f"{name}.out", d_hidden, 1, rng)

    def forward(self, h_src: np.ndarray, h_dst: np.ndarray) -> tuple[np.ndarray, _ClassifierCache]:
        """Logits, one per row."""
        if h_src.shape != h_dst.shape or h_src.shape[-1] != self.dim_h:
            msg = f"classifier expects two (..., {self.dim_h}) inputs, got {h_src.shape} and {h_dst.shape}"
            raise ShapeError(msg)
        pre, hidden_in = self.hidden.forward(np.concatenate([h_src, h_dst], axis=-1))
        logits, out_in = self.out.forward(gelu_forward(pre))
        return logits[..., 0], _ClassifierCache(hidden_in, pre, out_in)

    def backward(self, cache: _ClassifierCache, g_logits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Gradients for (h_src, h_dst)."""
        g_act = self.out.backward(cache.out_in, g_logits[..., None])
        g_in = self.hidden.backward(cache.hidden_in, gelu_backward(cache.hidden_pre, g_act))
        return g_in[..., : self.dim_h], g_in[..., self.dim_h :]


def link_classify(h_src: np.ndarray, h_dst: np.ndarray, classifier: LinkClassifier) -> float:
    """Logit p_ij for a single pair."""
    logits, _ = classifier.forward(h_src[None], h_dst[None])
    return float(logits[0])
