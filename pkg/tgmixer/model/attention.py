"""Single-head self-attention link encoders used in place of the mixer.

`full` scope: scaled dot-product attention among the real tokens, then sum or
mean over the real rows. `one_hop` scope: one learned root query attends over the
real tokens; the pooling flag is a no-op there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..tensor.layers import Linear, uniform_init
from ..tensor.ops import softmax_rows_backward, softmax_rows_forward
from ..tensor.params import ParamGroup, ParamTensor
from .settings import AttentionScope, Pooling
from .tokens import LinkTokenMatrix

__all__ = ["AttentionEncoder", "attention_encode"]


@dataclass
class _AttentionCache:
    mask: np.ndarray
    q: np.ndarray
    q_in: np.ndarray | None
    k: np.ndarray
    k_in: np.ndarray
    v: np.ndarray
    v_in: np.ndarray
    attn: np.ndarray


class AttentionEncoder:
    """Attention over the real rows of B x K x C tokens, output width `d_attn`."""

    def __init__(  # noqa: PLR0913
        self,
        params: ParamGroup,
        channels: int,
        d_attn: int,
        scope: AttentionScope,
        pooling: Pooling,
        rng: np.random.Generator,
        name: str = "attention",
    ) -> None:
        self.scope = AttentionScope(scope)
        self.pooling = Pooling(pooling)
        self.out_dim = d_attn
        self.scale = 1.0 / np.sqrt(d_attn)
        self.query = Linear(params, f"{name}.query", channels, d_attn, rng) if self.scope is AttentionScope.FULL else None
        self.root_query: ParamTensor | None = (
            params.add(f"{name}.root_query", uniform_init(rng, d_attn, 1).T) if self.scope is AttentionScope.ONE_HOP else None
        )
        self.key = Linear(params, f"{name}.key", channels, d_attn, rng)
        self.value = Linear(params, f"{name}.value", channels, d_attn, rng)

    def forward(self, tokens: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, _AttentionCache]:
        """Encode tokens (B x K x C) with row mask (B x K) into B x d_attn."""
        k, k_in = self.key.forward(tokens)
        v, v_in = self.value.forward(tokens)
        if self.query is not None:
            q, q_in = self.query.forward(tokens)
            scores = (q @ np.swapaxes(k, -1, -2)) * self.scale
            attn = softmax_rows_forward(scores, mask[:, None, :])
            rows = (attn @ v) * mask[..., None]
            out = rows.sum(axis=1)
            if self.pooling is Pooling.MEAN:
                out = out / np.maximum(mask.sum(axis=1), 1)[:, None]
        else:
            assert self.root_query is not None
            q, q_in = self.root_query.value, None
            scores = (k @ q[0]) * self.scale
            attn = softmax_rows_forward(scores, mask)
            out = (attn[..., None] * v).sum(axis=1)
        return out, _AttentionCache(mask, q, q_in, k, k_in, v, v_in, attn)

    def backward(self, cache: _AttentionCache, g: np.ndarray) -> np.ndarray:
        """Accumulate parameter grads; return the token gradient."""
        mask = cache.mask
        if self.query is not None:
            if self.pooling is Pooling.MEAN:
                g = g / np.maximum(mask.sum(axis=1), 1)[:, None]
            g_rows = g[:, None, :] * mask[..., None]
            g_attn = g_rows @ np.swapaxes(cache.v, -1, -2)
            g_v = np.swapaxes(cache.attn, -1, -2) @ g_rows
            g_scores = softmax_rows_backward(cache.attn, g_attn) * self.scale
            g_q = g_scores @ cache.k
            g_k = np.swapaxes(g_scores, -1, -2) @ cache.q
            g_tokens = self.query.backward(cache.q_in, g_q)  # type: ignore[arg-type]
        else:
            assert self.root_query is not None
            g_attn = (cache.v * g[:, None, :]).sum(axis=-1)
            g_v = cache.attn[..., None] * g[:, None, :]
            g_scores = softmax_rows_backward(cache.attn, g_attn) * self.scale
            g_k = g_scores[..., None] * cache.q[0]
            self.root_query.grad += (g_scores[..., None] * cache.k).sum(axis=(0, 1))[None, :]
            g_tokens = np.zeros_like(cache.k_in)
        g_tokens = g_tokens + self.key.backward(cache.k_in, g_k)
        return g_tokens + self.value.backward(cache.v_in, g_v)


def attention_encode(tokens: LinkTokenMatrix, encoder: AttentionEncoder) -> np.ndarray:
    """Encode one token matrix; a matrix with no real rows gives the zero vector."""
    mask = (np.arange(tokens.tokens.shape[0]) < tokens.real_count)[None, :]
    out, _ = encoder.forward(tokens.tokens[None], mask)
    return out[0]
