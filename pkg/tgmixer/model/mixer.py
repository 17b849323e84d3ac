"""One-layer MLP-Mixer link encoder.

For a K x C token matrix H::

    H_token   = H + W_tok2 . gelu(W_tok1 . LN1(H))          (mixes across rows)
    H_channel = H_token + gelu(LN2(H_token) . W_ch1) . W_ch2  (mixes across columns)
    out       = mean over all K rows of H_channel

Zero pad rows take part in both normalizations and in the final mean.
Token mixing runs as a Linear over the transposed matrix, so the stored token
weights are the transposes of W_tok1 (r_tok x K) and W_tok2 (K x r_tok).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..models import ShapeError
from ..tensor.layers import LayerNorm, Linear
from ..tensor.ops import gelu_backward, gelu_forward, mean_rows_backward, mean_rows_forward
from ..tensor.params import ParamGroup
from .tokens import LinkTokenMatrix

__all__ = ["MixerEncoder", "mixer_encode"]


@dataclass
class _MixerCache:
    ln1: Any
    token1: np.ndarray
    token_pre: np.ndarray
    token2: np.ndarray
    ln2: Any
    channel1: np.ndarray
    channel_pre: np.ndarray
    channel2: np.ndarray


class MixerEncoder:
    """Token and channel MLPs over a K x C matrix, output width C."""

    def __init__(  # noqa: PLR0913
        self,
        params: ParamGroup,
        k: int,
        channels: int,
        token_hidden: int,
        channel_hidden: int,
        rng: np.random.Generator,
        name: str = "mixer",
    ) -> None:
        self.k = k
        self.channels = channels
        self.out_dim = channels
        self.ln_token = LayerNorm(params, f"{name}.ln_token", channels)
        self.token1 = Linear(params, f"{name}.token1", k, token_hidden, rng)
        self.token2 = Linear(params, f"{name}.token2", token_hidden, k, rng)
        self.ln_channel = LayerNorm(params, f"{name}.ln_channel", channels)
        self.channel1 = Linear(params, f"{name}.channel1", channels, channel_hidden, rng)
        self.channel2 = Linear(params, f"{name}.channel2", channel_hidden, channels, rng)

    def forward(self, tokens: np.ndarray, mask: np.ndarray | None = None) -> tuple[np.ndarray, _MixerCache]:  # noqa: ARG002
        """Encode B x K x C tokens into B x C; `mask` is unused (pads are real zero rows)."""
        if tokens.shape[-2:] != (self.k, self.channels):
            msg = f"mixer expects (..., {self.k}, {self.channels}) tokens, got {tokens.shape}"
            raise ShapeError(msg)
        u, ln1 = self.ln_token.forward(tokens)
        a, token1 = self.token1.forward(np.swapaxes(u, -1, -2))
        m, token2 = self.token2.forward(gelu_forward(a))
        h_token = tokens + np.swapaxes(m, -1, -2)

        v, ln2 = self.ln_channel.forward(h_token)
        p, channel1 = self.channel1.forward(v)
        r, channel2 = self.channel2.forward(gelu_forward(p))
        h_channel = h_token + r
        return mean_rows_forward(h_channel), _MixerCache(ln1, token1, a, token2, ln2, channel1, p, channel2)

    def backward(self, cache: _MixerCache, g: np.ndarray) -> np.ndarray:
        """Accumulate parameter grads; return the token gradient (B x K x C)."""
        g_channel = mean_rows_backward(g, self.k)

        g_p = gelu_backward(cache.channel_pre, self.channel2.backward(cache.channel2, g_channel))
        g_token = g_channel + self.ln_channel.backward(cache.ln2, self.channel1.backward(cache.channel1, g_p))

        g_a = gelu_backward(cache.token_pre, self.token2.backward(cache.token2, np.swapaxes(g_token, -1, -2)))
        g_u = np.swapaxes(self.token1.backward(cache.token1, g_a), -1, -2)
        return g_token + self.ln_token.backward(cache.ln1, g_u)


def mixer_encode(tokens: LinkTokenMatrix, encoder: MixerEncoder) -> np.ndarray:
    """Encode one token matrix into a length-C vector."""
    out, _ = encoder.forward(tokens.tokens[None])
    return out[0]
