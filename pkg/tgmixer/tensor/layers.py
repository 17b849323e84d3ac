"""Layers owning their parameters.

Forward passes return their cache instead of storing it, so several forwards can
share one set of parameters.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..constants import LAYER_NORM_EPS
from ..models import ShapeError
from .ops import layer_norm_backward, layer_norm_forward
from .params import ParamGroup, ParamTensor

__all__ = ["LayerNorm", "Linear", "uniform_init"]


def uniform_init(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    """Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


class Linear:
    """y = x @ W + b over the last axis, W stored fan_in x fan_out, b as 1 x fan_out."""

    def __init__(self, params: ParamGroup, name: str, fan_in: int, fan_out: int, rng: np.random.Generator) -> None:
        self.fan_in = fan_in
        self.fan_out = fan_out
        self.weight: ParamTensor = params.add(f"{name}.weight", uniform_init(rng, fan_in, fan_out))
        self.bias: ParamTensor = params.add(f"{name}.bias", np.zeros((1, fan_out)))

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Apply the layer; the cache is the input itself."""
        if x.shape[-1] != self.fan_in:
            msg = f"{self.weight.name}: expected {self.fan_in} input channels, got {x.shape[-1]}"
            raise ShapeError(msg)
        return x @ self.weight.value + self.bias.value, x

    def backward(self, cache: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Accumulate parameter grads and return the input gradient."""
        flat_x = cache.reshape(-1, self.fan_in)
        flat_g = g.reshape(-1, self.fan_out)
        self.weight.grad += flat_x.T @ flat_g
        self.bias.grad += flat_g.sum(axis=0, keepdims=True)
        return g @ self.weight.value.T


class LayerNorm:
    """Last-axis layer normalization with learnable affine (gamma=1, beta=0 at init)."""

    def __init__(self, params: ParamGroup, name: str, channels: int, eps: float = LAYER_NORM_EPS) -> None:
        self.eps = eps
        self.gamma: ParamTensor = params.add(f"{name}.gamma", np.ones((1, channels)))
        self.beta: ParamTensor = params.add(f"{name}.beta", np.zeros((1, channels)))

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, Any]:
        """Normalize; returns (output, cache)."""
        return layer_norm_forward(x, self.gamma.value, self.beta.value, self.eps)

    def backward(self, cache: Any, g: np.ndarray) -> np.ndarray:  # noqa: ANN401
        """Accumulate affine grads and return the input gradient."""
        gx, g_gamma, g_beta = layer_norm_backward(cache, self.gamma.value, g)
        self.gamma.grad += g_gamma
        self.beta.grad += g_beta
        return gx
