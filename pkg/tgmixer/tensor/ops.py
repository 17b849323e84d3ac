"""Dense kernels with hand-written backward passes.

Every kernel accepts a leading batch of matrices (``... x rows x cols``);
backward functions return gradients with the shapes of the forward inputs.
"""

import numpy as np
from scipy.special import ndtr

from ..constants import LAYER_NORM_EPS
from ..models import ShapeError

__all__ = [
    "gelu_backward",
    "gelu_forward",
    "layer_norm_backward",
    "layer_norm_forward",
    "matmul_backward",
    "matmul_forward",
    "mean_rows_backward",
    "mean_rows_forward",
    "softmax_rows_backward",
    "softmax_rows_forward",
    "sum_to_shape",
]

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def sum_to_shape(x: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce a broadcast gradient back to `shape`."""
    while x.ndim > len(shape):
        x = x.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and x.shape[axis] != 1:
            x = x.sum(axis=axis, keepdims=True)
    return x


def matmul_forward(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """C = A @ B.

    Raises:
        ShapeError: inner dimensions differ
    """
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:  # noqa: PLR2004
        msg = f"matmul shape mismatch: {a.shape} @ {b.shape}"
        raise ShapeError(msg)
    return a @ b


def matmul_backward(a: np.ndarray, b: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(gA, gB) = (gC @ Bᵀ, Aᵀ @ gC), reduced over broadcast batch axes."""
    ga = g @ np.swapaxes(b, -1, -2)
    gb = np.swapaxes(a, -1, -2) @ g
    return sum_to_shape(ga, a.shape), sum_to_shape(gb, b.shape)


def gelu_forward(x: np.ndarray) -> np.ndarray:
    """Exact GELU, x * Phi(x)."""
    return x * ndtr(x)


def gelu_backward(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Upstream `g` times Phi(x) + x * phi(x)."""
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return g * (ndtr(x) + x * pdf)


def layer_norm_forward(
    x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float = LAYER_NORM_EPS
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    """Normalize the last axis then apply gamma * x_hat + beta.

    Returns:
        Output and the cache (x_hat, inverse std) for the backward pass

    Raises:
        ShapeError: fewer than 2 channels, or affine width mismatch
    """
    channels = x.shape[-1]
    if channels < 2:  # noqa: PLR2004
        msg = f"layer norm needs >= 2 channels, got {channels}"
        raise ShapeError(msg)
    if gamma.shape[-1] != channels or beta.shape[-1] != channels:
        msg = f"layer norm affine width {gamma.shape[-1]} != {channels}"
        raise ShapeError(msg)
    mean = x.mean(axis=-1, keepdims=True)
    centered = x - mean
    inv_std = 1.0 / np.sqrt((centered * centered).mean(axis=-1, keepdims=True) + eps)
    x_hat = centered * inv_std
    return gamma * x_hat + beta, (x_hat, inv_std)


def layer_norm_backward(
    cache: tuple[np.ndarray, np.ndarray], gamma: np.ndarray, g: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (gx, g_gamma, g_beta); the affine grads are reduced to gamma's shape."""
    x_hat, inv_std = cache
    channels = x_hat.shape[-1]
    g_hat = g * gamma
    gx = (inv_std / channels) * (
        channels * g_hat - g_hat.sum(axis=-1, keepdims=True) - x_hat * (g_hat * x_hat).sum(axis=-1, keepdims=True)
    )
    return gx, sum_to_shape(g * x_hat, gamma.shape), sum_to_shape(g, gamma.shape)


def mean_rows_forward(x: np.ndarray) -> np.ndarray:
    """Column means over the row axis, zero rows included."""
    return x.mean(axis=-2)


def mean_rows_backward(g: np.ndarray, rows: int) -> np.ndarray:
    """Spread `g` evenly over `rows` rows."""
    return np.repeat(g[..., None, :] / rows, rows, axis=-2)


def softmax_rows_forward(x: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    """Stable softmax over the last axis.

    Masked-out entries get probability 0; a fully masked row is all zeros.
    """
    if mask is not None:
        x = np.where(mask, x, -np.inf)
    top = x.max(axis=-1, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    e = np.exp(x - top)
    total = e.sum(axis=-1, keepdims=True)
    return np.divide(e, total, out=np.zeros_like(e), where=total > 0)


def softmax_rows_backward(y: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Jacobian-vector product y * (g - <g, y>)."""
    return y * (g - (g * y).sum(axis=-1, keepdims=True))
