"""Time encodings: the fixed cos(t * omega) and the trainable cos(t * w + b).

omega_i = alpha ** (-(i - 1) / beta) for i = 1..d, so omega_1 = 1 and the
frequencies decay geometrically. Inputs may be any finite real; the model feeds
relative times (t0 - t_j) or absolute times depending on its time mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np
import pandas as pd

from .constants import DEFAULT_ALPHA, DEFAULT_D_TIME
from .models import TimeEncodingError
from .tensor.params import ParamGroup, ParamTensor

__all__ = [
    "FixedTimeEncoding",
    "TimeEncoder",
    "TimeEncodingContext",
    "TrainableTimeEncoding",
    "dump_omega",
    "encode_fixed",
    "encode_trainable_backward",
    "encode_trainable_forward",
    "grad_norm_probe",
    "make_omega",
]


class TimeEncoder(Protocol):
    """What the model needs from an encoder."""

    d: int

    def forward(self, t: np.ndarray) -> tuple[np.ndarray, TimeEncodingContext | None]: ...

    def backward(self, ctx: TimeEncodingContext | None, g: np.ndarray) -> None: ...


@dataclass(frozen=True)
class FixedTimeEncoding:
    """Frozen encoder; omega is read-only and has no gradient."""

    d: int
    alpha: float
    beta: float
    omega: np.ndarray

    def encode(self, t: np.ndarray | float) -> np.ndarray:
        """cos(t * omega), shape ``t.shape + (d,)``."""
        return np.cos(np.asarray(t, dtype=np.float64)[..., None] * self.omega)

    def forward(self, t: np.ndarray) -> tuple[np.ndarray, None]:
        """Encode with no backward context."""
        return self.encode(t), None

    def backward(self, ctx: TimeEncodingContext | None, g: np.ndarray) -> None:
        """Nothing to learn."""

    @property
    def num_params(self) -> int:
        """Always 0."""
        return 0


def make_omega(d: int = DEFAULT_D_TIME, alpha: float = DEFAULT_ALPHA, beta: float | None = None) -> FixedTimeEncoding:
    """Build the fixed encoder; `beta` defaults to `alpha`.

    Raises:
        TimeEncodingError: d < 1, alpha <= 1 or beta <= 0
    """
    beta = alpha if beta is None else beta
    if d < 1:
        msg = f"time encoding dimension must be >= 1, got {d}"
        raise TimeEncodingError(msg)
    if not alpha > 1:
        msg = f"alpha must be > 1, got {alpha}"
        raise TimeEncodingError(msg)
    if not beta > 0:
        msg = f"beta must be > 0, got {beta}"
        raise TimeEncodingError(msg)
    omega = float(alpha) ** (-np.arange(d, dtype=np.float64) / float(beta))
    omega.setflags(write=False)
    return FixedTimeEncoding(d, float(alpha), float(beta), omega)


def encode_fixed(enc: FixedTimeEncoding, t: np.ndarray | float) -> np.ndarray:
    """Component i is cos(t * omega_i)."""
    return enc.encode(t)


@dataclass(frozen=True)
class TimeEncodingContext:
    """Saved forward state of the trainable encoder."""

    encoder: TrainableTimeEncoding
    t: np.ndarray
    phase: np.ndarray


class TrainableTimeEncoding:
    """cos(t * w + b) with w, b learnable (1 x d each), starting at w = omega, b = 0."""

    def __init__(self, params: ParamGroup, omega: np.ndarray, name: str = "time_encoder") -> None:
        self.d = len(omega)
        self.w: ParamTensor = params.add(f"{name}.w", np.array(omega, dtype=np.float64)[None, :])
        self.b: ParamTensor = params.add(f"{name}.b", np.zeros((1, self.d)))

    @classmethod
    def standalone(cls, omega: np.ndarray) -> tuple[TrainableTimeEncoding, ParamGroup]:
        """An encoder with its own parameter group."""
        params = ParamGroup()
        return cls(params, omega), params

    def forward(self, t: np.ndarray) -> tuple[np.ndarray, TimeEncodingContext]:
        """Encode and keep what backward needs."""
        t = np.asarray(t, dtype=np.float64)
        phase = t[..., None] * self.w.value[0] + self.b.value[0]
        return np.cos(phase), TimeEncodingContext(self, t, phase)

    def _param_grads(self, ctx: TimeEncodingContext, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        neg_sin = -np.sin(ctx.phase) * g
        gw = (neg_sin * ctx.t[..., None]).reshape(-1, self.d).sum(axis=0, keepdims=True)
        gb = neg_sin.reshape(-1, self.d).sum(axis=0, keepdims=True)
        return gw, gb

    def backward(self, ctx: TimeEncodingContext | None, g: np.ndarray) -> None:
        """Accumulate dL/dw = sum(g * -t sin(tw + b)) and dL/db = sum(g * -sin(tw + b)).

        Raises:
            TimeEncodingError: no forward context
        """
        if ctx is None or ctx.encoder is not self:
            msg = "trainable time encoding backward called without its forward context"
            raise TimeEncodingError(msg)
        gw, gb = self._param_grads(ctx, g)
        self.w.grad += gw
        self.b.grad += gb

    def grad_norm_probe(self, t: np.ndarray) -> float:
        """‖dL/dw‖ for the loss L = sum of all encoding components.

        The encoder's own gradient buffers are left untouched.
        """
        z, ctx = self.forward(t)
        gw, _ = self._param_grads(ctx, np.ones_like(z))
        return float(np.linalg.norm(gw))


def encode_trainable_forward(enc: TrainableTimeEncoding, t: np.ndarray) -> tuple[np.ndarray, TimeEncodingContext]:
    """Forward pass of the trainable encoder."""
    return enc.forward(t)


def encode_trainable_backward(ctx: TimeEncodingContext | None, g: np.ndarray) -> None:
    """Accumulate the encoder gradients saved in `ctx`.

    Raises:
        TimeEncodingError: no forward context
    """
    if ctx is None:
        msg = "trainable time encoding backward called before forward"
        raise TimeEncodingError(msg)
    ctx.encoder.backward(ctx, g)


def grad_norm_probe(enc: TrainableTimeEncoding, t: np.ndarray) -> float:
    """See `TrainableTimeEncoding.grad_norm_probe`."""
    return enc.grad_norm_probe(t)


def dump_omega(enc: FixedTimeEncoding, path: str | Path) -> None:
    """Write (index, omega) rows as CSV, index starting at 1."""
    frame = pd.DataFrame({"index": np.arange(1, enc.d + 1), "omega": enc.omega})
    frame.to_csv(path, index=False, float_format="%.17g")
