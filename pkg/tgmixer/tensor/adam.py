"""Adam with coupled L2 weight decay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..constants import ADAM_EPS, DEFAULT_LR, DEFAULT_WEIGHT_DECAY
from .params import ParamGroup

__all__ = ["Adam", "AdamState"]


@dataclass
class AdamState:
    """First/second moment buffers keyed by parameter name."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0


class Adam:
    """Classic Adam: the decay term is added to the gradient before the moments.

    Gradients are zeroed after every step.
    """

    def __init__(  # noqa: PLR0913
        self,
        params: ParamGroup,
        lr: float = DEFAULT_LR,
        weight_decay: float = DEFAULT_WEIGHT_DECAY,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = ADAM_EPS,
    ) -> None:
        self.params = params
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    def step(self) -> None:
        """Apply one bias-corrected update to every parameter."""
        self.state.step += 1
        bc1 = 1.0 - self.beta1**self.state.step
        bc2 = 1.0 - self.beta2**self.state.step

        for p in self.params:
            g = p.grad + self.weight_decay * p.value if self.weight_decay else p.grad
            if p.name not in self.state.m:
                self.state.m[p.name] = np.zeros_like(p.value)
                self.state.v[p.name] = np.zeros_like(p.value)
            m = self.state.m[p.name]
            v = self.state.v[p.name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p.value -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            p.zero_grad()
