"""Central finite-difference check of analytic gradients."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .params import ParamGroup

__all__ = ["GradCheckReport", "finite_difference_check"]


@dataclass
class GradCheckReport:
    """Worst relative error overall and per parameter group."""

    max_rel_error: float = 0.0
    per_group: dict[str, float] = field(default_factory=dict)
    worst_param: str = ""
    checked: int = 0

    def record(self, name: str, rel: float) -> None:
        """Fold one coordinate's error in."""
        group = name.split(".", 1)[0]
        self.per_group[group] = max(self.per_group.get(group, 0.0), rel)
        self.checked += 1
        if rel > self.max_rel_error or not self.worst_param:
            self.max_rel_error = max(self.max_rel_error, rel)
            self.worst_param = name


def relative_error(analytic: float, numeric: float) -> float:
    """|a - n| / max(|a|, |n|, 1e-8)."""
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


def finite_difference_check(
    loss_fn: Callable[[bool], float],
    params: ParamGroup,
    h: float = 1e-6,
    max_coords: int = 200,
    rng: np.random.Generator | None = None,
) -> GradCheckReport:
    """Compare analytic gradients against central differences.

    Args:
        loss_fn: Evaluates the loss; with True it must also accumulate gradients into `params`
        params: Parameters to perturb
        h: Step size
        max_coords: Coordinates sampled per tensor
        rng: Sampling generator (seed 0 when omitted)
    """
    rng = np.random.default_rng(0) if rng is None else rng
    params.zero_grad()
    loss_fn(True)
    analytic = {p.name: p.grad.copy() for p in params}
    params.zero_grad()

    report = GradCheckReport()
    for p in params:
        flat = p.value.reshape(-1)
        coords = np.arange(p.size) if p.size <= max_coords else rng.choice(p.size, size=max_coords, replace=False)
        flat_grad = analytic[p.name].reshape(-1)
        for i in coords:
            original = flat[i]
            flat[i] = original + h
            plus = loss_fn(False)
            flat[i] = original - h
            minus = loss_fn(False)
            flat[i] = original
            report.record(p.name, relative_error(float(flat_grad[i]), (plus - minus) / (2.0 * h)))
    params.zero_grad()
    return report
