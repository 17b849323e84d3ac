"""Parameter trajectories and loss surfaces around trained parameters."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..graph.index import TemporalGraph
from ..logging_setup import get_logger
from ..model.graphmixer import GraphMixer
from ..models import SeedStream, ShapeError
from ..rng import derive_rng
from ..tensor.gradcheck import GradCheckReport, finite_difference_check
from ..tensor.params import ParamGroup
from .evaluation import training_loss
from .loss import bce_loss

__all__ = [
    "LandscapeGrid",
    "TrajectoryRecord",
    "filter_normalized_direction",
    "landscape_coefficients",
    "loss_landscape",
    "model_gradcheck",
    "parameter_trajectory",
]

log = get_logger("instrumentation")


@dataclass(frozen=True)
class TrajectoryRecord:
    """Distance ratio r and angle theta of snapshot `step` relative to the first snapshot."""

    step: int
    r: float
    theta: float


def parameter_trajectory(snapshots: Sequence[np.ndarray], final: np.ndarray) -> list[TrajectoryRecord]:
    """r_t = |d_t| / |d_0| and theta_t = angle(d_t, d_0) with d_t = w_t - final.

    A zero d_t or d_0 gives (0, 0).
    """
    if not snapshots:
        return []
    final = np.asarray(final, dtype=np.float64)
    origin = np.asarray(snapshots[0], dtype=np.float64) - final
    origin_norm = float(np.linalg.norm(origin))
    records = []
    for step, snapshot in enumerate(snapshots):
        delta = np.asarray(snapshot, dtype=np.float64) - final
        if delta.shape != origin.shape:
            msg = f"snapshot {step} has shape {delta.shape}, expected {origin.shape}"
            raise ShapeError(msg)
        norm = float(np.linalg.norm(delta))
        if norm == 0.0 or origin_norm == 0.0:
            records.append(TrajectoryRecord(step, 0.0, 0.0))
            continue
        cosine = float(np.dot(delta, origin)) / (norm * origin_norm)
        records.append(TrajectoryRecord(step, norm / origin_norm, float(np.arccos(np.clip(cosine, -1.0, 1.0)))))
    return records


@dataclass(frozen=True)
class LandscapeGrid:
    """losses[i, j] is the loss at coefficients (xs[i], ys[j])."""

    xs: np.ndarray
    ys: np.ndarray
    losses: np.ndarray

    def rows(self) -> list[dict[str, float]]:
        """(x, y, loss) rows in grid order."""
        return [
            {"x": float(x), "y": float(y), "loss": float(self.losses[i, j])}
            for i, x in enumerate(self.xs)
            for j, y in enumerate(self.ys)
        ]


def filter_normalized_direction(params: ParamGroup, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Gaussian direction rescaled so each tensor's slice has that tensor's norm."""
    direction = {}
    for p in params:
        d = rng.standard_normal(p.shape)
        d_norm = np.linalg.norm(d)
        direction[p.name] = d * (np.linalg.norm(p.value) / d_norm) if d_norm > 0 else d
    return direction


def landscape_coefficients(n: int, span: float) -> np.ndarray:
    """n evenly spaced values over [-span, span]; the middle one is exactly 0 for odd n."""
    if n < 1:
        msg = f"landscape needs n >= 1, got {n}"
        raise ShapeError(msg)
    if n == 1:
        return np.zeros(1)
    i = np.arange(n)
    return span * (2 * i - (n - 1)) / (n - 1)


def loss_landscape(  # noqa: PLR0913
    model: GraphMixer,
    graph: TemporalGraph,
    split_range: range,
    n: int = 25,
    span: float = 1.0,
    seed: int = 0,
    directions: tuple[dict[str, np.ndarray], dict[str, np.ndarray]] | None = None,
) -> LandscapeGrid:
    """Training loss at w* + x d1 + y d2 over an n x n grid.

    The model's parameters are restored afterwards.
    """
    if directions is None:
        rng = derive_rng(seed, SeedStream.LANDSCAPE)
        directions = (filter_normalized_direction(model.params, rng), filter_normalized_direction(model.params, rng))
    d1, d2 = directions
    base = model.params.snapshot()
    coefficients = landscape_coefficients(n, span)
    losses = np.empty((n, n))
    try:
        for i, x in enumerate(coefficients):
            for j, y in enumerate(coefficients):
                for p in model.params:
                    p.value[...] = base[p.name] + x * d1[p.name] + y * d2[p.name]
                losses[i, j] = training_loss(model, graph, split_range, seed)
            log.debug("landscape row %d/%d done", i + 1, n)
    finally:
        model.params.restore(base)
    return LandscapeGrid(coefficients, coefficients.copy(), losses)


def model_gradcheck(  # noqa: PLR0913
    model: GraphMixer,
    graph: TemporalGraph,
    src: np.ndarray,
    dst: np.ndarray,
    t0: np.ndarray,
    labels: np.ndarray,
    seed: int = 0,
    h: float = 1e-6,
    max_coords: int = 200,
) -> GradCheckReport:
    """Finite-difference check of the full model's BCE gradient on one batch."""

    def loss_fn(with_grad: bool) -> float:
        logits, cache = model.forward_batch(graph, src, dst, t0, derive_rng(seed, SeedStream.NEIGHBORS))
        loss, g = bce_loss(logits, labels)
        if with_grad:
            model.backward(cache, g)
        return loss

    report = finite_difference_check(loss_fn, model.params, h=h, max_coords=max_coords, rng=derive_rng(seed, SeedStream.INIT, 1))
    log.info("gradient check: max relative error %.3g (%s)", report.max_rel_error, report.worst_param)
    return report
