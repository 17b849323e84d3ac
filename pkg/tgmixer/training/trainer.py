"""Training loop with best-validation model selection."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from ..constants import DEFAULT_BATCH_SIZE, DEFAULT_LR, DEFAULT_WEIGHT_DECAY, MICRO_BATCH, RECALL_K
from ..graph.index import TemporalGraph
from ..graph.splits import SplitBoundaries
from ..logging_setup import get_logger
from ..model.graphmixer import GraphMixer
from ..models import DivergenceError, SeedStream, Split
from ..rng import derive_rng
from ..tensor.adam import Adam
from ..tensor.params import flatten_params
from .batches import Batch, make_batches
from .evaluation import MetricsReport, evaluate_split
from .loss import bce_loss

__all__ = ["EpochRecord", "TrainResult", "TrainSettings", "history_rows", "train", "train_step"]

log = get_logger("trainer")

HISTORY_COLUMNS = ("epoch", "split", "ap", "auc", "recall_at_k", "mrr", "loss", "gap")


@dataclass(frozen=True)
class TrainSettings:
    """Optimization and bookkeeping options of one run."""

    epochs: int = 20
    batch_size: int = DEFAULT_BATCH_SIZE
    lr: float = DEFAULT_LR
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    seed: int = 0
    micro_batch: int = MICRO_BATCH
    negatives_all_nodes: bool = False
    record_trajectory: bool = False
    recall_k: int = RECALL_K


@dataclass(frozen=True)
class EpochRecord:
    """Metrics after one epoch; `gap` is |train AP - val AP|."""

    epoch: int
    batch_loss: float
    train: MetricsReport
    val: MetricsReport
    test: MetricsReport

    @property
    def gap(self) -> float:
        """Generalization gap."""
        return abs(self.train.average_precision - self.val.average_precision)


@dataclass
class TrainResult:
    """History, the selected epoch and its test report."""

    history: list[EpochRecord]
    best_epoch: int
    best_val_ap: float
    test: MetricsReport | None = None
    snapshots: list[np.ndarray] = field(default_factory=list)


def train_step(model: GraphMixer, graph: TemporalGraph, batch: Batch, optimizer: Adam, micro_batch: int, rng: np.random.Generator) -> float:
    """One optimizer step over `batch`, accumulating micro-batch gradients in order.

    Raises:
        DivergenceError: non-finite loss
    """
    total = len(batch)
    loss = 0.0
    for start in range(0, total, micro_batch):
        part = slice(start, start + micro_batch)
        logits, cache = model.forward_batch(graph, batch.src[part], batch.dst[part], batch.t0[part], rng)
        part_loss, g = bce_loss(logits, batch.labels[part])
        weight = len(logits) / total
        loss += part_loss * weight
        model.backward(cache, g * weight)
    if not np.isfinite(loss):
        model.params.zero_grad()
        msg = f"training loss became {loss}"
        raise DivergenceError(msg)
    optimizer.step()
    return loss


async def train(
    model: GraphMixer,
    graph: TemporalGraph,
    bounds: SplitBoundaries,
    settings: TrainSettings,
    on_epoch: Callable[[EpochRecord], None] | None = None,
) -> TrainResult:
    """Train for `settings.epochs` epochs and keep the parameters with the best validation AP.

    The selected parameters are restored into `model` and evaluated on the test
    split with ranking metrics.
    """
    optimizer = Adam(model.params, lr=settings.lr, weight_decay=settings.weight_decay)
    train_span = bounds.range_of(Split.TRAIN)
    result = TrainResult([], best_epoch=0, best_val_ap=-1.0)
    best = model.params.snapshot()
    if settings.record_trajectory:
        result.snapshots.append(flatten_params(model.params))

    for epoch in range(1, settings.epochs + 1):
        batches = make_batches(
            graph.events,
            train_span,
            settings.batch_size,
            derive_rng(settings.seed, SeedStream.BATCHES, epoch),
            settings.negatives_all_nodes,
        )
        sampling = derive_rng(settings.seed, SeedStream.NEIGHBORS, len(Split), epoch)
        losses = []
        for number, batch in enumerate(batches):
            losses.append(train_step(model, graph, batch, optimizer, settings.micro_batch, sampling))
            log.debug("epoch %d batch %d loss %.6f", epoch, number, losses[-1])

        reports = [await evaluate_split(model, graph, bounds.range_of(split), settings.seed, split) for split in Split]
        record = EpochRecord(epoch, float(np.mean(losses)), *reports)
        result.history.append(record)
        log.info(
            "epoch %d: loss %.4f train AP %.4f val AP %.4f test AP %.4f gap %.4f",
            epoch,
            record.batch_loss,
            record.train.average_precision,
            record.val.average_precision,
            record.test.average_precision,
            record.gap,
        )
        if record.val.average_precision > result.best_val_ap:
            result.best_epoch = epoch
            result.best_val_ap = record.val.average_precision
            best = model.params.snapshot()
        if settings.record_trajectory:
            result.snapshots.append(flatten_params(model.params))
        if on_epoch is not None:
            on_epoch(record)

    model.params.restore(best)
    result.test = await evaluate_split(
        model, graph, bounds.range_of(Split.TEST), settings.seed, Split.TEST, with_ranking=True, k=settings.recall_k
    )
    log.info("selected epoch %d, %s", result.best_epoch, result.test.summary())
    return result


def _row(epoch: int, report: MetricsReport, gap: float | None) -> dict[str, object]:
    return {
        "epoch": epoch,
        "split": report.split,
        "ap": report.average_precision,
        "auc": report.auc,
        "recall_at_k": report.recall_at_k,
        "mrr": report.mrr,
        "loss": report.loss,
        "gap": gap,
    }


def history_rows(result: TrainResult) -> list[dict[str, object]]:
    """CSV rows: one per (epoch, split), then the selected model's test report tagged ``selected_test``."""
    rows = []
    for record in result.history:
        rows.extend(_row(record.epoch, report, record.gap) for report in (record.train, record.val, record.test))
    if result.test is not None:
        rows.append(_row(result.best_epoch, result.test, None) | {"split": "selected_test"})
    return rows
