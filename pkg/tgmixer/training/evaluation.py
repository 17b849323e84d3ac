"""Split evaluation: 1:1 AP/AUC, 100-negative ranking, and the shared training loss.

Scoring fans out in fixed chunks through worker threads; chunk boundaries and
their generators are fixed before fan-out, so results do not depend on the
thread count.
"""

from __future__ import annotations

import asyncio
from dataclasses import dataclass

import numpy as np

from ..constants import MICRO_BATCH, RANK_NEGATIVES, RECALL_K, THREADS
from ..graph.index import TemporalGraph
from ..logging_setup import get_logger
from ..model.graphmixer import GraphMixer
from ..models import SeedStream, Split
from ..rng import derive_rng
from .batches import sample_negative_dst
from .loss import bce_loss
from .metrics import auc, average_precision, rank_metrics

__all__ = ["MetricsReport", "evaluate_split", "evaluation_pairs", "rank_eval", "score_pairs", "training_loss"]

log = get_logger("evaluation")

# pairs handed to one worker thread
EVAL_CHUNK = 4 * MICRO_BATCH


@dataclass(frozen=True)
class MetricsReport:
    """Metrics of one split; ranking fields are None when ranking was skipped."""

    split: str
    average_precision: float
    auc: float
    loss: float
    recall_at_k: float | None = None
    mrr: float | None = None
    k: int = RECALL_K

    def summary(self) -> str:
        """One-line text form."""
        text = f"{self.split}: AP {self.average_precision:.4f} AUC {self.auc:.4f} loss {self.loss:.4f}"
        if self.mrr is not None:
            text += f" Recall@{self.k} {self.recall_at_k:.4f} MRR {self.mrr:.4f}"
        return text


def _split_code(split: Split | str) -> int:
    return list(Split).index(Split(split))


def evaluation_pairs(graph: TemporalGraph, span: range, seed: int, split: Split | str) -> tuple[np.ndarray, ...]:
    """(src, dst, t0, labels): the positives of `span` then one fixed negative each."""
    events = graph.events
    idx = np.arange(span.start, span.stop)
    src, dst, t0 = events.src[idx], events.dst[idx], events.ts[idx]
    negatives = sample_negative_dst(dst, events.dst_lo, events.dst_hi, derive_rng(seed, SeedStream.EVAL_NEGATIVES, _split_code(split)))
    return (
        np.concatenate([src, src]),
        np.concatenate([dst, negatives]),
        np.concatenate([t0, t0]),
        np.concatenate([np.ones(len(idx)), np.zeros(len(idx))]),
    )


async def score_pairs(
    model: GraphMixer,
    graph: TemporalGraph,
    src: np.ndarray,
    dst: np.ndarray,
    t0: np.ndarray,
    rng: np.random.Generator,
    threads: int = THREADS,
) -> np.ndarray:
    """Logits for every pair, computed in worker threads and joined in input order."""
    starts = list(range(0, len(src), EVAL_CHUNK))
    if not starts:
        return np.empty(0)
    streams = rng.spawn(len(starts))
    gate = asyncio.Semaphore(max(1, threads))

    async def run(start: int, stream: np.random.Generator) -> np.ndarray:
        stop = start + EVAL_CHUNK
        async with gate:
            return await asyncio.to_thread(model.score, graph, src[start:stop], dst[start:stop], t0[start:stop], stream)

    parts = await asyncio.gather(*(run(start, stream) for start, stream in zip(starts, streams, strict=True)))
    return np.concatenate(parts)


async def rank_eval(
    model: GraphMixer,
    graph: TemporalGraph,
    span: range,
    num_neg: int = RANK_NEGATIVES,
    k: int = RECALL_K,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Score every positive of `span` against `num_neg` sampled destinations.

    Returns:
        (Recall@k, MRR) with ties ranked against the positive
    """
    rng = np.random.default_rng(0) if rng is None else rng
    events = graph.events
    idx = np.arange(span.start, span.stop)
    if not len(idx):
        return 0.0, 0.0
    dst = events.dst[idx]
    negatives = sample_negative_dst(np.repeat(dst, num_neg), events.dst_lo, events.dst_hi, rng).reshape(len(idx), num_neg)
    candidates = np.concatenate([dst[:, None], negatives], axis=1)
    width = num_neg + 1
    logits = await score_pairs(
        model,
        graph,
        np.repeat(events.src[idx], width),
        candidates.reshape(-1),
        np.repeat(events.ts[idx], width),
        rng,
    )
    logits = logits.reshape(len(idx), width)
    return rank_metrics(logits[:, 0], logits[:, 1:], k)


async def evaluate_split(  # noqa: PLR0913
    model: GraphMixer,
    graph: TemporalGraph,
    span: range,
    seed: int,
    split: Split | str = Split.VAL,
    with_ranking: bool = False,
    k: int = RECALL_K,
) -> MetricsReport:
    """AP, AUC and loss on `span` with the split's fixed negatives, plus ranking metrics on request."""
    src, dst, t0, labels = evaluation_pairs(graph, span, seed, split)
    logits = await score_pairs(model, graph, src, dst, t0, derive_rng(seed, SeedStream.NEIGHBORS, _split_code(split)))
    loss, _ = bce_loss(logits, labels)
    recall = mrr = None
    if with_ranking:
        recall, mrr = await rank_eval(model, graph, span, k=k, rng=derive_rng(seed, SeedStream.RANK_NEGATIVES, _split_code(split)))
    report = MetricsReport(str(Split(split)), average_precision(logits, labels), auc(logits, labels), loss, recall, mrr, k)
    log.debug("%s", report.summary())
    return report


def training_loss(model: GraphMixer, graph: TemporalGraph, span: range, seed: int) -> float:
    """Mean BCE over `span` with the training split's fixed negatives, computed in this thread."""
    src, dst, t0, labels = evaluation_pairs(graph, span, seed, Split.TRAIN)
    logits = model.score(graph, src, dst, t0, derive_rng(seed, SeedStream.NEIGHBORS, _split_code(Split.TRAIN)))
    loss, _ = bce_loss(logits, labels)
    return loss
