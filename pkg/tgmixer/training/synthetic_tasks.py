"""Small controlled experiments on time encodings and sequence encoders.

`synth_time_experiment` trains a linear classifier on [z(t1) | z(t2)] to decide
t1 > t2, with the encoder frozen or learnable. `synth_seq_experiments` checks
which link encoders tell a sequence from its token-duplicated copy when shown
the pair, and which ones can compare sequence lengths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from ..constants import DEFAULT_ALPHA, DEFAULT_D_TIME
from ..logging_setup import get_logger
from ..model.attention import AttentionEncoder
from ..model.mixer import MixerEncoder
from ..model.settings import AttentionScope, Pooling, TimeEncoderKind
from ..models import SeedStream
from ..rng import derive_rng
from ..tensor.adam import Adam
from ..tensor.layers import Linear
from ..tensor.params import ParamGroup, flatten_params
from ..time_encoding import TimeEncoder, TrainableTimeEncoding, make_omega
from .loss import bce_loss

__all__ = [
    "SeqEncoderKind",
    "SeqTask",
    "SynthSeqResult",
    "SynthTimeResult",
    "sample_time_pairs",
    "synth_seq_experiments",
    "synth_time_experiment",
]

log = get_logger("synthetic")

TIME_RANGE = 1e6
SEQ_D_TIME = 32
SEQ_K = 8
SEQ_TIME_RANGE = 1e3


@dataclass
class SynthTimeResult:
    """Per-step held-out accuracy and gradient norms (encoder norm is 0 when frozen)."""

    accuracy: list[float] = field(default_factory=list)
    encoder_grad_norm: list[float] = field(default_factory=list)
    classifier_grad_norm: list[float] = field(default_factory=list)
    snapshots: list[np.ndarray] = field(default_factory=list)


def sample_time_pairs(rng: np.random.Generator, size: int, t_max: float = TIME_RANGE) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t1, t2, label t1 > t2) with t1 != t2, uniform on [0, t_max]."""
    t1 = rng.uniform(0.0, t_max, size)
    t2 = rng.uniform(0.0, t_max, size)
    while (tie := t1 == t2).any():
        t2[tie] = rng.uniform(0.0, t_max, int(tie.sum()))
    return t1, t2, (t1 > t2).astype(np.float64)


def _time_logits(encoder: TimeEncoder, classifier: Linear, t1: np.ndarray, t2: np.ndarray) -> tuple[np.ndarray, tuple]:
    z1, ctx1 = encoder.forward(t1)
    z2, ctx2 = encoder.forward(t2)
    logits, cache = classifier.forward(np.concatenate([z1, z2], axis=1))
    return logits[:, 0], (ctx1, ctx2, cache)


def synth_time_experiment(  # noqa: PLR0913
    mode: TimeEncoderKind | str,
    steps: int = 300,
    seed: int = 0,
    batch_size: int = 64,
    held_out: int = 1024,
    lr: float = 0.01,
    d: int = DEFAULT_D_TIME,
    alpha: float = DEFAULT_ALPHA,
) -> SynthTimeResult:
    """Learn t1 > t2 from time encodings, one fresh mini-batch per step."""
    mode = TimeEncoderKind(mode)
    rng = derive_rng(seed, SeedStream.SYNTHETIC, 0)
    params = ParamGroup()
    fixed = make_omega(d, alpha)
    encoder: TimeEncoder = TrainableTimeEncoding(params, fixed.omega) if mode is TimeEncoderKind.TRAINABLE else fixed
    classifier = Linear(params, "classifier", 2 * d, 1, rng)
    optimizer = Adam(params, lr=lr, weight_decay=0.0)
    eval_t1, eval_t2, eval_labels = sample_time_pairs(rng, held_out)

    result = SynthTimeResult()
    for step in range(steps):
        t1, t2, labels = sample_time_pairs(rng, batch_size)
        logits, (ctx1, ctx2, cache) = _time_logits(encoder, classifier, t1, t2)
        _, g = bce_loss(logits, labels)
        g_z = classifier.backward(cache, g[:, None])
        encoder.backward(ctx1, g_z[:, :d])
        encoder.backward(ctx2, g_z[:, d:])

        classifier_norm = float(np.sqrt(sum(np.sum(p.grad**2) for p in params if p.name.startswith("classifier"))))
        encoder_norm = float(np.linalg.norm(encoder.w.grad)) if isinstance(encoder, TrainableTimeEncoding) else 0.0
        optimizer.step()

        held_logits, _ = _time_logits(encoder, classifier, eval_t1, eval_t2)
        result.accuracy.append(float(np.mean((held_logits > 0) == (eval_labels > 0))))
        result.encoder_grad_norm.append(encoder_norm)
        result.classifier_grad_norm.append(classifier_norm)
        result.snapshots.append(flatten_params(params))
        log.debug("time %s step %d accuracy %.4f encoder grad %.3g", mode, step, result.accuracy[-1], encoder_norm)
    log.info("time %s: final held-out accuracy %.4f", mode, result.accuracy[-1] if steps else float("nan"))
    return result


class SeqEncoderKind(StrEnum):
    """Sequence encoder under study."""

    MIXER = "mixer"
    ATTN_MEAN = "attn_mean"
    ATTN_SUM = "attn_sum"


class SeqTask(StrEnum):
    """identity: is the second sequence a token-duplicated copy of the first. length: which of two sequences is longer."""

    IDENTITY = "identity"
    LENGTH = "length"


@dataclass
class SynthSeqResult:
    """Accuracy over the training pool after each step.

    `duplicate_gap` is the largest encoder output difference between a sequence
    [a1, .., am] and its copy [a1, a1, .., am, am] over the pool at the end
    (identity task only, else 0).
    """

    accuracy: list[float] = field(default_factory=list)
    duplicate_gap: float = 0.0


def _make_encoder(kind: SeqEncoderKind, params: ParamGroup, rng: np.random.Generator) -> MixerEncoder | AttentionEncoder:
    if kind is SeqEncoderKind.MIXER:
        return MixerEncoder(params, SEQ_K, SEQ_D_TIME, max(1, SEQ_K // 2), 4 * SEQ_D_TIME, rng)
    pooling = Pooling.MEAN if kind is SeqEncoderKind.ATTN_MEAN else Pooling.SUM
    return AttentionEncoder(params, SEQ_D_TIME, SEQ_D_TIME, AttentionScope.FULL, pooling, rng)


def _sequences(times: np.ndarray, lengths: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Encode rows of `times`, keeping the first `lengths[n]` and zeroing the rest."""
    mask = np.arange(SEQ_K)[None, :] < lengths[:, None]
    tokens = make_omega(SEQ_D_TIME).encode(times) * mask[..., None]
    return tokens, mask


def _identity_pool(rng: np.random.Generator, size: int) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
    # each base sequence is paired once with itself (label 0) and once with its duplicated copy (label 1)
    half = SEQ_K // 2
    lengths = rng.integers(1, half + 1, size)
    times = rng.uniform(0.0, SEQ_TIME_RANGE, (size, half))
    base = _sequences(np.pad(times, ((0, 0), (0, SEQ_K - half))), lengths)
    doubled = _sequences(np.repeat(times, 2, axis=1), 2 * lengths)
    left = (np.concatenate([base[0], base[0]]), np.concatenate([base[1], base[1]]))
    right = (np.concatenate([base[0], doubled[0]]), np.concatenate([base[1], doubled[1]]))
    return [left, right], np.concatenate([np.zeros(size), np.ones(size)])


def _length_pool(rng: np.random.Generator, size: int) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
    first = rng.integers(1, SEQ_K + 1, size)
    second = rng.integers(1, SEQ_K, size)
    second = second + (second >= first)
    left = _sequences(rng.uniform(0.0, SEQ_TIME_RANGE, (size, SEQ_K)), first)
    right = _sequences(rng.uniform(0.0, SEQ_TIME_RANGE, (size, SEQ_K)), second)
    return [left, right], (first > second).astype(np.float64)


def synth_seq_experiments(  # noqa: PLR0913
    encoder: SeqEncoderKind | str,
    task: SeqTask | str,
    steps: int = 500,
    seed: int = 0,
    pool: int = 512,
    batch_size: int = 64,
    lr: float = 0.01,
) -> SynthSeqResult:
    """Train encoder plus linear classifier on mini-batches drawn from a fixed pool.

    Both tasks classify pairs: the two sequences are encoded by the same encoder and
    the classifier sees both encodings side by side. The identity pool holds `pool`
    base sequences of 1 to K/2 tokens, each paired with itself and with its
    duplicated copy, so an encoder blind to duplication scores exactly 0.5.
    """
    kind, task = SeqEncoderKind(encoder), SeqTask(task)
    rng = derive_rng(seed, SeedStream.SYNTHETIC, 1)
    params = ParamGroup()
    seq_encoder = _make_encoder(kind, params, rng)
    inputs, labels = _identity_pool(rng, pool) if task is SeqTask.IDENTITY else _length_pool(rng, pool)
    classifier = Linear(params, "classifier", len(inputs) * seq_encoder.out_dim, 1, rng)
    optimizer = Adam(params, lr=lr, weight_decay=0.0)

    def forward(rows: np.ndarray | slice) -> tuple[np.ndarray, list, np.ndarray]:
        encoded = [seq_encoder.forward(tokens[rows], mask[rows]) for tokens, mask in inputs]
        logits, cache = classifier.forward(np.concatenate([out for out, _ in encoded], axis=1))
        return logits[:, 0], [c for _, c in encoded], cache

    result = SynthSeqResult()
    width = seq_encoder.out_dim
    for step in range(steps):
        rows = rng.choice(len(labels), size=min(batch_size, len(labels)), replace=False)
        logits, caches, cache = forward(rows)
        _, g = bce_loss(logits, labels[rows])
        g_h = classifier.backward(cache, g[:, None])
        for n, enc_cache in enumerate(caches):
            seq_encoder.backward(enc_cache, g_h[:, n * width : (n + 1) * width])
        optimizer.step()

        pool_logits, _, _ = forward(slice(None))
        result.accuracy.append(float(np.mean((pool_logits > 0) == (labels > 0))))
        log.debug("seq %s/%s step %d accuracy %.4f", kind, task, step, result.accuracy[-1])

    if task is SeqTask.IDENTITY:
        # right-hand inputs: the base sequences, then their duplicated copies
        tokens, mask = inputs[1]
        out, _ = seq_encoder.forward(tokens, mask)
        result.duplicate_gap = float(np.max(np.abs(out[:pool] - out[pool:])))
    log.info("seq %s/%s: final accuracy %.4f", kind, task, result.accuracy[-1] if steps else float("nan"))
    return result
