"""Batches, loss, metrics, training, evaluation and the instrumentation runs."""

from .batches import Batch, make_batches, sample_negative_dst
from .evaluation import MetricsReport, evaluate_split, rank_eval, training_loss
from .instrumentation import LandscapeGrid, TrajectoryRecord, loss_landscape, model_gradcheck, parameter_trajectory
from .loss import bce_loss
from .metrics import auc, average_precision, rank_metrics
from .synthetic_tasks import SeqEncoderKind, SeqTask, SynthSeqResult, SynthTimeResult, synth_seq_experiments, synth_time_experiment
from .trainer import EpochRecord, TrainResult, TrainSettings, history_rows, train

__all__ = [
    "Batch",
    "EpochRecord",
    "LandscapeGrid",
    "MetricsReport",
    "SeqEncoderKind",
    "SeqTask",
    "SynthSeqResult",
    "SynthTimeResult",
    "TrainResult",
    "TrainSettings",
    "TrajectoryRecord",
    "auc",
    "average_precision",
    "bce_loss",
    "evaluate_split",
    "history_rows",
    "loss_landscape",
    "make_batches",
    "model_gradcheck",
    "parameter_trajectory",
    "rank_eval",
    "rank_metrics",
    "sample_negative_dst",
    "synth_seq_experiments",
    "synth_time_experiment",
    "train",
]
