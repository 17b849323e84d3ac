"""Run configuration schema: every key a run file or command-line flag may set."""

from .constants import (
    DEFAULT_ALPHA,
    DEFAULT_BATCH_SIZE,
    DEFAULT_D_HIDDEN,
    DEFAULT_D_TIME,
    DEFAULT_K,
    DEFAULT_LR,
    DEFAULT_WEIGHT_DECAY,
    RECALL_K,
)
from .graph.features import NodeFeatureMode
from .model.settings import AttentionScope, LinkEncoderKind, NeighborMode, Pooling, TimeEncoderKind, TimeMode, Variant
from .training.synthetic_tasks import SeqEncoderKind, SeqTask
from .validation import ConfigField, ConfigItems

__all__ = ["ABLATION_AXES", "RUN_CONFIG_SCHEMA"]


def _values(kind: type) -> list[str]:
    return [m.value for m in kind]  # type: ignore[attr-defined]


def _non_negative_list(value: list) -> list[str]:
    bad = [v for v in value if isinstance(v, bool) or not isinstance(v, int) or v < 0]
    return [f"seeds must be non-negative integers, got {bad}"] if bad else []


ABLATION_AXES = ["time_mode", "neighbor_mode", "undirected", "variant", "link_encoder", "time_encoder"]

RUN_CONFIG_SCHEMA = ConfigItems(
    # inputs
    ConfigField("dataset", str, default="", description="Event CSV (JODIE layout); empty uses the bundled synthetic generator"),
    ConfigField("has_header", bool, default=True, description="The dataset's first line is a header"),
    ConfigField("node_features", str, default="", description="Optional .npy node feature matrix"),
    ConfigField("out", str, default="runs", description="Output directory for artifacts and the run manifest"),
    ConfigField("checkpoint", str, default="", description="Checkpoint prefix for evaluate/landscape (default: <out>/model)"),
    # randomness and optimization
    ConfigField("seed", int, default=0, min_value=0, description="Root seed; every generator derives from it"),
    ConfigField("seeds", list, default=[], validator=_non_negative_list, description="Seeds for multi-seed ablations"),
    ConfigField("epochs", int, default=20, min_value=1, description="Training epochs"),
    ConfigField("batch_size", int, default=DEFAULT_BATCH_SIZE, min_value=1, description="Positive pairs per batch"),
    ConfigField("lr", float, default=DEFAULT_LR, min_value=0, description="Adam learning rate"),
    ConfigField("weight_decay", float, default=DEFAULT_WEIGHT_DECAY, min_value=0, description="L2 weight decay"),
    ConfigField("negatives_all_nodes", bool, default=False, description="Draw negatives from every node, not just destinations"),
    ConfigField("recall_k", int, default=RECALL_K, min_value=1, description="k of Recall@k"),
    # model
    ConfigField("k", int, default=DEFAULT_K, min_value=1, description="Link tokens per node (K)"),
    ConfigField("window", float, default=0.0, min_value=0, description="Node-encoder window T; 0 derives it from the training split"),
    ConfigField("d_time", int, default=DEFAULT_D_TIME, min_value=1, description="Time encoding width"),
    ConfigField("d_hidden", int, default=DEFAULT_D_HIDDEN, min_value=1, description="Hidden width"),
    ConfigField("alpha", float, default=DEFAULT_ALPHA, min_value=1, exclusive_min=True, description="Time encoding frequency base"),
    ConfigField("beta", float, default=DEFAULT_ALPHA, min_value=0, exclusive_min=True, description="Time encoding frequency scale"),
    ConfigField("time_mode", str, default=TimeMode.RELATIVE_ENCODED.value, choices=_values(TimeMode), description="Time columns of link tokens"),
    ConfigField(
        "neighbor_mode", str, default=NeighborMode.RECENT_1HOP.value, choices=_values(NeighborMode), description="Link selection"
    ),
    ConfigField("undirected", bool, default=True, description="Index each event under both endpoints"),
    ConfigField("node_feature_mode", str, default="", choices=["", *_values(NodeFeatureMode)], description="Empty follows node_features"),
    ConfigField("variant", str, default=Variant.FULL.value, choices=_values(Variant), description="Encoders feeding the classifier"),
    ConfigField("encoder", str, default=LinkEncoderKind.MIXER.value, choices=_values(LinkEncoderKind), description="Link encoder"),
    ConfigField("attention_scope", str, default=AttentionScope.FULL.value, choices=_values(AttentionScope), description="Attention scope"),
    ConfigField("attention_pooling", str, default=Pooling.MEAN.value, choices=_values(Pooling), description="Attention pooling"),
    ConfigField("time_encoder", str, default=TimeEncoderKind.FIXED.value, choices=_values(TimeEncoderKind), description="Time encoder"),
    ConfigField("token_hidden", int, default=0, min_value=0, description="Token-mixing width; 0 means max(1, K // 2)"),
    ConfigField("channel_hidden", int, default=0, min_value=0, description="Channel-mixing width; 0 means 4 * C"),
    # commands
    ConfigField("axis", str, default="", choices=["", *ABLATION_AXES], description="Default ablation axis"),
    ConfigField("steps", int, default=0, min_value=0, description="Synthetic experiment steps; 0 uses each experiment's default"),
    ConfigField("synth_mode", str, default="both", choices=["both", *_values(TimeEncoderKind)], description="synth_time modes"),
    ConfigField("seq_encoder", str, default="all", choices=["all", *_values(SeqEncoderKind)], description="synth_seq encoders"),
    ConfigField("seq_task", str, default="all", choices=["all", *_values(SeqTask)], description="synth_seq tasks"),
    ConfigField("landscape_n", int, default=25, min_value=1, description="Landscape grid size"),
    ConfigField("landscape_span", float, default=1.0, min_value=0, exclusive_min=True, description="Landscape coefficient range"),
    ConfigField("record_trajectory", bool, default=False, description="Keep per-epoch parameter snapshots while training"),
    # bundled generator
    ConfigField("synth_users", int, default=1500, min_value=1, description="Generator: users"),
    ConfigField("synth_items", int, default=500, min_value=1, description="Generator: items"),
    ConfigField("synth_events", int, default=50_000, min_value=10, description="Generator: events"),
    ConfigField("synth_noise", float, default=0.2, min_value=0, description="Generator: fraction of random events"),
)
