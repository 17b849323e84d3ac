"""Model configuration and its mode enums."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import StrEnum

from ..constants import DEFAULT_ALPHA, DEFAULT_D_HIDDEN, DEFAULT_D_TIME, DEFAULT_K
from ..graph.features import NodeFeatureMode
from ..models import ConfigError

__all__ = [
    "AttentionScope",
    "GraphMixerConfig",
    "LinkEncoderKind",
    "NeighborMode",
    "Pooling",
    "TimeEncoderKind",
    "TimeMode",
    "Variant",
]


class TimeMode(StrEnum):
    """What goes into the time columns of a token row."""

    RELATIVE_ENCODED = "relative_encoded"
    RELATIVE_RAW = "relative_raw"
    ABSOLUTE_RAW = "absolute_raw"
    ABSOLUTE_ENCODED = "absolute_encoded"

    @property
    def relative(self) -> bool:
        """True when rows carry t0 - t_j rather than t_j."""
        return self in (TimeMode.RELATIVE_ENCODED, TimeMode.RELATIVE_RAW)

    @property
    def encoded(self) -> bool:
        """True when the time value goes through the time encoder."""
        return self in (TimeMode.RELATIVE_ENCODED, TimeMode.ABSOLUTE_ENCODED)


class NeighborMode(StrEnum):
    """How the link encoder picks its K links."""

    RECENT_1HOP = "recent_1hop"
    UNIFORM_1HOP = "uniform_1hop"
    RECENT_2HOP = "recent_2hop"
    UNIFORM_2HOP = "uniform_2hop"

    @property
    def sampled(self) -> bool:
        """True for the modes that consume randomness."""
        return self in (NeighborMode.UNIFORM_1HOP, NeighborMode.UNIFORM_2HOP)


class Variant(StrEnum):
    """Which encoders feed the classifier."""

    FULL = "full"
    LINK_ONLY = "link_only"
    NODE_ONLY = "node_only"


class LinkEncoderKind(StrEnum):
    """Link encoder architecture."""

    MIXER = "mixer"
    ATTENTION = "attention"


class AttentionScope(StrEnum):
    """Self-attention over all tokens, or a learned root query over the neighbors."""

    FULL = "full"
    ONE_HOP = "one_hop"


class Pooling(StrEnum):
    """Row pooling after attention."""

    SUM = "sum"
    MEAN = "mean"


class TimeEncoderKind(StrEnum):
    """Frozen or learnable time encoding."""

    FIXED = "fixed"
    TRAINABLE = "trainable"


@dataclass(frozen=True)
class GraphMixerConfig:
    """Everything that shapes the model.

    `window` is the node-encoder duration T. Hidden widths left as None follow
    r_tok = max(1, K // 2) and r_ch = 4 * C.
    """

    k: int = DEFAULT_K
    window: float = 1.0
    d_time: int = DEFAULT_D_TIME
    d_hidden: int = DEFAULT_D_HIDDEN
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_ALPHA
    time_mode: TimeMode = TimeMode.RELATIVE_ENCODED
    neighbor_mode: NeighborMode = NeighborMode.RECENT_1HOP
    undirected: bool = True
    node_feature_mode: NodeFeatureMode = NodeFeatureMode.ONE_HOT
    variant: Variant = Variant.FULL
    link_encoder: LinkEncoderKind = LinkEncoderKind.MIXER
    attention_scope: AttentionScope = AttentionScope.FULL
    attention_pooling: Pooling = Pooling.MEAN
    time_encoder: TimeEncoderKind = TimeEncoderKind.FIXED
    token_hidden: int | None = None
    channel_hidden: int | None = None

    def __post_init__(self) -> None:
        for name, kind in (
            ("time_mode", TimeMode),
            ("neighbor_mode", NeighborMode),
            ("node_feature_mode", NodeFeatureMode),
            ("variant", Variant),
            ("link_encoder", LinkEncoderKind),
            ("attention_scope", AttentionScope),
            ("attention_pooling", Pooling),
            ("time_encoder", TimeEncoderKind),
        ):
            value = getattr(self, name)
            try:
                object.__setattr__(self, name, kind(value))
            except ValueError:
                choices = ", ".join(m.value for m in kind)
                raise ConfigError([f"{name}: invalid value {value!r}, expected one of {choices}"]) from None
        errors = []
        if self.k < 1:
            errors.append(f"k must be >= 1, got {self.k}")
        if not self.window > 0:
            errors.append(f"window must be > 0, got {self.window}")
        if self.d_time < 1 or self.d_hidden < 1:
            errors.append(f"d_time and d_hidden must be >= 1, got {self.d_time}, {self.d_hidden}")
        if errors:
            raise ConfigError(errors)

    @property
    def token_width(self) -> int:
        """Token-mixing hidden width r_tok."""
        return self.token_hidden or max(1, self.k // 2)

    def channel_width(self, channels: int) -> int:
        """Channel-mixing hidden width r_ch for `channels` input channels."""
        return self.channel_hidden or 4 * channels

    def replace(self, **changes: object) -> GraphMixerConfig:
        """Copy with some fields changed."""
        return dataclasses.replace(self, **changes)  # type: ignore[arg-type]

    def as_header(self) -> dict[str, str]:
        """Field values as strings, for checkpoint manifests."""
        return {f.name: str(getattr(self, f.name)) for f in dataclasses.fields(self)}
