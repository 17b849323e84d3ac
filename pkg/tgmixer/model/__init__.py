"""GraphMixer: token matrices, link and node encoders, classifier."""

from .attention import AttentionEncoder, attention_encode
from .classifier import LinkClassifier, link_classify
from .graphmixer import BatchCache, GraphMixer, forward_pair
from .mixer import MixerEncoder, mixer_encode
from .node_encoder import NodeEncoder, NodeSummary, node_encode, summarize_nodes
from .settings import (
    AttentionScope,
    GraphMixerConfig,
    LinkEncoderKind,
    NeighborMode,
    Pooling,
    TimeEncoderKind,
    TimeMode,
    Variant,
)
from .tokens import LinkInputs, LinkTokenMatrix, assemble_tokens, build_link_token_matrix, gather_link_inputs, select_links

__all__ = [
    "AttentionEncoder",
    "AttentionScope",
    "BatchCache",
    "GraphMixer",
    "GraphMixerConfig",
    "LinkClassifier",
    "LinkEncoderKind",
    "LinkInputs",
    "LinkTokenMatrix",
    "MixerEncoder",
    "NeighborMode",
    "NodeEncoder",
    "NodeSummary",
    "Pooling",
    "TimeEncoderKind",
    "TimeMode",
    "Variant",
    "assemble_tokens",
    "attention_encode",
    "build_link_token_matrix",
    "forward_pair",
    "gather_link_inputs",
    "link_classify",
    "mixer_encode",
    "node_encode",
    "select_links",
    "summarize_nodes",
]
