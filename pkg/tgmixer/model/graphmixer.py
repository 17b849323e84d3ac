"""The assembled model: link encoder, node encoder and classifier over one parameter group."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..constants import MICRO_BATCH
from ..graph.features import NodeFeatures
from ..graph.index import TemporalGraph
from ..logging_setup import get_logger
from ..models import SeedStream, ShapeError
from ..rng import derive_rng
from ..tensor.layers import Linear
from ..tensor.params import ParamGroup
from ..time_encoding import FixedTimeEncoding, TimeEncoder, TimeEncodingContext, TrainableTimeEncoding, make_omega
from .attention import AttentionEncoder
from .classifier import LinkClassifier
from .mixer import MixerEncoder
from .node_encoder import NodeEncoder, NodeSummary, summarize_nodes
from .settings import GraphMixerConfig, LinkEncoderKind, TimeEncoderKind, Variant
from .tokens import LinkInputs, assemble_tokens, gather_link_inputs, time_grad_to_encoder

__all__ = ["GraphMixer", "forward_pair"]


@dataclass
class _LinkCache:
    inputs: LinkInputs
    time_ctx: TimeEncodingContext | None
    encoder: Any
    proj: np.ndarray


@dataclass
class _NodeCache:
    summary: NodeSummary
    proj: np.ndarray | None


@dataclass
class BatchCache:
    """Everything `GraphMixer.backward` needs from one `forward_batch`."""

    inverse: np.ndarray
    unique_count: int
    link: _LinkCache | None
    node: _NodeCache | None
    classifier: Any


class GraphMixer:
    """GraphMixer with the variant, encoder and time-encoding choices of `config`.

    Parameter names start with the component: ``time_encoder``, ``mixer`` or
    ``attention``, ``link_proj``, ``node``, ``classifier``.

    Args:
        config: Model configuration
        d_link: Link feature width of the graph
        node_features: Node features (one-hot when None)
        num_nodes: Needed when `node_features` is None
        seed: Root seed; initialization draws from its INIT stream
    """

    def __init__(
        self,
        config: GraphMixerConfig,
        d_link: int,
        node_features: NodeFeatures | None = None,
        num_nodes: int | None = None,
        seed: int = 0,
    ) -> None:
        if node_features is None:
            if num_nodes is None:
                msg = "GraphMixer needs node_features or num_nodes"
                raise ShapeError(msg)
            node_features = NodeFeatures.one_hot(num_nodes)
        self.config = config
        self.d_link = d_link
        self.node_features = node_features
        self.params = ParamGroup()
        self.log = get_logger("model")
        rng = derive_rng(seed, SeedStream.INIT)

        self.fixed_time: FixedTimeEncoding = make_omega(config.d_time, config.alpha, config.beta)
        self.time_encoder: TimeEncoder = self.fixed_time
        self.link_encoder: MixerEncoder | AttentionEncoder | None = None
        self.link_proj: Linear | None = None
        self.node_encoder: NodeEncoder | None = None

        channels = config.d_time + d_link
        if config.variant is not Variant.NODE_ONLY:
            if config.time_encoder is TimeEncoderKind.TRAINABLE:
                self.time_encoder = TrainableTimeEncoding(self.params, self.fixed_time.omega)
            if config.link_encoder is LinkEncoderKind.MIXER:
                self.link_encoder = MixerEncoder(
                    self.params, config.k, channels, config.token_width, config.channel_width(channels), rng
                )
            else:
                self.link_encoder = AttentionEncoder(
                    self.params, channels, channels, config.attention_scope, config.attention_pooling, rng
                )
            self.link_proj = Linear(self.params, "link_proj", self.link_encoder.out_dim, config.d_hidden, rng)
        if config.variant is not Variant.LINK_ONLY:
            self.node_encoder = NodeEncoder(self.params, node_features, config.d_hidden, rng)

        self.dim_h = config.d_hidden * (2 if config.variant is Variant.FULL else 1)
        self.classifier = LinkClassifier(self.params, self.dim_h, config.d_hidden, rng)
        self.log.debug("built %s model with %d parameters", config.variant, self.params.size)

    def forward_batch(
        self,
        graph: TemporalGraph,
        src: np.ndarray,
        dst: np.ndarray,
        t0: np.ndarray,
        rng: np.random.Generator | None = None,
    ) -> tuple[np.ndarray, BatchCache]:
        """Logits for every (src[n], dst[n], t0[n]).

        Each distinct (node, t0) is encoded once; `rng` drives sampled neighbor
        modes in sorted (node, t0) order.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        t0 = np.asarray(t0, dtype=np.float64)
        if not src.shape == dst.shape == t0.shape or src.ndim != 1:
            msg = f"src, dst and t0 must be equal-length vectors, got {src.shape}, {dst.shape}, {t0.shape}"
            raise ShapeError(msg)
        n = len(src)
        roots = np.stack([np.concatenate([src, dst]).astype(np.float64), np.concatenate([t0, t0])], axis=1)
        keys, inverse = np.unique(roots, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        nodes, times = keys[:, 0].astype(np.int64), keys[:, 1]

        parts = []
        node_cache = None
        if self.node_encoder is not None:
            summary = summarize_nodes(graph, nodes, times, self.config.window)
            s, proj = self.node_encoder.forward(summary)
            parts.append(s)
            node_cache = _NodeCache(summary, proj)
        link_cache = None
        if self.link_encoder is not None and self.link_proj is not None:
            inputs = gather_link_inputs(graph, nodes, times, self.config, rng)
            tokens, time_ctx = assemble_tokens(inputs, self.time_encoder, self.config)
            encoded, enc_cache = self.link_encoder.forward(tokens, inputs.mask)
            t, proj_in = self.link_proj.forward(encoded)
            parts.append(t)
            link_cache = _LinkCache(inputs, time_ctx, enc_cache, proj_in)

        h = np.concatenate(parts, axis=1)[inverse]
        logits, cls_cache = self.classifier.forward(h[:n], h[n:])
        return logits, BatchCache(inverse, len(keys), link_cache, node_cache, cls_cache)

    def backward(self, cache: BatchCache, g_logits: np.ndarray) -> None:
        """Accumulate gradients of sum(g_logits * logits) into `params`."""
        g_src, g_dst = self.classifier.backward(cache.classifier, g_logits)
        g_h = np.zeros((cache.unique_count, self.dim_h))
        np.add.at(g_h, cache.inverse, np.concatenate([g_src, g_dst]))

        offset = 0
        if self.node_encoder is not None and cache.node is not None:
            width = self.config.d_hidden
            self.node_encoder.backward(cache.node.summary, cache.node.proj, g_h[:, :width])
            offset = width
        if self.link_encoder is not None and self.link_proj is not None and cache.link is not None:
            g_encoded = self.link_proj.backward(cache.link.proj, g_h[:, offset:])
            g_tokens = self.link_encoder.backward(cache.link.encoder, g_encoded)
            time_grad_to_encoder(g_tokens, cache.link.inputs, self.time_encoder, cache.link.time_ctx, self.config)

    def score(
        self,
        graph: TemporalGraph,
        src: np.ndarray,
        dst: np.ndarray,
        t0: np.ndarray,
        rng: np.random.Generator | None = None,
        chunk: int = MICRO_BATCH,
    ) -> np.ndarray:
        """Logits only, computed `chunk` pairs at a time."""
        out = np.empty(len(src))
        for start in range(0, len(src), chunk):
            stop = start + chunk
            out[start:stop], _ = self.forward_batch(graph, src[start:stop], dst[start:stop], t0[start:stop], rng)
        return out

    def header(self) -> dict[str, object]:
        """Checkpoint manifest header: the configuration plus the input widths."""
        return {**self.config.as_header(), "d_link": self.d_link, "num_nodes": self.node_features.num_nodes}


def forward_pair(graph: TemporalGraph, src: int, dst: int, t0: float, model: GraphMixer) -> float:
    """Logit of one candidate link (src, dst) at time t0."""
    logits, _ = model.forward_batch(graph, np.array([src]), np.array([dst]), np.array([t0]))
    return float(logits[0])
