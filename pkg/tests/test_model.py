"""Token matrices, the link and node encoders, the classifier and the assembled model."""

import numpy as np
import pytest

from tgmixer.graph import EventLog, NodeFeatures, build_index
from tgmixer.model import (
    AttentionEncoder,
    AttentionScope,
    GraphMixer,
    GraphMixerConfig,
    LinkClassifier,
    LinkEncoderKind,
    LinkTokenMatrix,
    MixerEncoder,
    NeighborMode,
    Pooling,
    TimeMode,
    Variant,
    attention_encode,
    build_link_token_matrix,
    forward_pair,
    link_classify,
    mixer_encode,
    node_encode,
    summarize_nodes,
)
from tgmixer.model.node_encoder import NodeEncoder
from tgmixer.models import ConfigError, ShapeError
from tgmixer.tensor import ParamGroup, finite_difference_check
from tgmixer.time_encoding import make_omega

from .conftest import FIVE_NODE_EDGES
from .testtools import numeric_grad, reference_mixer


def _randomize(params: ParamGroup, rng: np.random.Generator, scale: float = 0.5) -> None:
    for p in params:
        p.value[...] = rng.normal(scale=scale, size=p.shape)


@pytest.fixture
def five_node_featured():
    """The six-event graph with link features [2e, 2e + 1] on event e."""
    src, dst = zip(*FIVE_NODE_EDGES, strict=True)
    events = EventLog.from_arrays(list(src), list(dst), np.arange(1.0, 7.0), np.arange(12.0).reshape(6, 2), num_nodes=5)
    return build_index(events, undirected=True)


class TestConfig:
    def test_defaults(self):
        config = GraphMixerConfig()
        assert config.k == 20
        assert config.token_width == 10
        assert config.channel_width(102) == 408
        assert config.time_mode is TimeMode.RELATIVE_ENCODED

    def test_strings_become_enums(self):
        config = GraphMixerConfig(time_mode="absolute_raw", neighbor_mode="uniform_2hop")
        assert config.time_mode is TimeMode.ABSOLUTE_RAW
        assert config.neighbor_mode.sampled
        assert not config.time_mode.relative

    def test_small_k(self):
        assert GraphMixerConfig(k=1).token_width == 1

    @pytest.mark.parametrize("changes", [{"k": 0}, {"window": 0.0}, {"d_time": 0}, {"variant": "everything"}])
    def test_invalid(self, changes):
        with pytest.raises(ConfigError):
            GraphMixerConfig(**changes)

    def test_header(self):
        header = GraphMixerConfig(k=5).as_header()
        assert header["k"] == "5"
        assert header["link_encoder"] == "mixer"


class TestTokens:
    def test_isolated_node(self, five_node_featured):
        config = GraphMixerConfig(k=3, d_time=4)
        matrix = build_link_token_matrix(five_node_featured, 2, 1.5, config, make_omega(4))
        assert matrix.real_count == 0
        np.testing.assert_array_equal(matrix.tokens, np.zeros((3, 6)))

    def test_recency_rows(self, five_node_featured):
        """v2 after t5: events t5, t4, t3, t1 then six zero rows."""
        config = GraphMixerConfig(k=10, d_time=4, alpha=2.0, beta=2.0)
        enc = make_omega(4, 2.0, 2.0)
        matrix = build_link_token_matrix(five_node_featured, 1, 5.5, config, enc)
        assert matrix.real_count == 4
        assert matrix.tokens.shape == (10, 6)
        np.testing.assert_array_equal(matrix.tokens[:4, 4:], [[8, 9], [6, 7], [4, 5], [0, 1]])
        np.testing.assert_allclose(matrix.tokens[:4, :4], enc.encode(np.array([0.5, 1.5, 2.5, 4.5])))
        assert not matrix.tokens[4:].any()

    def test_no_leakage(self, five_node_featured):
        """An event at exactly t0 is not visible."""
        config = GraphMixerConfig(k=10, d_time=4)
        matrix = build_link_token_matrix(five_node_featured, 1, 5.0, config, make_omega(4))
        assert matrix.real_count == 3
        np.testing.assert_array_equal(matrix.tokens[0, 4:], [6, 7])

    def test_raw_time_modes(self, five_node_featured):
        relative = GraphMixerConfig(k=2, d_time=3, time_mode="relative_raw")
        absolute = GraphMixerConfig(k=2, d_time=3, time_mode="absolute_raw")
        rel = build_link_token_matrix(five_node_featured, 1, 5.5, relative, make_omega(3))
        abs_ = build_link_token_matrix(five_node_featured, 1, 5.5, absolute, make_omega(3))
        np.testing.assert_array_equal(rel.tokens[:, :3], [[0.5, 0, 0], [1.5, 0, 0]])
        np.testing.assert_array_equal(abs_.tokens[:, :3], [[5.0, 0, 0], [4.0, 0, 0]])

    def test_absolute_encoded(self, five_node_featured):
        config = GraphMixerConfig(k=1, d_time=3, time_mode="absolute_encoded")
        matrix = build_link_token_matrix(five_node_featured, 1, 5.5, config, make_omega(3))
        np.testing.assert_allclose(matrix.tokens[0, :3], make_omega(3).encode(5.0))

    def test_two_hop_mode(self, five_node_featured):
        config = GraphMixerConfig(k=3, d_time=2, neighbor_mode="recent_2hop", time_mode="absolute_raw")
        matrix = build_link_token_matrix(five_node_featured, 0, 5.5, config, make_omega(2))
        # v1 sees t5, then via v2 at t1 nothing earlier, via v2 at t5: t4 and t3
        np.testing.assert_array_equal(matrix.tokens[:, 0], [5.0, 4.0, 3.0])


class TestMixer:
    @pytest.fixture
    def mixer(self):
        params = ParamGroup()
        rng = np.random.default_rng(11)
        encoder = MixerEncoder(params, k=4, channels=5, token_hidden=2, channel_hidden=20, rng=rng)
        _randomize(params, rng)
        return encoder, params

    def test_matches_straight_line_formula(self, mixer):
        encoder, params = mixer
        tokens = np.zeros((4, 5))
        tokens[:2] = np.random.default_rng(2).normal(size=(2, 5))
        out = mixer_encode(LinkTokenMatrix(tokens, 2), encoder)
        np.testing.assert_allclose(out, reference_mixer(tokens, params), rtol=1e-12, atol=1e-12)

    def test_all_zero_tokens(self, mixer):
        encoder, params = mixer
        tokens = np.zeros((4, 5))
        np.testing.assert_allclose(mixer_encode(LinkTokenMatrix(tokens, 0), encoder), reference_mixer(tokens, params), atol=1e-12)

    def test_distinguishes_duplicates(self):
        """[a; a; 0; 0] and [a; 0; 0; 0] encode differently."""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            params = ParamGroup()
            encoder = MixerEncoder(params, 4, 5, 2, 20, rng)
            _randomize(params, rng)
            a = rng.normal(size=5)
            once, twice = np.zeros((4, 5)), np.zeros((4, 5))
            once[0] = a
            twice[:2] = a
            gap = mixer_encode(LinkTokenMatrix(twice, 2), encoder) - mixer_encode(LinkTokenMatrix(once, 1), encoder)
            assert np.linalg.norm(gap) > 1e-8

    def test_token_order_matters(self):
        """Swapping real rows changes the output; the mixer is not permutation-invariant."""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            params = ParamGroup()
            encoder = MixerEncoder(params, 4, 5, 2, 20, rng)
            _randomize(params, rng)
            tokens = np.zeros((4, 5))
            tokens[:3] = rng.normal(size=(3, 5))
            swapped = tokens[[1, 0, 2, 3]]
            gap = mixer_encode(LinkTokenMatrix(swapped, 3), encoder) - mixer_encode(LinkTokenMatrix(tokens, 3), encoder)
            assert np.linalg.norm(gap) > 1e-8

    def test_names(self, mixer):
        _, params = mixer
        assert params.names[:2] == ["mixer.ln_token.gamma", "mixer.ln_token.beta"]
        assert params["mixer.token1.weight"].shape == (4, 2)

    def test_wrong_shape(self, mixer):
        encoder, _ = mixer
        with pytest.raises(ShapeError):
            encoder.forward(np.zeros((1, 3, 5)))

    def test_gradients(self, mixer):
        encoder, params = mixer
        rng = np.random.default_rng(5)
        tokens = rng.normal(size=(3, 4, 5))
        g = rng.normal(size=(3, 5))

        def loss(with_grad=False):
            out, cache = encoder.forward(tokens)
            if with_grad:
                encoder.backward(cache, g)
            return float(np.sum(g * out))

        assert finite_difference_check(loss, params).max_rel_error < 1e-6
        _, cache = encoder.forward(tokens)
        g_tokens = encoder.backward(cache, g)
        np.testing.assert_allclose(g_tokens, numeric_grad(loss, tokens), rtol=1e-5, atol=1e-8)


class TestAttention:
    def _encoder(self, scope, pooling, seed=0):
        params = ParamGroup()
        return AttentionEncoder(params, 5, 5, scope, pooling, np.random.default_rng(seed)), params

    @pytest.mark.parametrize("scope", list(AttentionScope))
    def test_mean_ignores_duplicates(self, scope):
        encoder, _ = self._encoder(scope, Pooling.MEAN)
        a = np.random.default_rng(1).normal(size=5)
        once, twice = np.zeros((3, 5)), np.zeros((3, 5))
        once[0] = a
        twice[:2] = a
        np.testing.assert_allclose(
            attention_encode(LinkTokenMatrix(twice, 2), encoder), attention_encode(LinkTokenMatrix(once, 1), encoder), atol=1e-12
        )

    def test_mean_ignores_any_repeat_count(self):
        """[a] repeated k times encodes like [a] for every k up to 8."""
        encoder, params = self._encoder(AttentionScope.FULL, Pooling.MEAN, seed=9)
        _randomize(params, np.random.default_rng(9))
        a = np.random.default_rng(2).normal(size=5)
        once = np.zeros((8, 5))
        once[0] = a
        reference = attention_encode(LinkTokenMatrix(once, 1), encoder)
        for k in range(2, 9):
            repeated = np.zeros((8, 5))
            repeated[:k] = a
            np.testing.assert_allclose(attention_encode(LinkTokenMatrix(repeated, k), encoder), reference, atol=1e-9)

    def test_sum_exposes_length(self):
        encoder, _ = self._encoder(AttentionScope.FULL, Pooling.SUM)
        a = np.random.default_rng(1).normal(size=5)
        once, twice = np.zeros((3, 5)), np.zeros((3, 5))
        once[0] = a
        twice[:2] = a
        np.testing.assert_allclose(
            attention_encode(LinkTokenMatrix(twice, 2), encoder), 2 * attention_encode(LinkTokenMatrix(once, 1), encoder), rtol=1e-12
        )

    @pytest.mark.parametrize("scope", list(AttentionScope))
    def test_no_real_rows(self, scope):
        encoder, _ = self._encoder(scope, Pooling.MEAN)
        out = attention_encode(LinkTokenMatrix(np.zeros((3, 5)), 0), encoder)
        np.testing.assert_array_equal(out, np.zeros(5))

    def test_pads_are_ignored(self):
        """Whatever sits in masked rows does not reach the output."""
        encoder, _ = self._encoder(AttentionScope.FULL, Pooling.MEAN)
        rng = np.random.default_rng(3)
        tokens = rng.normal(size=(1, 3, 5))
        noisy = tokens.copy()
        noisy[0, 2] = 100.0
        mask = np.array([[True, True, False]])
        np.testing.assert_allclose(encoder.forward(tokens, mask)[0], encoder.forward(noisy, mask)[0])

    @pytest.mark.parametrize(("scope", "pooling"), [("full", "mean"), ("full", "sum"), ("one_hop", "mean")])
    def test_gradients(self, scope, pooling):
        encoder, params = self._encoder(scope, pooling, seed=4)
        rng = np.random.default_rng(6)
        tokens = rng.normal(size=(3, 4, 5))
        mask = np.array([[True, True, True, False], [True, False, False, False], [False] * 4])
        g = rng.normal(size=(3, 5))

        def loss(with_grad=False):
            out, cache = encoder.forward(tokens, mask)
            if with_grad:
                encoder.backward(cache, g)
            return float(np.sum(g * out))

        assert finite_difference_check(loss, params).max_rel_error < 1e-6
        _, cache = encoder.forward(tokens, mask)
        np.testing.assert_allclose(encoder.backward(cache, g), numeric_grad(loss, tokens), rtol=1e-5, atol=1e-8)


class TestNodeEncoder:
    def test_multiset_mean(self):
        """Node 3 linked to 1, 1 and 5 in the window."""
        events = EventLog.from_arrays([3, 1, 3], [1, 3, 5], [1.0, 2.0, 3.0], num_nodes=6)
        graph = build_index(events)
        s = node_encode(graph, 3, 4.0, 10.0, NodeFeatures.one_hot(6))
        np.testing.assert_allclose(s, [0, 2 / 3, 0, 1, 0, 1 / 3])

    def test_empty_window(self, five_node_graph):
        features = NodeFeatures.dense(np.arange(10.0).reshape(5, 2))
        np.testing.assert_array_equal(node_encode(five_node_graph, 1, 5.5, 0.1, features), [2.0, 3.0])

    def test_five_node_window(self, five_node_graph):
        """v2 with window covering t4..t0: x2 + mean(x1, x4)."""
        matrix = np.random.default_rng(0).normal(size=(5, 3))
        s = node_encode(five_node_graph, 1, 6.5, 2.5, NodeFeatures.dense(matrix))
        np.testing.assert_allclose(s, matrix[1] + (matrix[0] + matrix[3]) / 2)

    @pytest.mark.parametrize("dense", [True, False])
    def test_one_hot_matches_dense_identity(self, small_graph, dense):
        """The embedding path equals a projection of explicit one-hot vectors."""
        n = small_graph.num_nodes
        params = ParamGroup()
        features = NodeFeatures.dense(np.eye(n)) if dense else NodeFeatures.one_hot(n)
        encoder = NodeEncoder(params, features, 4, np.random.default_rng(0))
        nodes = np.arange(n)
        t0s = np.full(n, float(small_graph.events.ts[-1]))
        summary = summarize_nodes(small_graph, nodes, t0s, 20.0)
        out, _ = encoder.forward(summary)
        weight = params["node.proj.weight" if dense else "node.embedding"].value
        bias = params["node.proj.bias" if dense else "node.bias"].value
        np.testing.assert_allclose(out, summary.dense(NodeFeatures.one_hot(n)) @ weight + bias, atol=1e-12)


class TestClassifier:
    def test_zero_weights(self):
        params = ParamGroup()
        classifier = LinkClassifier(params, 3, 4, np.random.default_rng(0))
        for p in params:
            p.value[...] = 0
        assert link_classify(np.ones(3), np.ones(3), classifier) == 0.0

    def test_order_matters(self):
        params = ParamGroup()
        classifier = LinkClassifier(params, 3, 4, np.random.default_rng(0))
        a, b = np.array([1.0, 0, 0]), np.array([0, 0, 2.0])
        assert link_classify(a, b, classifier) != link_classify(b, a, classifier)

    def test_shape(self):
        classifier = LinkClassifier(ParamGroup(), 3, 4, np.random.default_rng(0))
        with pytest.raises(ShapeError):
            classifier.forward(np.ones((2, 3)), np.ones((2, 4)))


class TestGraphMixer:
    @pytest.mark.parametrize(
        ("variant", "present", "absent"),
        [
            ("full", {"mixer", "node", "link_proj"}, set()),
            ("link_only", {"mixer", "link_proj"}, {"node"}),
            ("node_only", {"node"}, {"mixer", "link_proj", "time_encoder"}),
        ],
    )
    def test_variants(self, tiny_config, small_graph, variant, present, absent):
        model = GraphMixer(tiny_config.replace(variant=variant), d_link=2, num_nodes=small_graph.num_nodes)
        groups = {name.split(".", 1)[0] for name in model.params.names}
        assert present <= groups
        assert not absent & groups
        assert "classifier" in groups
        assert model.dim_h == (12 if variant == "full" else 6)

    @pytest.mark.parametrize(
        ("variant", "zeroed"), [("node_only", ("link_proj.weight", "link_proj.bias")), ("link_only", ("node.embedding", "node.bias"))]
    )
    def test_variant_contained_in_full(self, tiny_config, small_graph, variant, zeroed):
        """The full model with one branch projected to zero scores like the other variant."""
        part = GraphMixer(tiny_config.replace(variant=variant), 2, num_nodes=small_graph.num_nodes, seed=2)
        full = GraphMixer(tiny_config, 2, num_nodes=small_graph.num_nodes, seed=7)
        for p in part.params:
            if not p.name.startswith("classifier."):
                full.params[p.name].value[...] = p.value
        for name in zeroed:
            full.params[name].value[...] = 0.0
        # full rows are [node | link] for src, then for dst
        width = tiny_config.d_hidden
        kept = slice(0, width) if variant == "node_only" else slice(width, 2 * width)
        hidden = full.params["classifier.hidden.weight"].value
        hidden[kept] = part.params["classifier.hidden.weight"].value[:width]
        hidden[2 * width :][kept] = part.params["classifier.hidden.weight"].value[width:]
        for name in ("classifier.hidden.bias", "classifier.out.weight", "classifier.out.bias"):
            full.params[name].value[...] = part.params[name].value

        events = small_graph.events
        src, dst, ts = events.src[20:40], events.dst[20:40], events.ts[20:40]
        np.testing.assert_allclose(full.score(small_graph, src, dst, ts), part.score(small_graph, src, dst, ts), rtol=1e-12, atol=1e-12)

    def test_attention_encoder(self, tiny_config, small_graph):
        model = GraphMixer(tiny_config.replace(link_encoder=LinkEncoderKind.ATTENTION), 2, num_nodes=small_graph.num_nodes)
        assert any(name.startswith("attention.") for name in model.params.names)
        assert not any(name.startswith("mixer.") for name in model.params.names)

    def test_needs_node_count(self, tiny_config):
        with pytest.raises(ShapeError):
            GraphMixer(tiny_config, 2)

    def test_same_seed_same_weights(self, tiny_config):
        a = GraphMixer(tiny_config, 2, num_nodes=10, seed=4)
        b = GraphMixer(tiny_config, 2, num_nodes=10, seed=4)
        c = GraphMixer(tiny_config, 2, num_nodes=10, seed=5)
        for pa, pb, pc in zip(a.params, b.params, c.params, strict=True):
            np.testing.assert_array_equal(pa.value, pb.value)
            assert pa.name == pc.name
        assert any(not np.array_equal(pa.value, pc.value) for pa, pc in zip(a.params, c.params, strict=True))

    def test_batch_matches_pairs(self, tiny_config, small_graph):
        model = GraphMixer(tiny_config, 2, num_nodes=small_graph.num_nodes, seed=1)
        events = small_graph.events
        src, dst, ts = events.src[40:46], events.dst[40:46], events.ts[40:46]
        logits, _ = model.forward_batch(small_graph, src, dst, ts)
        single = [forward_pair(small_graph, int(s), int(d), float(t), model) for s, d, t in zip(src, dst, ts, strict=True)]
        np.testing.assert_allclose(logits, single, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(model.score(small_graph, src, dst, ts, chunk=4), logits, rtol=1e-12, atol=1e-12)

    def test_bad_batch_shape(self, tiny_config, small_graph):
        model = GraphMixer(tiny_config, 2, num_nodes=small_graph.num_nodes)
        with pytest.raises(ShapeError):
            model.forward_batch(small_graph, np.array([0, 1]), np.array([6]), np.array([1.0, 2.0]))

    @pytest.mark.parametrize("neighbor_mode", list(NeighborMode))
    def test_future_events_invisible(self, tiny_config, small_events, neighbor_mode):
        """Scores at t0 do not change when events at or after t0 are added."""
        config = tiny_config.replace(neighbor_mode=neighbor_mode)
        cut = float(small_events.ts[40])
        past = small_events.ts < cut
        history = EventLog.from_arrays(
            small_events.src[past],
            small_events.dst[past],
            small_events.ts[past],
            small_events.link_features[past],
            num_nodes=small_events.num_nodes,
        )
        model = GraphMixer(config, 2, num_nodes=small_events.num_nodes, seed=2)
        src, dst = small_events.src[40:50], small_events.dst[40:50]
        t0 = np.full(10, cut)
        full = model.score(build_index(small_events), src, dst, t0, rng=np.random.default_rng(0))
        before = model.score(build_index(history), src, dst, t0, rng=np.random.default_rng(0))
        np.testing.assert_array_equal(full, before)

    def test_header(self, tiny_config):
        header = GraphMixer(tiny_config, 3, num_nodes=7).header()
        assert header["d_link"] == 3
        assert header["num_nodes"] == 7
        assert header["k"] == "4"

    @pytest.mark.parametrize(
        "changes",
        [
            {"time_encoder": "trainable"},
            {"time_encoder": "trainable", "link_encoder": "attention"},
            {"link_encoder": "attention", "attention_scope": "one_hop"},
            {"variant": "node_only"},
            {"time_mode": "relative_raw", "neighbor_mode": "recent_2hop"},
        ],
    )
    def test_full_model_gradients(self, tiny_config, small_graph, changes):
        model = GraphMixer(tiny_config.replace(**changes), 2, num_nodes=small_graph.num_nodes, seed=3)
        events = small_graph.events
        src, dst, t0 = events.src[30:38], events.dst[30:38], events.ts[30:38]
        g = np.random.default_rng(8).normal(size=8)

        def loss(with_grad=False):
            logits, cache = model.forward_batch(small_graph, src, dst, t0)
            if with_grad:
                model.backward(cache, g)
            return float(np.sum(g * logits))

        report = finite_difference_check(loss, model.params, max_coords=30)
        assert report.max_rel_error < 1e-5, report.worst_param
