import numpy as np
import pytest

from tgmixer.models import CheckpointError, ShapeError
from tgmixer.tensor import (
    Adam,
    LayerNorm,
    Linear,
    ParamGroup,
    assign_flat,
    checkpoint_paths,
    finite_difference_check,
    flatten_params,
    load_checkpoint,
    load_into,
    save_checkpoint,
)
from tgmixer.tensor.gradcheck import relative_error
from tgmixer.tensor.ops import (
    gelu_backward,
    gelu_forward,
    layer_norm_backward,
    layer_norm_forward,
    matmul_backward,
    matmul_forward,
    mean_rows_backward,
    mean_rows_forward,
    softmax_rows_backward,
    softmax_rows_forward,
)

from .testtools import numeric_grad


@pytest.fixture
def rng():
    return np.random.default_rng(7)


class TestOps:
    def test_layer_norm_example(self):
        out, _ = layer_norm_forward(np.array([[1.0, 2.0, 3.0]]), np.ones((1, 3)), np.zeros((1, 3)))
        np.testing.assert_allclose(out, [[-1.22474, 0.0, 1.22474]], atol=1e-4)

    def test_layer_norm_single_channel(self):
        with pytest.raises(ShapeError):
            layer_norm_forward(np.ones((2, 1)), np.ones((1, 1)), np.zeros((1, 1)))

    def test_layer_norm_gradients(self, rng):
        x = rng.normal(size=(3, 4, 5))
        gamma, beta = rng.normal(size=(1, 5)), rng.normal(size=(1, 5))
        g = rng.normal(size=x.shape)

        def loss():
            return float(np.sum(g * layer_norm_forward(x, gamma, beta)[0]))

        _, cache = layer_norm_forward(x, gamma, beta)
        gx, g_gamma, g_beta = layer_norm_backward(cache, gamma, g)
        np.testing.assert_allclose(gx, numeric_grad(loss, x), rtol=1e-5, atol=1e-7)
        np.testing.assert_allclose(g_gamma, numeric_grad(loss, gamma), rtol=1e-5, atol=1e-7)
        np.testing.assert_allclose(g_beta, numeric_grad(loss, beta), rtol=1e-5, atol=1e-7)

    def test_matmul_shapes(self):
        with pytest.raises(ShapeError):
            matmul_forward(np.ones((2, 3)), np.ones((2, 3)))
        with pytest.raises(ShapeError):
            matmul_forward(np.ones(3), np.ones((3, 1)))

    def test_matmul_broadcast_backward(self, rng):
        """A shared weight receives the gradient summed over the batch."""
        a, b = rng.normal(size=(4, 2, 3)), rng.normal(size=(3, 5))
        g = rng.normal(size=(4, 2, 5))
        ga, gb = matmul_backward(a, b, g)
        assert ga.shape == a.shape
        assert gb.shape == b.shape
        np.testing.assert_allclose(gb, numeric_grad(lambda: float(np.sum(g * matmul_forward(a, b))), b), rtol=1e-6)

    def test_gelu(self, rng):
        assert gelu_forward(np.array([0.0]))[0] == 0.0
        np.testing.assert_allclose(gelu_forward(np.array([1.0])), [0.8413447], atol=1e-7)
        x, g = rng.normal(size=(6,)), rng.normal(size=(6,))
        np.testing.assert_allclose(
            gelu_backward(x, g), numeric_grad(lambda: float(np.sum(g * gelu_forward(x))), x), rtol=1e-6, atol=1e-9
        )

    def test_mean_rows(self):
        x = np.arange(6.0).reshape(3, 2)
        np.testing.assert_array_equal(mean_rows_forward(x), [2.0, 3.0])
        np.testing.assert_array_equal(mean_rows_backward(np.array([3.0, 6.0]), 3), [[1.0, 2.0]] * 3)

    def test_softmax_masks(self):
        x = np.array([[1.0, 2.0, 3.0], [5.0, 5.0, 5.0]])
        mask = np.array([[True, False, True], [False, False, False]])
        y = softmax_rows_forward(x, mask)
        assert y[0, 1] == 0.0
        assert y[0].sum() == pytest.approx(1.0)
        np.testing.assert_array_equal(y[1], np.zeros(3))

    def test_softmax_stable(self):
        y = softmax_rows_forward(np.array([[1000.0, 1000.0]]))
        np.testing.assert_allclose(y, [[0.5, 0.5]])

    def test_softmax_backward(self, rng):
        x, g = rng.normal(size=(2, 4)), rng.normal(size=(2, 4))
        y = softmax_rows_forward(x)
        np.testing.assert_allclose(
            softmax_rows_backward(y, g),
            numeric_grad(lambda: float(np.sum(g * softmax_rows_forward(x))), x),
            rtol=1e-6,
            atol=1e-9,
        )


class TestParams:
    def test_registration(self):
        params = ParamGroup()
        params.add("a.w", np.ones((2, 3)))
        params.add("b", np.zeros(4))
        assert params.names == ["a.w", "b"]
        assert params["b"].shape == (1, 4)
        assert params.size == 10
        assert "a.w" in params
        assert len(params) == 2
        with pytest.raises(ShapeError):
            params.add("b", np.zeros(1))

    def test_flatten_roundtrip(self, rng):
        params = ParamGroup()
        params.add("a", rng.normal(size=(2, 2)))
        params.add("b", rng.normal(size=(1, 3)))
        vector = flatten_params(params) * 2.0
        assign_flat(params, vector)
        np.testing.assert_array_equal(flatten_params(params), vector)
        with pytest.raises(ShapeError):
            assign_flat(params, np.zeros(6))

    def test_snapshot_restore(self):
        params = ParamGroup()
        p = params.add("a", np.ones((1, 2)))
        saved = params.snapshot()
        p.value += 5
        params.restore(saved)
        np.testing.assert_array_equal(p.value, [[1.0, 1.0]])
        with pytest.raises(ShapeError):
            params.restore({"a": np.ones((2, 1))})
        with pytest.raises(ShapeError):
            params.restore({})


class TestLayers:
    def test_linear(self, rng):
        params = ParamGroup()
        layer = Linear(params, "fc", 3, 2, rng)
        assert params.names == ["fc.weight", "fc.bias"]
        assert np.all(np.abs(layer.weight.value) <= 1 / np.sqrt(3))
        x = rng.normal(size=(4, 3))
        y, cache = layer.forward(x)
        layer.backward(cache, np.ones_like(y))
        np.testing.assert_allclose(layer.bias.grad, [[4.0, 4.0]])
        with pytest.raises(ShapeError):
            layer.forward(np.ones((1, 2)))

    def test_layer_norm_init(self):
        params = ParamGroup()
        ln = LayerNorm(params, "ln", 4)
        np.testing.assert_array_equal(ln.gamma.value, np.ones((1, 4)))
        np.testing.assert_array_equal(ln.beta.value, np.zeros((1, 4)))


class TestAdam:
    def test_first_step_moves_by_lr(self):
        """Bias correction makes the first step lr * sign(g)."""
        params = ParamGroup()
        p = params.add("w", np.array([[1.0, -1.0]]))
        p.grad[...] = [[0.5, -3.0]]
        Adam(params, lr=0.1, weight_decay=0.0).step()
        np.testing.assert_allclose(p.value, [[0.9, -0.9]], rtol=1e-6)
        assert not p.grad.any()

    def test_zero_lr_freezes(self):
        params = ParamGroup()
        p = params.add("w", np.array([[2.0]]))
        p.grad[...] = 1.0
        Adam(params, lr=0.0).step()
        assert p.value[0, 0] == 2.0

    def test_weight_decay_is_coupled(self):
        """With no loss gradient, decay alone still moves the weight toward 0."""
        params = ParamGroup()
        p = params.add("w", np.array([[2.0]]))
        Adam(params, lr=0.01, weight_decay=0.1).step()
        assert p.value[0, 0] == pytest.approx(1.99, rel=1e-6)

    def test_minimizes_quadratic(self):
        params = ParamGroup()
        p = params.add("w", np.array([[3.0, -2.0]]))
        opt = Adam(params, lr=0.05, weight_decay=0.0)
        for _ in range(500):
            p.grad += 2 * p.value
            opt.step()
        np.testing.assert_allclose(p.value, 0.0, atol=0.1)


class TestGradCheck:
    def test_relative_error(self):
        assert relative_error(1.0, 1.0) == 0.0
        assert relative_error(0.0, 1e-12) == pytest.approx(1e-4)
        assert relative_error(0.0, 0.0) == 0.0
        assert relative_error(2.0, 1.0) == pytest.approx(0.5, rel=1e-6)

    def test_linear_layer(self, rng):
        params = ParamGroup()
        layer = Linear(params, "fc", 4, 3, rng)
        x = rng.normal(size=(5, 4))

        def loss(with_grad):
            y, cache = layer.forward(x)
            if with_grad:
                layer.backward(cache, 2 * y)
            return float(np.sum(y * y))

        report = finite_difference_check(loss, params)
        assert report.max_rel_error < 1e-6
        assert report.checked == 15
        assert set(report.per_group) == {"fc"}

    def test_detects_wrong_gradient(self):
        params = ParamGroup()
        p = params.add("w", np.array([[1.0, 2.0]]))

        def loss(with_grad):
            if with_grad:
                p.grad += 3 * p.value
            return float(np.sum(p.value**2))

        report = finite_difference_check(loss, params)
        assert report.max_rel_error == pytest.approx(1 / 3, rel=1e-4)
        assert report.worst_param == "w"

    def test_small_gradients_are_checked(self):
        """A missing gradient is reported even when the true one is tiny."""
        params = ParamGroup()
        params.add("w", np.array([[1.0, -2.0, 0.5]]))

        def loss(with_grad):
            return float(5e-10 * np.sum(params["w"].value))

        report = finite_difference_check(loss, params)
        assert report.max_rel_error == pytest.approx(0.05, rel=1e-3)
        assert report.max_rel_error > 1e-5

    def test_coordinate_sampling(self, rng):
        params = ParamGroup()
        params.add("w", rng.normal(size=(20, 20)))

        def loss(with_grad):
            if with_grad:
                params["w"].grad += 2 * params["w"].value
            return float(np.sum(params["w"].value ** 2))

        assert finite_difference_check(loss, params, max_coords=25).checked == 25


class TestCheckpoint:
    @pytest.fixture
    def params(self, rng):
        group = ParamGroup()
        group.add("mixer.w", rng.normal(size=(3, 2)))
        group.add("classifier.b", rng.normal(size=(1, 4)))
        return group

    def test_roundtrip(self, params, tmp_path):
        prefix = tmp_path / "run" / "ckpt"
        manifest, payload = save_checkpoint(prefix, params, {"K": 30, "time_mode": "encoded"})
        assert (manifest, payload) == checkpoint_paths(prefix)
        assert payload.stat().st_size == 10 * 8
        header, tensors = load_checkpoint(prefix)
        assert header == {"K": "30", "time_mode": "encoded"}
        for p in params:
            np.testing.assert_array_equal(tensors[p.name], p.value)

    def test_load_into(self, params, tmp_path):
        save_checkpoint(tmp_path / "c", params)
        _, tensors = load_checkpoint(tmp_path / "c")
        original = params.snapshot()
        for p in params:
            p.value[...] = 0
        load_into(params, tensors)
        for name, value in original.items():
            np.testing.assert_array_equal(params[name].value, value)

    def test_missing(self, tmp_path):
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "nothing")

    def test_bad_magic(self, params, tmp_path):
        manifest, _ = save_checkpoint(tmp_path / "c", params)
        manifest.write_text("hello\n")
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "c")

    def test_bad_tensor_line(self, params, tmp_path):
        manifest, _ = save_checkpoint(tmp_path / "c", params)
        manifest.write_text(manifest.read_text() + "broken line\n")
        with pytest.raises(CheckpointError, match="rows cols offset"):
            load_checkpoint(tmp_path / "c")

    def test_truncated(self, params, tmp_path):
        _, payload = save_checkpoint(tmp_path / "c", params)
        payload.write_bytes(payload.read_bytes()[:-8])
        with pytest.raises(CheckpointError, match="truncated"):
            load_checkpoint(tmp_path / "c")

    def test_config_mismatch(self, params, tmp_path, rng):
        save_checkpoint(tmp_path / "c", params)
        _, tensors = load_checkpoint(tmp_path / "c")

        wider = ParamGroup()
        wider.add("mixer.w", np.zeros((3, 3)))
        wider.add("classifier.b", np.zeros((1, 4)))
        with pytest.raises(ShapeError):
            load_into(wider, tensors)

        fewer = ParamGroup()
        fewer.add("mixer.w", np.zeros((3, 2)))
        with pytest.raises(ShapeError, match="classifier.b"):
            load_into(fewer, tensors)
