"""Unit tests for tensors, tape-based gradients and Adam."""

import threading

import numpy as np
import pytest

from rxnemb.autodiff import AdamState, Tape, Tensor, active_tape, adam_step, backward, gradient_check, ops, relative_error
from rxnemb.core.errors import AllMaskedRow, NonFiniteValue, NotScalar, ShapeMismatch


class TestTensor:
    """Test Tensor class."""

    def test_defaults_to_float32(self):
        """Test the default dtype."""
        assert Tensor([[1, 2]]).dtype == np.float32

    def test_data_is_read_only(self):
        """Test tensors cannot be mutated in place."""
        t = Tensor([1.0, 2.0])

        with pytest.raises(ValueError):
            t.data[0] = 5.0

    def test_item(self):
        """Test scalar extraction."""
        assert Tensor(3.5).item() == 3.5
        with pytest.raises(NotScalar):
            Tensor([1.0, 2.0]).item()


class TestBackward:
    """Test backward through recorded ops."""

    def test_sum_of_product(self):
        """Test d(sum W·x)/dW is the broadcast of x."""
        x = np.array([[1.0, 2.0, 3.0]])
        with Tape() as tape:
            W = Tensor(np.ones((3, 2)), requires_grad=True, name="W")
            loss = ops.sum_all(ops.matmul(Tensor(x), W))
        grads = backward(tape, loss)

        np.testing.assert_allclose(grads["W"], np.repeat(x.T, 2, axis=1))

    def test_unused_parameter_gets_zeros(self):
        """Test a parameter the loss ignores still appears with zero gradient."""
        with Tape() as tape:
            a = Tensor([[2.0]], requires_grad=True, name="a")
            b = Tensor([[5.0]], requires_grad=True, name="b")
            loss = ops.sum_all(ops.mul(a, a))
        grads = backward(tape, loss, {"a": a, "b": b})

        assert grads["a"][0, 0] == pytest.approx(4.0)
        np.testing.assert_array_equal(grads["b"], np.zeros((1, 1)))

    def test_constants_have_no_gradient(self):
        """Test untracked inputs never appear."""
        with Tape() as tape:
            a = Tensor([[1.0, 2.0]], requires_grad=True, name="a")
            c = ops.constant([[3.0, 4.0]])
            loss = ops.sum_all(ops.mul(a, c))
        grads = backward(tape, loss)

        assert set(grads) == {"a"}
        np.testing.assert_allclose(grads["a"], [[3.0, 4.0]])

    def test_shared_input_accumulates(self):
        """Test a tensor used twice sums both contributions."""
        with Tape() as tape:
            a = Tensor([[3.0]], requires_grad=True, name="a")
            loss = ops.sum_all(ops.add(a, ops.scale(a, 2.0)))
        assert backward(tape, loss)["a"][0, 0] == pytest.approx(3.0)

    def test_non_scalar_loss(self):
        """Test backward from a vector is rejected."""
        with Tape() as tape:
            a = Tensor([[1.0, 2.0]], requires_grad=True, name="a")
            out = ops.scale(a, 2.0)
        with pytest.raises(NotScalar):
            backward(tape, out)

    def test_ops_outside_tape_are_untracked(self):
        """Test nothing is recorded without an active tape."""
        a = Tensor([[1.0]], requires_grad=True, name="a")

        assert not ops.scale(a, 2.0).requires_grad

    def test_tape_is_per_thread(self):
        """Test a tape opened on one thread is invisible to another."""
        seen = {}

        def other():
            seen["tape"] = active_tape()

        with Tape() as tape:
            worker = threading.Thread(target=other)
            worker.start()
            worker.join()
            assert active_tape() is tape

        assert seen["tape"] is None
        assert active_tape() is None


class TestOps:
    """Test individual primitives."""

    def test_shape_mismatch(self):
        """Test incompatible operands are rejected."""
        with pytest.raises(ShapeMismatch):
            ops.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
        with pytest.raises(ShapeMismatch):
            ops.add(Tensor(np.ones((2, 3))), Tensor(np.ones((3, 2))))

    def test_masked_softmax(self):
        """Test masked entries are exactly zero and rows sum to one."""
        x = Tensor([[1.0, 2.0, 3.0], [0.5, 0.5, 0.5]])
        mask = np.array([[True, True, False], [True, True, True]])

        y = ops.softmax_rows(x, mask).data

        assert y[0, 2] == 0.0
        np.testing.assert_allclose(y.sum(axis=1), [1.0, 1.0], rtol=1e-6)
        np.testing.assert_allclose(y[1], [1 / 3] * 3, rtol=1e-6)

    def test_all_masked_row(self):
        """Test a row with nothing to attend to."""
        with pytest.raises(AllMaskedRow):
            ops.softmax_rows(Tensor([[1.0, 2.0]]), np.array([[False, False]]))

    def test_non_finite_value(self):
        """Test overflow is reported rather than propagated."""
        big = Tensor([[1e30]], dtype=np.float32)

        with pytest.raises(NonFiniteValue):
            ops.mul(big, big)

    def test_layer_norm_statistics(self):
        """Test unit gain and zero shift normalize each row."""
        x = Tensor(np.arange(8, dtype=np.float64).reshape(2, 4), dtype=np.float64)
        out = ops.layer_norm(x, Tensor(np.ones(4), dtype=np.float64), Tensor(np.zeros(4), dtype=np.float64)).data

        np.testing.assert_allclose(out.mean(axis=1), 0.0, atol=1e-9)
        np.testing.assert_allclose(out.std(axis=1), 1.0, atol=1e-4)

    def test_gelu_values(self):
        """Test exact GELU at a few points."""
        out = ops.gelu(Tensor([[0.0, 1.0, -1.0]], dtype=np.float64)).data

        np.testing.assert_allclose(out, [[0.0, 0.8413447, -0.1586553]], atol=1e-6)

    def test_bce_with_logits(self):
        """Test the loss at logit 0 is log 2."""
        loss = ops.bce_with_logits(Tensor([[0.0], [0.0]]), np.array([1.0, 0.0]))

        assert loss.item() == pytest.approx(np.log(2.0), rel=1e-6)

    def test_heads_round_trip(self):
        """Test merge_heads inverts split_heads."""
        x = Tensor(np.arange(24, dtype=np.float32).reshape(3, 8))

        np.testing.assert_array_equal(ops.merge_heads(ops.split_heads(x, 4)).data, x.data)

    def test_scatter_rows_rejects_duplicates(self):
        """Test scatter targets must be distinct."""
        with pytest.raises(ShapeMismatch):
            ops.scatter_rows(Tensor(np.ones((2, 3))), [1, 1], 4)


class TestGradientCheck:
    """Test analytic gradients against finite differences."""

    def test_composite_function(self):
        """Test a small network exercising most primitives."""
        rng = np.random.default_rng(0)
        params = {
            "w1": rng.standard_normal((4, 6)),
            "b1": rng.standard_normal(6),
            "gamma": 1.0 + 0.1 * rng.standard_normal(6),
            "beta": 0.1 * rng.standard_normal(6),
            "w2": rng.standard_normal((6, 1)),
        }
        x = rng.standard_normal((5, 4))
        mask = np.array([[True, True, True, False, True]] * 5)
        targets = np.array([1.0, 0.0, 1.0, 1.0, 0.0])

        def loss(p):
            c = ops.constant(x, dtype=np.float64)
            h = ops.gelu(ops.add_bias(ops.matmul(c, p["w1"]), p["b1"]))
            h = ops.layer_norm(h, p["gamma"], p["beta"])
            attn = ops.softmax_rows(ops.matmul(h, ops.transpose(h)), mask)
            h = ops.add(h, ops.matmul(attn, h))
            return ops.bce_with_logits(ops.matmul(h, p["w2"]), targets)

        errors = gradient_check(loss, params, step=1e-5)

        assert max(errors.values()) < 1e-4

    def test_relative_error_has_no_floor(self):
        """Test small gradients are judged relatively, not against a floor."""
        assert relative_error(1e-4, 2e-4) == pytest.approx(0.5)
        assert relative_error(1.0, 1.0 + 1e-6) == pytest.approx(1e-6, rel=1e-3)

    def test_relative_error_absolute_tolerance(self):
        """Test differences within atol count as agreement."""
        assert relative_error(0.0, 5e-9) == 0.0
        assert relative_error(0.0, 5e-9, atol=1e-12) == 1.0

    def test_wrong_gradient_detected(self):
        """Test a backward that misses half the loss shows up."""
        params = {"w": np.array([[0.3, -1.2]])}

        def loss(p):
            # the constant term doubles the value but is invisible to backward
            hidden = ops.constant(np.sum(p["w"].data ** 2), dtype=np.float64)
            return ops.add(ops.sum_all(ops.mul(p["w"], p["w"])), hidden)

        assert gradient_check(loss, params)["w"] == pytest.approx(0.5, rel=1e-3)

    def test_names_and_sampling(self):
        """Test a narrower names list checks the same sampled entries."""
        rng = np.random.default_rng(3)
        params = {"a": rng.standard_normal((6, 5)), "b": rng.standard_normal((4, 7))}

        def loss(p):
            # cubes leave a step² truncation error that differs per entry
            return ops.add(
                ops.sum_all(ops.mul(p["a"], ops.mul(p["a"], p["a"]))),
                ops.sum_all(ops.mul(p["b"], ops.mul(p["b"], p["b"]))),
            )

        both = gradient_check(loss, params, step=1e-2, max_entries=5, seed=9)
        only_b = gradient_check(loss, params, step=1e-2, max_entries=5, seed=9, names=["b"])

        assert set(only_b) == {"b"}
        assert only_b["b"] == both["b"] > 0.0


class TestAdam:
    """Test adam_step."""

    def test_zero_gradient_leaves_parameters(self):
        """Test no movement without gradient."""
        params = {"w": np.array([1.0, -2.0], dtype=np.float32)}

        new, state = adam_step(params, {"w": np.zeros(2, dtype=np.float32)}, AdamState())

        np.testing.assert_array_equal(new["w"], params["w"])
        assert state.step == 1

    def test_first_step_is_sign_times_lr(self):
        """Test the bias-corrected first step is about −lr·sign(g)."""
        params = {"w": np.array([0.0, 0.0, 0.0], dtype=np.float64)}
        grads = {"w": np.array([0.5, -3.0, 1e-3], dtype=np.float64)}

        new, _ = adam_step(params, grads, AdamState(), lr=0.01)

        np.testing.assert_allclose(new["w"], [-0.01, 0.01, -0.01], rtol=1e-4)

    def test_inputs_not_modified(self):
        """Test parameters and state are left untouched."""
        params = {"w": np.array([1.0], dtype=np.float32)}
        grads = {"w": np.array([1.0], dtype=np.float32)}
        _, state = adam_step(params, grads, AdamState())
        m_before = state.m["w"].copy()

        adam_step(params, grads, state)

        assert params["w"][0] == 1.0
        np.testing.assert_array_equal(state.m["w"], m_before)

    def test_minimizes_quadratic(self):
        """Test (w − 3)² converges to w = 3."""
        params = {"w": np.array([0.0], dtype=np.float64)}
        state = AdamState()
        for _ in range(2000):
            grads = {"w": 2.0 * (params["w"] - 3.0)}
            params, state = adam_step(params, grads, state, lr=0.05)

        assert params["w"][0] == pytest.approx(3.0, abs=5e-2)

    def test_shape_mismatch(self):
        """Test a gradient of the wrong shape is rejected."""
        with pytest.raises(ShapeMismatch):
            adam_step({"w": np.zeros(3)}, {"w": np.zeros(2)}, AdamState())
