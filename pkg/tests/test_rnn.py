import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fxlab.rnn import (
    RnnError,
    RnnSpec,
    forward,
    gru_cell_step,
    init_params,
    load_checkpoint,
    loss_and_gradients,
    lstm_cell_step,
    save_checkpoint,
    train,
    zero_params,
)
from fxlab.rnn.train import Adam, clip_by_global_norm
from helpers import central_difference, relative_error


class Set:
    def __init__(self, windows, targets):
        self.windows, self.targets = np.asarray(windows, float), np.asarray(targets, float)


def random_instance(cell, T=3, H=4, D=2, B=5, seed=0):
    rng = np.random.default_rng(seed)
    params = init_params(RnnSpec(cell, D, H, T, seed=seed))
    for v in params.tensors.values():
        v += rng.normal(0, 0.3, v.shape)
    return params, rng.normal(size=(B, T, D)), rng.normal(size=B)


class TestCells:
    def test_lstm_zero_params_zero_state(self):
        p = zero_params("lstm", 2, 3)
        h, c, cache = lstm_cell_step(p, np.ones(2), np.zeros(3), np.zeros(3))
        np.testing.assert_array_equal(h, 0)
        np.testing.assert_array_equal(c, 0)
        for g in ("f", "i", "o"):
            np.testing.assert_array_equal(cache[g], 0.5)

    def test_lstm_zero_params_unit_cell(self):
        h, c, _ = lstm_cell_step(zero_params("lstm", 2, 3), np.ones(2), np.zeros(3), np.ones(3))
        np.testing.assert_array_equal(c, 0.5)
        np.testing.assert_allclose(h, 0.5 * math.tanh(0.5), rtol=0, atol=1e-15)
        assert h[0] == pytest.approx(0.23106, abs=5e-6)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_lstm_bounded(self, seed):
        p, X, _ = random_instance("lstm", seed=seed)
        h, c = np.zeros(4), np.zeros(4)
        for t in range(3):
            h, c, _ = lstm_cell_step(p, X[0, t] * 10, h, c)
            assert np.all(np.abs(h) < 1)

    def test_gru_zero_params(self):
        hp = np.array([0.4, -0.2])
        np.testing.assert_allclose(gru_cell_step(zero_params("gru", 1, 2), np.ones(1), hp), 0.5 * hp)
        np.testing.assert_array_equal(gru_cell_step(zero_params("gru", 1, 2), np.ones(1), np.zeros(2)), 0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-0.99, 0.99))
    def test_gru_bounded(self, seed, h0):
        p, X, _ = random_instance("gru", seed=seed)
        h = np.full(4, h0)
        for t in range(3):
            h = gru_cell_step(p, X[0, t] * 10, h)
            assert np.all(np.abs(h) < 1)

    def test_non_finite_input(self):
        with pytest.raises(RnnError):
            lstm_cell_step(zero_params("lstm", 1, 2), np.array([np.nan]), np.zeros(2), np.zeros(2))

    def test_dimension_mismatch(self):
        with pytest.raises(RnnError):
            lstm_cell_step(zero_params("lstm", 1, 2), np.ones(3), np.zeros(2), np.zeros(2))


class TestForward:
    def test_zero_params_output_bias(self):
        p = zero_params("lstm", 2, 3)
        p.tensors["b_out"][0] = 0.7
        assert forward(p, np.ones((4, 2))) == 0.7

    def test_single_step(self):
        p, X, _ = random_instance("lstm", T=1)
        h, _, _ = lstm_cell_step(p, X[0, 0], np.zeros(4), np.zeros(4))
        assert forward(p, X[0]) == pytest.approx(h @ p["W_out"] + p["b_out"][0], abs=1e-15)

    def test_deterministic(self):
        p, X, _ = random_instance("gru")
        np.testing.assert_array_equal(forward(p, X), forward(p, X))

    def test_shape_mismatch(self):
        p, _, _ = random_instance("lstm")
        with pytest.raises(RnnError):
            forward(p, np.ones((3, 5)))


class TestGradients:
    @pytest.mark.parametrize("cell", ["lstm", "gru"])
    def test_finite_difference(self, cell):
        params, X, y = random_instance(cell)
        _, grads = loss_and_gradients(params, X, y)
        for name, tensor in params.tensors.items():
            num = central_difference(lambda: loss_and_gradients(params, X, y)[0], tensor)
            assert relative_error(grads[name], num) < 1e-4, name

    def test_perfect_fit(self):
        params, X, _ = random_instance("lstm")
        loss, grads = loss_and_gradients(params, X, forward(params, X))
        assert loss == 0.0
        np.testing.assert_array_equal(grads["W_out"], 0)
        np.testing.assert_array_equal(grads["b_out"], 0)

    def test_doubled_residual(self):
        params, X, y = random_instance("lstm")
        pred = forward(params, X)
        l1, _ = loss_and_gradients(params, X, y)
        l2, _ = loss_and_gradients(params, X, pred + 2 * (y - pred))
        assert l2 == pytest.approx(4 * l1, rel=1e-12)

    def test_empty_batch(self):
        params, X, y = random_instance("lstm")
        with pytest.raises(RnnError):
            loss_and_gradients(params, X[:0], y[:0])

    def test_non_finite_loss(self):
        params, X, y = random_instance("lstm")
        params.tensors["b_out"][0] = np.inf
        with pytest.raises(RnnError):
            loss_and_gradients(params, X, y)


def toy_trend():
    x = np.linspace(0, 1, 11)
    windows = np.stack([x[k:k + 3, None] for k in range(8)])
    return Set(windows, x[3:11])


class TestTrain:
    def test_overfit_capacity(self):
        spec = RnnSpec("lstm", 1, 8, 3, learning_rate=0.01, epochs=500, batch_size=8, patience=500)
        m = train(spec, toy_trend())
        pred = m.predict(toy_trend().windows)
        assert np.sqrt(np.mean((pred - toy_trend().targets) ** 2)) < 0.01

    def test_zero_epochs(self):
        spec = RnnSpec("gru", 1, 4, 3, epochs=0)
        m = train(spec, toy_trend())
        init = init_params(spec)
        for k, v in init.tensors.items():
            np.testing.assert_array_equal(m.params[k], v)

    def test_same_seed_same_params(self):
        spec = RnnSpec("lstm", 1, 4, 3, epochs=20, batch_size=3, seed=5)
        a, b = train(spec, toy_trend()), train(spec, toy_trend())
        for k in a.params.tensors:
            np.testing.assert_array_equal(a.params[k], b.params[k])
        assert a.train_loss == b.train_loss

    def test_early_stopping_keeps_best(self):
        spec = RnnSpec("lstm", 1, 4, 3, epochs=200, patience=3, learning_rate=0.05)
        valid = Set(toy_trend().windows, -toy_trend().targets)
        m = train(spec, toy_trend(), valid)
        assert len(m.valid_rmse) <= 200
        assert m.valid_rmse[m.best_epoch - 1] == min(m.valid_rmse)

    def test_divergence_names_epoch(self):
        spec = RnnSpec("lstm", 1, 4, 3, epochs=5, learning_rate=1e300, clip_norm=1e300)
        data = toy_trend()
        data.targets = data.targets * 1e200
        with pytest.raises(RnnError, match="epoch"):
            train(spec, data)

    def test_checkpoint_roundtrip(self, tmp_path):
        m = train(RnnSpec("gru", 1, 4, 3, epochs=3), toy_trend())
        save_checkpoint(m, tmp_path / "m.npz")
        back = load_checkpoint(tmp_path / "m.npz")
        assert back.spec == m.spec
        for k in m.params.tensors:
            np.testing.assert_array_equal(back.params[k], m.params[k])

    def test_window_shape_checked(self):
        with pytest.raises(RnnError):
            train(RnnSpec("lstm", 2, 4, 3, epochs=1), toy_trend())


def test_clip_global_norm():
    g = {"a": np.array([3.0, 4.0]), "b": np.array([0.0])}
    norm = clip_by_global_norm(g, 1.0)
    assert norm == 5.0
    np.testing.assert_allclose(g["a"], [0.6, 0.8])


def test_adam_first_step_is_lr_sized():
    p = {"w": np.array([1.0, -1.0])}
    Adam(0.1).update(p, {"w": np.array([2.0, -0.5])})
    np.testing.assert_allclose(p["w"], [0.9, -0.9], atol=1e-9)
