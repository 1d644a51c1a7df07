"""LSTM and GRU cells, unrolled forward pass and backpropagation through time.

Gate weights act on the concatenation ``[h_prev, x_t]``. A single recurrent
layer feeds a scalar linear head applied to the final hidden state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LSTM_GATES = ("f", "i", "C", "o")
GRU_GATES = ("z", "r", "h")


class RnnError(ValueError):
    pass


def sigmoid(x):
    # split on sign so neither branch overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass(frozen=True)
class RnnSpec:
    cell: str = "lstm"
    input_dim: int = 1
    hidden_units: int = 16
    timesteps: int = 10
    learning_rate: float = 1e-3
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    patience: int = 20
    clip_norm: float = 5.0

    def __post_init__(self):
        if self.cell not in ("lstm", "gru"):
            raise RnnError(f"cell must be 'lstm' or 'gru', got {self.cell!r}")
        for name in ("input_dim", "hidden_units", "timesteps", "batch_size"):
            if getattr(self, name) < 1:
                raise RnnError(f"{name} must be >= 1")
        if self.epochs < 0:
            raise RnnError("epochs must be >= 0")
        if not self.learning_rate > 0:
            raise RnnError("learning_rate must be positive")

    @property
    def gates(self) -> tuple[str, ...]:
        return LSTM_GATES if self.cell == "lstm" else GRU_GATES


@dataclass
class RnnParams:
    """Named tensors: ``W_<g>`` (H, H+D), ``b_<g>`` (H,), ``W_out`` (H,), ``b_out`` (1,)."""

    cell: str
    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def hidden_units(self) -> int:
        return int(self.tensors["W_out"].shape[0])

    @property
    def input_dim(self) -> int:
        w = self.tensors["W_f" if self.cell == "lstm" else "W_z"]
        return int(w.shape[1] - w.shape[0])

    def copy(self) -> "RnnParams":
        return RnnParams(self.cell, {k: v.copy() for k, v in self.tensors.items()})

    def __getitem__(self, key: str) -> np.ndarray:
        return self.tensors[key]

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        gates = LSTM_GATES if self.cell == "lstm" else GRU_GATES
        W = np.concatenate([self.tensors[f"W_{g}"] for g in gates], axis=0)
        b = np.concatenate([self.tensors[f"b_{g}"] for g in gates])
        return W, b


def init_params(spec: RnnSpec, rng: np.random.Generator | None = None) -> RnnParams:
    """Uniform(+-1/sqrt(fan_in)) weights; LSTM forget-gate bias starts at 1."""
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    H, D = spec.hidden_units, spec.input_dim
    bound = 1.0 / np.sqrt(H + D)
    t = {}
    for g in spec.gates:
        t[f"W_{g}"] = rng.uniform(-bound, bound, size=(H, H + D))
        t[f"b_{g}"] = np.zeros(H)
    if spec.cell == "lstm":
        t["b_f"][:] = 1.0
    hb = 1.0 / np.sqrt(H)
    t["W_out"] = rng.uniform(-hb, hb, size=H)
    t["b_out"] = np.zeros(1)
    return RnnParams(spec.cell, t)


def zero_params(cell: str, input_dim: int, hidden_units: int) -> RnnParams:
    gates = LSTM_GATES if cell == "lstm" else GRU_GATES
    H, D = hidden_units, input_dim
    t = {}
    for g in gates:
        t[f"W_{g}"] = np.zeros((H, H + D))
        t[f"b_{g}"] = np.zeros(H)
    t["W_out"] = np.zeros(H)
    t["b_out"] = np.zeros(1)
    return RnnParams(cell, t)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise RnnError("non-finite input to recurrent cell")


def lstm_cell_step(params: RnnParams, x_t, h_prev, c_prev):
    """One LSTM step. Works on single vectors or (batch, dim) arrays.

    Returns ``(h_t, c_t, cache)``; ``cache`` keeps the gate activations
    needed for the backward pass.
    """
    x_t, h_prev, c_prev = (np.asarray(a, dtype=float) for a in (x_t, h_prev, c_prev))
    _check_finite(x_t, h_prev, c_prev)
    H = params.hidden_units
    if h_prev.shape[-1] != H or c_prev.shape[-1] != H or x_t.shape[-1] != params.input_dim:
        raise RnnError("state or input dimension does not match params")
    W, b = params.stacked()
    hx = np.concatenate([h_prev, x_t], axis=-1)
    a = hx @ W.T + b
    f = sigmoid(a[..., :H])
    i = sigmoid(a[..., H:2 * H])
    g = np.tanh(a[..., 2 * H:3 * H])
    o = sigmoid(a[..., 3 * H:])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    cache = {"hx": hx, "f": f, "i": i, "g": g, "o": o, "c_prev": c_prev, "tc": tc}
    return h, c, cache


def gru_cell_step(params: RnnParams, x_t, h_prev):
    """One GRU step: z, r gates; candidate on ``[r*h_prev, x]``; h = (1-z)*h_prev + z*cand."""
    h, _ = _gru_step(params, np.asarray(x_t, dtype=float), np.asarray(h_prev, dtype=float))
    return h


def _gru_step(params: RnnParams, x_t, h_prev):
    _check_finite(x_t, h_prev)
    H = params.hidden_units
    if h_prev.shape[-1] != H or x_t.shape[-1] != params.input_dim:
        raise RnnError("state or input dimension does not match params")
    Wz, Wr, Wh = params["W_z"], params["W_r"], params["W_h"]
    hx = np.concatenate([h_prev, x_t], axis=-1)
    z = sigmoid(hx @ Wz.T + params["b_z"])
    r = sigmoid(hx @ Wr.T + params["b_r"])
    rhx = np.concatenate([r * h_prev, x_t], axis=-1)
    n = np.tanh(rhx @ Wh.T + params["b_h"])
    h = (1.0 - z) * h_prev + z * n
    return h, {"hx": hx, "rhx": rhx, "z": z, "r": r, "n": n, "h_prev": h_prev}


def _as_batch(params: RnnParams, windows) -> np.ndarray:
    X = np.asarray(windows, dtype=float)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[2] != params.input_dim:
        raise RnnError(
            f"windows must be (batch, timesteps, {params.input_dim}), got {np.shape(windows)}"
        )
    return X


def _unroll(params: RnnParams, X: np.ndarray):
    B, T, _ = X.shape
    H = params.hidden_units
    h = np.zeros((B, H))
    caches = []
    if params.cell == "lstm":
        c = np.zeros((B, H))
        for t in range(T):
            h, c, cache = lstm_cell_step(params, X[:, t], h, c)
            caches.append(cache)
    else:
        for t in range(T):
            h, cache = _gru_step(params, X[:, t], h)
            caches.append(cache)
    return h, caches


def forward(params: RnnParams, windows) -> np.ndarray:
    """Predictions for a (batch, timesteps, features) array, or a scalar for one window."""
    single = np.ndim(windows) == 2
    X = _as_batch(params, windows)
    h, _ = _unroll(params, X)
    pred = h @ params["W_out"] + params["b_out"][0]
    return pred[0] if single else pred


def loss_and_gradients(params: RnnParams, windows, targets) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared error over the batch and its gradient for every tensor (full BPTT)."""
    X = _as_batch(params, windows)
    y = np.asarray(targets, dtype=float).ravel()
    B, T, D = X.shape
    if B == 0:
        raise RnnError("empty batch")
    if y.size != B:
        raise RnnError("targets do not match windows")
    H = params.hidden_units

    h_T, caches = _unroll(params, X)
    pred = h_T @ params["W_out"] + params["b_out"][0]
    resid = pred - y
    # a diverged run overflows here; it is reported as RnnError just below
    with np.errstate(over="ignore", invalid="ignore"):
        loss = float(np.mean(resid * resid))
    if not np.isfinite(loss):
        raise RnnError("non-finite loss")

    dpred = 2.0 * resid / B
    grads = {"W_out": h_T.T @ dpred, "b_out": np.array([dpred.sum()])}
    dh = np.outer(dpred, params["W_out"])

    if params.cell == "lstm":
        W, _ = params.stacked()
        dW = np.zeros_like(W)
        db = np.zeros(4 * H)
        dc = np.zeros((B, H))
        for t in reversed(range(T)):
            k = caches[t]
            do = dh * k["tc"]
            dc = dc + dh * k["o"] * (1.0 - k["tc"] ** 2)
            df = dc * k["c_prev"]
            di = dc * k["g"]
            dg = dc * k["i"]
            da = np.concatenate(
                [
                    df * k["f"] * (1.0 - k["f"]),
                    di * k["i"] * (1.0 - k["i"]),
                    dg * (1.0 - k["g"] ** 2),
                    do * k["o"] * (1.0 - k["o"]),
                ],
                axis=1,
            )
            dW += da.T @ k["hx"]
            db += da.sum(axis=0)
            dhx = da @ W
            dh = dhx[:, :H]
            dc = dc * k["f"]
        for j, g in enumerate(LSTM_GATES):
            grads[f"W_{g}"] = dW[j * H:(j + 1) * H]
            grads[f"b_{g}"] = db[j * H:(j + 1) * H]
    else:
        Wz, Wr, Wh = params["W_z"], params["W_r"], params["W_h"]
        for g in GRU_GATES:
            grads[f"W_{g}"] = np.zeros_like(params[f"W_{g}"])
            grads[f"b_{g}"] = np.zeros(H)
        for t in reversed(range(T)):
            k = caches[t]
            z, r, n, hp = k["z"], k["r"], k["n"], k["h_prev"]
            dn = dh * z
            dz = dh * (n - hp)
            dh_prev = dh * (1.0 - z)
            dan = dn * (1.0 - n * n)
            grads["W_h"] += dan.T @ k["rhx"]
            grads["b_h"] += dan.sum(axis=0)
            drhx = dan @ Wh
            dr = drhx[:, :H] * hp
            dh_prev += drhx[:, :H] * r
            daz = dz * z * (1.0 - z)
            dar = dr * r * (1.0 - r)
            grads["W_z"] += daz.T @ k["hx"]
            grads["b_z"] += daz.sum(axis=0)
            grads["W_r"] += dar.T @ k["hx"]
            grads["b_r"] += dar.sum(axis=0)
            dh_prev += (daz @ Wz)[:, :H] + (dar @ Wr)[:, :H]
            dh = dh_prev
    return loss, grads
