"""Minibatch Adam training with early stopping, and checkpoint I/O."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .model import RnnError, RnnParams, RnnSpec, forward, init_params, loss_and_gradients

logger = logging.getLogger(__name__)


@dataclass
class TrainedModel:
    spec: RnnSpec
    params: RnnParams
    best_epoch: int
    train_loss: list[float] = field(default_factory=list)
    valid_rmse: list[float] = field(default_factory=list)

    def predict(self, windows) -> np.ndarray:
        return forward(self.params, windows)


class Adam:
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def update(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for k, g in grads.items():
            if k not in self.m:
                self.m[k] = np.zeros_like(g)
                self.v[k] = np.zeros_like(g)
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            params[k] -= self.lr * (self.m[k] / b1t) / (np.sqrt(self.v[k] / b2t) + self.eps)


def clip_by_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> float:
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


def _rmse(params: RnnParams, windows, targets) -> float:
    pred = forward(params, windows)
    return float(np.sqrt(np.mean((pred - targets) ** 2)))


def train(spec: RnnSpec, train_set, valid_set=None) -> TrainedModel:
    """Fit with shuffled minibatches; keep the params of the best validation epoch.

    ``train_set`` and ``valid_set`` are anything with ``windows`` and
    ``targets`` attributes. Without a validation set the training loss picks
    the best epoch. Training stops after ``spec.patience`` epochs without
    improvement.
    """
    Xtr, ytr = np.asarray(train_set.windows, float), np.asarray(train_set.targets, float)
    if Xtr.ndim != 3 or Xtr.shape[1] != spec.timesteps or Xtr.shape[2] != spec.input_dim:
        raise RnnError(
            f"training windows {Xtr.shape} do not match spec "
            f"(timesteps={spec.timesteps}, input_dim={spec.input_dim})"
        )
    if valid_set is not None and len(valid_set.targets) == 0:
        valid_set = None
    rng = np.random.default_rng(spec.seed)
    params = init_params(spec, rng)
    model = TrainedModel(spec, params.copy(), best_epoch=0)
    if spec.epochs == 0 or len(ytr) == 0:
        return model

    opt = Adam(spec.learning_rate)
    best = np.inf
    stale = 0
    n = len(ytr)
    for epoch in range(1, spec.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, spec.batch_size):
            idx = order[start:start + spec.batch_size]
            try:
                loss, grads = loss_and_gradients(params, Xtr[idx], ytr[idx])
            except RnnError as exc:
                raise RnnError(f"training diverged at epoch {epoch}: {exc}") from None
            clip_by_global_norm(grads, spec.clip_norm)
            opt.update(params.tensors, grads)
            total += loss * len(idx)
        model.train_loss.append(total / n)
        if valid_set is not None:
            score = _rmse(params, valid_set.windows, np.asarray(valid_set.targets, float))
        else:
            score = float(np.sqrt(total / n))
        if not np.isfinite(score):
            raise RnnError(f"training diverged at epoch {epoch}: non-finite validation error")
        model.valid_rmse.append(score)
        if score < best:
            best = score
            stale = 0
            model.params = params.copy()
            model.best_epoch = epoch
        else:
            stale += 1
            if stale >= spec.patience:
                logger.debug("early stop at epoch %d (best %d)", epoch, model.best_epoch)
                break
    return model


def save_checkpoint(model: TrainedModel, path: str | Path) -> None:
    """Spec, seed and all tensors in one ``.npz``; loading is bit-exact."""
    arrays = {f"t_{k}": v for k, v in model.params.tensors.items()}
    meta = {
        "spec": asdict(model.spec),
        "best_epoch": model.best_epoch,
        "train_loss": model.train_loss,
        "valid_rmse": model.valid_rmse,
    }
    with open(path, "wb") as fh:
        np.savez(fh, _meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8), **arrays)


def load_checkpoint(path: str | Path) -> TrainedModel:
    with np.load(path) as data:
        meta = json.loads(bytes(data["_meta"]).decode())
        tensors = {k[2:]: data[k].copy() for k in data.files if k.startswith("t_")}
    spec = RnnSpec(**meta["spec"])
    return TrainedModel(
        spec, RnnParams(spec.cell, tensors), meta["best_epoch"],
        meta["train_loss"], meta["valid_rmse"],
    )
