"""Dense autoencoder for feature reduction, trained with Adadelta on MSE.

The default stack is 135-128-64-32-64-128-135 with ReLU everywhere except
a Tanh output; the 32-wide bottleneck is the reduced feature space.
Written directly on numpy so training is deterministic for a given seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ShapeError

DEFAULT_LAYER_SIZES = (135, 128, 64, 32, 64, 128, 135)


@dataclass(frozen=True)
class AeConfig:
    layer_sizes: tuple[int, ...] = DEFAULT_LAYER_SIZES
    activations: tuple[str, ...] | None = None  # None: ReLU stack with Tanh output
    epochs: int = 200
    batch_size: int = 32
    rho: float = 0.95
    epsilon: float = 1e-6

    def __post_init__(self):
        if len(self.layer_sizes) < 3:
            raise ConfigurationError("need at least input, bottleneck and output layers")
        if self.layer_sizes[0] != self.layer_sizes[-1]:
            raise ConfigurationError(
                f"first and last layer must match for reconstruction, "
                f"got {self.layer_sizes[0]} and {self.layer_sizes[-1]}"
            )
        if any(s < 1 for s in self.layer_sizes):
            raise ConfigurationError("layer sizes must be positive")
        acts = self.activations
        if acts is None:
            acts = ("relu",) * (len(self.layer_sizes) - 2) + ("tanh",)
            object.__setattr__(self, "activations", acts)
        if len(acts) != len(self.layer_sizes) - 1:
            raise ConfigurationError("one activation per dense layer required")
        if any(a not in ("relu", "tanh", "linear") for a in acts):
            raise ConfigurationError(f"unknown activation in {acts}")
        if self.epochs < 0 or self.batch_size < 1:
            raise ConfigurationError("epochs must be >= 0 and batch_size >= 1")
        if not (0 < self.rho < 1) or self.epsilon <= 0:
            raise ConfigurationError("need 0 < rho < 1 and epsilon > 0")

    @property
    def bottleneck_index(self) -> int:
        """Index (into layer_sizes) of the narrowest layer."""
        return int(np.argmin(self.layer_sizes))


@dataclass
class AeModel:
    config: AeConfig
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    history: list[float] = field(default_factory=list)

    def parameter_counts(self) -> list[int]:
        return [w.size + b.size for w, b in zip(self.weights, self.biases)]

    def copy(self) -> "AeModel":
        return AeModel(
            config=self.config,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            history=list(self.history),
        )


def init_model(config: AeConfig, seed: int = 0) -> AeModel:
    """Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(config.layer_sizes[:-1], config.layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return AeModel(config=config, weights=weights, biases=biases)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    return z


def _activation_grad(a: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (a > 0.0).astype(np.float64)
    if kind == "tanh":
        return 1.0 - a * a
    return np.ones_like(a)


def _forward_all(model: AeModel, x: np.ndarray) -> list[np.ndarray]:
    """Post-activation output of every layer, input included."""
    acts = [x]
    for w, b, kind in zip(model.weights, model.biases, model.config.activations):
        acts.append(_activate(acts[-1] @ w + b, kind))
    return acts


def reconstruct(model: AeModel, rows: np.ndarray) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    _check_width(model, rows)
    return _forward_all(model, rows)[-1]


def encode(model: AeModel, rows: np.ndarray) -> np.ndarray:
    """Forward pass up to and including the bottleneck layer."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    _check_width(model, rows)
    out = rows
    for i in range(model.config.bottleneck_index):
        out = _activate(out @ model.weights[i] + model.biases[i], model.config.activations[i])
    return out


def _check_width(model: AeModel, rows: np.ndarray) -> None:
    expected = model.config.layer_sizes[0]
    if rows.shape[1] != expected:
        raise ShapeError(f"expected rows of width {expected}, got {rows.shape[1]}")


def mse(model: AeModel, rows: np.ndarray) -> float:
    out = reconstruct(model, rows)
    return float(np.mean((out - rows) ** 2))


def _gradients(model: AeModel, batch: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray], float]:
    acts = _forward_all(model, batch)
    out = acts[-1]
    diff = out - batch
    loss = float(np.mean(diff**2))
    # dL/d(out) for L = mean over batch and features
    delta = (2.0 / diff.size) * diff
    grads_w: list[np.ndarray] = [None] * len(model.weights)
    grads_b: list[np.ndarray] = [None] * len(model.biases)
    for layer in range(len(model.weights) - 1, -1, -1):
        delta = delta * _activation_grad(acts[layer + 1], model.config.activations[layer])
        grads_w[layer] = acts[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer:
            delta = delta @ model.weights[layer].T
    return grads_w, grads_b, loss


def train(model: AeModel, data: np.ndarray, epochs: int | None = None,
          batch_size: int | None = None, seed: int = 0) -> AeModel:
    """Mini-batch Adadelta; returns a trained copy, per-epoch MSE appended.

    Batches are reshuffled every epoch from the given seed. A NaN loss
    aborts with the offending epoch/batch in the message.
    """
    cfg = model.config
    epochs = cfg.epochs if epochs is None else epochs
    batch_size = cfg.batch_size if batch_size is None else batch_size
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    _check_width(model, data)

    model = model.copy()
    if epochs == 0:
        return model
    rng = np.random.default_rng(seed)
    acc_grad_w = [np.zeros_like(w) for w in model.weights]
    acc_grad_b = [np.zeros_like(b) for b in model.biases]
    acc_step_w = [np.zeros_like(w) for w in model.weights]
    acc_step_b = [np.zeros_like(b) for b in model.biases]

    def adadelta(param, grad, acc_grad, acc_step):
        acc_grad *= cfg.rho
        acc_grad += (1.0 - cfg.rho) * grad * grad
        step = -np.sqrt((acc_step + cfg.epsilon) / (acc_grad + cfg.epsilon)) * grad
        acc_step *= cfg.rho
        acc_step += (1.0 - cfg.rho) * step * step
        param += step

    n = data.shape[0]
    for epoch in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for batch_no, start in enumerate(range(0, n, batch_size)):
            batch = data[order[start:start + batch_size]]
            grads_w, grads_b, loss = _gradients(model, batch)
            if not np.isfinite(loss):
                raise RuntimeError(f"NaN loss at epoch {epoch}, batch {batch_no}")
            epoch_loss += loss * batch.shape[0]
            for i in range(len(model.weights)):
                adadelta(model.weights[i], grads_w[i], acc_grad_w[i], acc_step_w[i])
                adadelta(model.biases[i], grads_b[i], acc_grad_b[i], acc_step_b[i])
        model.history.append(epoch_loss / n)
    return model


def gradient_check(model: AeModel, rows: np.ndarray, n_samples: int = 200,
                   step: float = 1e-5, seed: int = 0) -> float:
    """Max relative error of backprop gradients vs central finite differences."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    grads_w, grads_b, _ = _gradients(model, rows)
    tensors = list(zip(model.weights, grads_w)) + list(zip(model.biases, grads_b))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        t = rng.integers(len(tensors))
        param, grad = tensors[t]
        flat_idx = rng.integers(param.size)
        idx = np.unravel_index(flat_idx, param.shape)
        keep = param[idx]
        param[idx] = keep + step
        up = np.mean((_forward_all(model, rows)[-1] - rows) ** 2)
        param[idx] = keep - step
        down = np.mean((_forward_all(model, rows)[-1] - rows) ** 2)
        param[idx] = keep
        numeric = (up - down) / (2.0 * step)
        denom = max(abs(numeric), abs(grad[idx]), 1e-8)
        worst = max(worst, abs(numeric - grad[idx]) / denom)
    return worst


def save_model(model: AeModel, path: str | Path) -> None:
    arrays = {"format_version": np.array([1]),
              "layer_sizes": np.asarray(model.config.layer_sizes),
              "activations": np.asarray(model.config.activations),
              "history": np.asarray(model.history)}
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    np.savez(path, **arrays)


def load_model(path: str | Path) -> AeModel:
    with np.load(path, allow_pickle=False) as data:
        if int(data["format_version"][0]) != 1:
            raise ConfigurationError(f"unsupported model format in {path}")
        sizes = tuple(int(s) for s in data["layer_sizes"])
        acts = tuple(str(a) for a in data["activations"])
        config = AeConfig(layer_sizes=sizes, activations=acts)
        n_layers = len(sizes) - 1
        weights = [data[f"w{i}"] for i in range(n_layers)]
        biases = [data[f"b{i}"] for i in range(n_layers)]
        history = [float(v) for v in data["history"]]
    return AeModel(config=config, weights=weights, biases=biases, history=history)


def write_history_csv(model: AeModel, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mse"])
        for i, value in enumerate(model.history):
            writer.writerow([i, f"{value:.12g}"])
