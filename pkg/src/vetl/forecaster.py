"""Feed-forward network that predicts next-interval category frequencies from recent histograms."""

from __future__ import annotations

import base64
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ConfigError

HIDDEN = (16, 8)


class TrainingError(RuntimeError):
    pass


@dataclass(eq=False)
class ForecastModel:
    """Weights ``W[i]`` have shape (fan_in, fan_out); hidden layers use ReLU, the output softmax."""

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    seed: int = 0

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    @property
    def activations(self) -> tuple[str, ...]:
        return ("relu",) * (len(self.layer_sizes) - 2) + ("softmax",)

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "ForecastModel":
        return ForecastModel(
            self.layer_sizes, [w.copy() for w in self.weights], [b.copy() for b in self.biases], self.seed
        )

    def to_bytes(self) -> bytes:
        return b"".join(np.ascontiguousarray(p, dtype="<f8").tobytes() for p in self.params())

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "activations": list(self.activations),
            "seed": self.seed,
            "dtype": "<f8",
            "weights_b64": base64.b64encode(self.to_bytes()).decode("ascii"),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ForecastModel":
        sizes = tuple(int(s) for s in doc["layer_sizes"])
        blob = np.frombuffer(base64.b64decode(doc["weights_b64"]), dtype="<f8")
        weights, biases, pos = [], [], 0
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            w = blob[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out).astype(np.float64)
            pos += fan_in * fan_out
            b = blob[pos : pos + fan_out].astype(np.float64)
            pos += fan_out
            weights.append(w)
            biases.append(b)
        if pos != blob.size:
            raise ConfigError("forecaster weight blob does not match its layer sizes")
        return cls(sizes, weights, biases, int(doc.get("seed", 0)))


def init_model(n_inputs: int, n_outputs: int, seed: int = 0, hidden: Sequence[int] = HIDDEN) -> ForecastModel:
    sizes = (int(n_inputs), *map(int, hidden), int(n_outputs))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xF0CA]))
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return ForecastModel(sizes, weights, biases, seed)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward(model: ForecastModel, x: np.ndarray):
    acts = [x]
    pre = []
    h = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        pre.append(z)
        h = _softmax(z) if i == last else np.maximum(z, 0.0)
        acts.append(h)
    return acts, pre


def forward(model: ForecastModel, x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return _forward(model, x)[0][-1]


def predict(model: ForecastModel, histograms) -> np.ndarray:
    """Predicted category histogram for one input (``n_split`` histograms, any shape that flattens)."""
    x = np.asarray(histograms, dtype=np.float64).reshape(-1)
    if x.size != model.n_inputs:
        raise ConfigError(f"forecaster expects {model.n_inputs} inputs, got {x.size}")
    return forward(model, x)[0]


def cross_entropy(p: np.ndarray, y: np.ndarray) -> float:
    return float(-np.sum(y * np.log(np.maximum(p, 1e-300))) / len(y))


def loss_and_grads(model: ForecastModel, x: np.ndarray, y: np.ndarray):
    """Mean soft-label cross-entropy over the batch and its gradient for every parameter."""
    acts, pre = _forward(model, x)
    p = acts[-1]
    n = len(x)
    loss = cross_entropy(p, y)
    delta = (p - y) / n
    gw, gb = [None] * len(model.weights), [None] * len(model.weights)
    for i in range(len(model.weights) - 1, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ model.weights[i].T) * (pre[i - 1] > 0)
    return loss, gw, gb


def mae(model: ForecastModel, x, y) -> float:
    return float(np.mean(np.abs(forward(model, x) - np.asarray(y, dtype=np.float64))))


def _as_arrays(dataset) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(dataset, tuple) and len(dataset) == 2 and isinstance(dataset[0], np.ndarray):
        x, y = dataset
    else:
        dataset = list(dataset)
        if not dataset:
            return np.zeros((0, 0)), np.zeros((0, 0))
        x = np.array([np.asarray(inp, dtype=np.float64).reshape(-1) for inp, _ in dataset])
        y = np.array([np.asarray(lab, dtype=np.float64) for _, lab in dataset])
    return np.asarray(x, dtype=np.float64).reshape(len(x), -1), np.asarray(y, dtype=np.float64)


@dataclass
class History:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_mae: list[float] = field(default_factory=list)
    best_epoch: int = -1


def _sgd_epochs(model, x, y, idx_train, idx_val, epochs, rng, batch_size, lr, momentum, history):
    velocity = [np.zeros_like(p) for p in model.params()]
    best = (np.inf, model.copy())
    for epoch in range(epochs):
        order = idx_train[rng.permutation(len(idx_train))]
        for start in range(0, len(order), batch_size):
            b = order[start : start + batch_size]
            _, gw, gb = loss_and_grads(model, x[b], y[b])
            grads = [g for pair in zip(gw, gb) for g in pair]
            for p, v, g in zip(model.params(), velocity, grads):
                v *= momentum
                v -= lr * g
                p += v
        train_loss = cross_entropy(forward(model, x[idx_train]), y[idx_train])
        if len(idx_val):
            val_loss = cross_entropy(forward(model, x[idx_val]), y[idx_val])
            val_mae = mae(model, x[idx_val], y[idx_val])
        else:
            val_loss, val_mae = train_loss, mae(model, x[idx_train], y[idx_train])
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise TrainingError(f"non-finite loss at epoch {epoch}")
        history.train_loss.append(train_loss)
        history.val_loss.append(val_loss)
        history.val_mae.append(val_mae)
        if val_loss < best[0]:
            best = (val_loss, model.copy())
            history.best_epoch = epoch
    return best[1]


def train(
    model: ForecastModel,
    dataset,
    epochs: int = 40,
    val_fraction: float = 0.2,
    seed: int = 0,
    batch_size: int = 32,
    learning_rate: float = 1e-3,
    momentum: float = 0.9,
) -> tuple[ForecastModel, History]:
    """Mini-batch momentum SGD on cross-entropy; returns the lowest-validation-loss snapshot.

    The input model is not modified.
    """
    x, y = _as_arrays(dataset)
    if len(x) == 0:
        raise TrainingError("empty dataset")
    if len(x) < 10:
        raise TrainingError(f"need at least 10 samples, got {len(x)}")
    if x.shape[1] != model.n_inputs or y.shape[1] != model.n_outputs:
        raise ConfigError("dataset dimensions do not match the model")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x7EA1]))
    perm = rng.permutation(len(x))
    n_val = max(1, int(round(val_fraction * len(x))))
    idx_val, idx_train = np.sort(perm[:n_val]), np.sort(perm[n_val:])
    history = History()
    best = _sgd_epochs(model.copy(), x, y, idx_train, idx_val, epochs, rng, batch_size, learning_rate, momentum, history)
    return best, history


def fine_tune(
    model: ForecastModel,
    recent,
    epochs: int = 1,
    seed: int = 0,
    batch_size: int = 32,
    learning_rate: float = 1e-3,
    momentum: float = 0.9,
) -> ForecastModel:
    """Warm-started training on recent samples, all of them used for fitting; empty input is a no-op."""
    x, y = _as_arrays(recent)
    if len(x) == 0:
        return model
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xF17E]))
    idx = np.arange(len(x))
    history = History()
    tuned = model.copy()
    _sgd_epochs(tuned, x, y, idx, np.array([], dtype=int), epochs, rng, batch_size, learning_rate, momentum, history)
    # no validation split here: keep the final weights
    return tuned


def gradient_check(model: ForecastModel, sample, h: float = 1e-5, floor: float = 1e-6) -> float:
    """Max relative difference between backprop and central finite differences over all parameters.

    Relative error is ``|a - n| / max(|a|, |n|, floor)``; ``floor`` keeps near-zero
    gradients from turning round-off into huge ratios.
    """
    x, y = sample
    x = np.atleast_2d(np.asarray(x, dtype=np.float64).reshape(1, -1) if np.ndim(x) <= 1 else x)
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    probe = model.copy()
    _, gw, gb = loss_and_grads(probe, x, y)
    analytic = [g for pair in zip(gw, gb) for g in pair]
    worst = 0.0
    for p, g in zip(probe.params(), analytic):
        flat, gflat = p.reshape(-1), g.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            up = cross_entropy(forward(probe, x), y)
            flat[j] = orig - h
            down = cross_entropy(forward(probe, x), y)
            flat[j] = orig
            num = (up - down) / (2 * h)
            err = abs(gflat[j] - num) / max(abs(gflat[j]), abs(num), floor)
            worst = max(worst, err)
    return worst
