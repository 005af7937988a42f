"""Multi-layer perceptrons trained from scratch by full-batch steepest descent.

The loss is the plain sum of squared errors (no 1/2 or 1/N
normalization), and the gradient of a single linear neuron reduces to
dL/dw = -2 e^T x and dL/db = -2 e^T 1. Deeper models apply the standard
backward recursion layer by layer. Divergence is a recorded training
outcome, not an exception: steepest descent is only stable for small
enough learning rates and the lab measures that boundary.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError, ShapeError


@dataclass(frozen=True)
class TransferFunction:
    """Elementwise activation f and its derivative f'."""

    tag: str
    apply: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]


def _tanh_derivative(n):
    t = np.tanh(n)
    return 1.0 - t * t


TRANSFERS = {
    "purelin": TransferFunction(
        tag="purelin",
        apply=lambda n: np.asarray(n, dtype=float),
        derivative=lambda n: np.ones_like(np.asarray(n, dtype=float)),
    ),
    "tanh": TransferFunction(tag="tanh", apply=np.tanh, derivative=_tanh_derivative),
}


def resolve_transfer(tag: str) -> TransferFunction:
    try:
        return TRANSFERS[tag]
    except KeyError:
        raise ParameterError(f"unknown transfer function {tag!r}") from None


@dataclass
class MlpModel:
    """Layer sizes, one weight matrix and bias vector per layer, transfer tags.

    weights[k] has shape (layer_sizes[k+1], layer_sizes[k]) and biases[k]
    has shape (layer_sizes[k+1],).
    """

    layer_sizes: tuple
    weights: list
    biases: list
    transfers: tuple

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        self.transfers = tuple(self.transfers)
        if len(self.layer_sizes) < 2 or any(s < 1 for s in self.layer_sizes):
            raise ShapeError(f"bad layer sizes {self.layer_sizes}")
        n_layers = len(self.layer_sizes) - 1
        if not (len(self.weights) == len(self.biases) == len(self.transfers) == n_layers):
            raise ShapeError("weights, biases and transfers must have one entry per layer")
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        for k in range(n_layers):
            want = (self.layer_sizes[k + 1], self.layer_sizes[k])
            if self.weights[k].shape != want:
                raise ShapeError(f"layer {k} weights must be {want}, got {self.weights[k].shape}")
            if self.biases[k].shape != (self.layer_sizes[k + 1],):
                raise ShapeError(f"layer {k} bias must be ({self.layer_sizes[k+1]},)")
        for tag in self.transfers:
            resolve_transfer(tag)

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def copy(self) -> "MlpModel":
        return MlpModel(
            layer_sizes=self.layer_sizes,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            transfers=self.transfers,
        )

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "transfers": list(self.transfers),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MlpModel":
        return cls(
            layer_sizes=tuple(doc["layer_sizes"]),
            weights=doc["weights"],
            biases=doc["biases"],
            transfers=tuple(doc["transfers"]),
        )


def default_transfers(layer_sizes) -> tuple:
    """tanh on hidden layers, purelin on the output layer."""
    n_layers = len(layer_sizes) - 1
    return tuple(["tanh"] * (n_layers - 1) + ["purelin"])


def init_mlp(layer_sizes, transfers=None, seed: int = 0, scheme: str = "uniform") -> MlpModel:
    """Build a model with seeded parameters.

    scheme "uniform" draws every weight and bias from U[-0.5, 0.5] using
    one PCG64 stream (weights before biases, layer by layer); "zeros"
    starts everything at zero.
    """
    layer_sizes = tuple(int(s) for s in layer_sizes)
    if transfers is None:
        transfers = default_transfers(layer_sizes)
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_out, fan_in in zip(layer_sizes[1:], layer_sizes[:-1]):
        if scheme == "uniform":
            weights.append(rng.uniform(-0.5, 0.5, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-0.5, 0.5, size=fan_out))
        elif scheme == "zeros":
            weights.append(np.zeros((fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        else:
            raise ParameterError(f"unknown init scheme {scheme!r}")
    return MlpModel(layer_sizes=layer_sizes, weights=weights, biases=biases, transfers=transfers)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    stop_tolerance: float
    max_epochs: int
    init_seed: int = 0
    init_scheme: str = "uniform"

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ParameterError("learning_rate must be > 0")
        if not self.stop_tolerance > 0:
            raise ParameterError("stop_tolerance must be > 0")
        if self.max_epochs < 1:
            raise ParameterError("max_epochs must be >= 1")


@dataclass
class TrainReport:
    """Per-epoch loss trace and why training stopped."""

    loss_history: list
    epochs_run: int
    stop_reason: str
    wall_time: float

    def to_dict(self) -> dict:
        return {
            "loss_history": [float(v) for v in self.loss_history],
            "epochs_run": int(self.epochs_run),
            "stop_reason": self.stop_reason,
            "wall_time": float(self.wall_time),
        }


def _as_batch(arr, width: int, name: str) -> np.ndarray:
    a = np.asarray(arr, dtype=float)
    if a.ndim == 1:
        a = a[:, None] if width == 1 else a[None, :]
    if a.ndim != 2 or a.shape[1] != width:
        raise ShapeError(f"{name} must have width {width}, got shape {np.shape(arr)}")
    return a


def forward(model: MlpModel, x) -> np.ndarray:
    """Single-sample forward pass; returns a vector of output-layer size."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != model.layer_sizes[0]:
        raise ShapeError(f"input length {x.shape[0]} != {model.layer_sizes[0]}")
    return predict_batch(model, x[None, :])[0]


def predict_batch(model: MlpModel, inputs) -> np.ndarray:
    """Forward pass over rows of inputs; returns (n_samples, n_out)."""
    a = _as_batch(inputs, model.layer_sizes[0], "inputs")
    for w, b, tag in zip(model.weights, model.biases, model.transfers):
        a = resolve_transfer(tag).apply(a @ w.T + b)
    return a


def _forward_trace(model: MlpModel, a0: np.ndarray):
    """Activations entering each layer plus the pre-activation sums."""
    activations = [a0]
    sums = []
    a = a0
    for w, b, tag in zip(model.weights, model.biases, model.transfers):
        z = a @ w.T + b
        sums.append(z)
        a = resolve_transfer(tag).apply(z)
        activations.append(a)
    return activations, sums


def loss_sse(model: MlpModel, inputs, targets) -> float:
    """Sum of squared errors over all samples and output components."""
    y = _as_batch(targets, model.layer_sizes[-1], "targets")
    out = predict_batch(model, inputs)
    if y.shape[0] != out.shape[0]:
        raise ShapeError("inputs and targets must have the same number of rows")
    e = y - out
    return float(np.sum(e * e))


def gradients(model: MlpModel, inputs, targets) -> list:
    """Per-layer (dL/dW, dL/db) for the sum-of-squared-errors loss.

    For a single linear neuron this is exactly (-2 e^T x, -2 e^T 1);
    deeper layers chain the output error backwards through f'.
    """
    a0 = _as_batch(inputs, model.layer_sizes[0], "inputs")
    y = _as_batch(targets, model.layer_sizes[-1], "targets")
    if y.shape[0] != a0.shape[0]:
        raise ShapeError("inputs and targets must have the same number of rows")
    activations, sums = _forward_trace(model, a0)
    e = y - activations[-1]
    delta = -2.0 * e * resolve_transfer(model.transfers[-1]).derivative(sums[-1])
    grads = [None] * model.n_layers
    for k in reversed(range(model.n_layers)):
        grads[k] = (delta.T @ activations[k], delta.sum(axis=0))
        if k > 0:
            delta = (delta @ model.weights[k]) * resolve_transfer(
                model.transfers[k - 1]
            ).derivative(sums[k - 1])
    return grads


def train_steepest_descent(model: MlpModel, inputs, targets, cfg: TrainConfig):
    """Full-batch steepest descent w <- w - alpha dL/dw until the loss stalls.

    Each epoch records the loss before updating; training stops when
    |loss_k - loss_{k-1}| < stop_tolerance ("converged"), when the loss
    turns non-finite ("diverged"), or at max_epochs. Returns the updated
    model copy and a TrainReport.
    """
    started = time.perf_counter()
    m = model.copy()
    x = _as_batch(inputs, m.layer_sizes[0], "inputs")
    y = _as_batch(targets, m.layer_sizes[-1], "targets")
    history: list[float] = []
    prev = math.inf
    stop_reason = "max_epochs"
    # Divergence is a recorded outcome, so let overflow run to inf quietly.
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(cfg.max_epochs):
            loss = loss_sse(m, x, y)
            history.append(loss)
            if not math.isfinite(loss):
                stop_reason = "diverged"
                break
            if abs(loss - prev) < cfg.stop_tolerance:
                stop_reason = "converged"
                break
            prev = loss
            for (w, b), (dw, db) in zip(zip(m.weights, m.biases), gradients(m, x, y)):
                w -= cfg.learning_rate * dw
                b -= cfg.learning_rate * db
    report = TrainReport(
        loss_history=history,
        epochs_run=len(history),
        stop_reason=stop_reason,
        wall_time=time.perf_counter() - started,
    )
    return m, report


def check_gradients(model: MlpModel, inputs, targets, step: float = 1e-6) -> float:
    """Worst relative gap between analytic and central-difference gradients.

    Every weight and bias is perturbed by +-step; the gap is normalized
    by max(1, |analytic|, |numeric|) so near-zero gradients are compared
    absolutely.
    """
    if not step > 0:
        raise ParameterError("step must be > 0")
    x = _as_batch(inputs, model.layer_sizes[0], "inputs")
    y = _as_batch(targets, model.layer_sizes[-1], "targets")
    analytic = gradients(model, x, y)
    worst = 0.0
    probe = model.copy()

    def central_difference(array, index):
        saved = array[index]
        array[index] = saved + step
        above = loss_sse(probe, x, y)
        array[index] = saved - step
        below = loss_sse(probe, x, y)
        array[index] = saved
        return (above - below) / (2.0 * step)

    for k in range(model.n_layers):
        dw, db = analytic[k]
        for index in np.ndindex(probe.weights[k].shape):
            numeric = central_difference(probe.weights[k], index)
            gap = abs(numeric - dw[index]) / max(1.0, abs(numeric), abs(dw[index]))
            worst = max(worst, gap)
        for i in range(probe.biases[k].shape[0]):
            numeric = central_difference(probe.biases[k], i)
            gap = abs(numeric - db[i]) / max(1.0, abs(numeric), abs(db[i]))
            worst = max(worst, gap)
    return worst
