"""Bounded-weight ReLU feedforward networks trained on the hinge loss.

A network with L hidden layers applies weight matrices W_0..W_L and shift
activations between them: the output is W_L s_{V_L}(W_{L-1} ... s_{V_1}(W_0 x))
where s_V(y) = relu(y - V) componentwise.  The final layer has no shift and
no activation.  Membership in the model class requires every entry of every
weight matrix and shift vector to have magnitude at most the bound B;
training enforces this by clipping after every update, which is the exact
projection onto the constraint set.

Subgradient conventions: the hinge derivative is -1 for margin < 1 and 0 at
and beyond the kink; the ReLU derivative is 0 at 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .fpca import ScoreMatrix

__all__ = [
    "NetworkArchitecture",
    "NetworkParams",
    "NetworkGradient",
    "TrainConfig",
    "forward",
    "forward_many",
    "hinge_risk",
    "subgradient",
    "train",
    "train_trace",
]


@dataclass(frozen=True)
class NetworkArchitecture:
    """Shape and sup-norm bound of the network class."""

    input_dim: int
    depth: int
    widths: tuple[int, ...]
    bound: float

    def __post_init__(self) -> None:
        if self.input_dim < 1:
            raise InvalidArgumentError(f"input_dim must be >= 1, got {self.input_dim}")
        if self.depth < 1:
            raise InvalidArgumentError(f"depth must be >= 1, got {self.depth}")
        widths = tuple(int(w) for w in self.widths)
        if len(widths) != self.depth or any(w < 1 for w in widths):
            raise InvalidArgumentError("widths must list one positive integer per hidden layer")
        object.__setattr__(self, "widths", widths)
        if not (math.isfinite(self.bound) and self.bound > 0):
            raise InvalidArgumentError(f"bound must be a finite positive number, got {self.bound}")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        """(input_dim, p_1, ..., p_L, 1)."""
        return (self.input_dim, *self.widths, 1)


@dataclass(frozen=True)
class NetworkParams:
    """Weight matrices W_0..W_L and shift vectors V_1..V_L with entries in [-bound, bound]."""

    weights: tuple[np.ndarray, ...]
    shifts: tuple[np.ndarray, ...]
    bound: float

    def __post_init__(self) -> None:
        weights = tuple(np.array(w, dtype=float) for w in self.weights)
        shifts = tuple(np.array(v, dtype=float) for v in self.shifts)
        if len(weights) != len(shifts) + 1:
            raise InvalidArgumentError("need exactly one more weight matrix than shift vectors")
        if not (math.isfinite(self.bound) and self.bound > 0):
            raise InvalidArgumentError(f"bound must be a finite positive number, got {self.bound}")
        for l, w in enumerate(weights):
            if w.ndim != 2:
                raise InvalidArgumentError(f"weight {l} must be a matrix")
            if l > 0 and w.shape[1] != weights[l - 1].shape[0]:
                raise InvalidArgumentError(f"weight {l} input size does not chain with weight {l - 1}")
        if weights[-1].shape[0] != 1:
            raise InvalidArgumentError("final weight matrix must have a single output row")
        for l, v in enumerate(shifts):
            if v.shape != (weights[l].shape[0],):
                raise InvalidArgumentError(f"shift {l + 1} must match the width of layer {l + 1}")
        largest = max(float(np.max(np.abs(a))) for a in (*weights, *shifts))
        if largest > self.bound:
            raise InvalidArgumentError(f"entry magnitude {largest!r} exceeds the bound {self.bound!r}")
        for a in (*weights, *shifts):
            a.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "shifts", shifts)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def depth(self) -> int:
        return len(self.shifts)


@dataclass(frozen=True)
class NetworkGradient:
    """Subgradient arrays shaped like the corresponding NetworkParams."""

    weights: tuple[np.ndarray, ...]
    shifts: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings: geometric learning-rate decay, mini-batches, seeded init."""

    learning_rate: float = 0.05
    lr_decay: float = 0.97
    epochs: int = 40
    batch_size: int = 32
    seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self) -> None:
        if not (self.learning_rate > 0 and self.lr_decay > 0 and self.init_scale > 0):
            raise InvalidArgumentError("learning_rate, lr_decay and init_scale must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise InvalidArgumentError("epochs and batch_size must be positive integers")


def _forward_arrays(
    weights: tuple[np.ndarray, ...] | list[np.ndarray],
    shifts: tuple[np.ndarray, ...] | list[np.ndarray],
    x: np.ndarray,
) -> tuple[list[np.ndarray], list[np.ndarray], np.ndarray]:
    """Batch forward pass; returns activations, pre-shift inputs and outputs."""
    activations = [x]
    pre_shift = []
    a = x
    for w, v in zip(weights[:-1], shifts):
        z = a @ w.T
        pre_shift.append(z)
        a = np.maximum(z - v, 0.0)
        activations.append(a)
    out = a @ weights[-1].T
    return activations, pre_shift, out[:, 0]


def forward(params: NetworkParams, x: np.ndarray) -> float:
    """Scalar network output for a single input vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (params.input_dim,):
        raise InvalidArgumentError(f"input must have length {params.input_dim}, got shape {x.shape}")
    _, _, out = _forward_arrays(params.weights, params.shifts, x[None, :])
    return float(out[0])


def forward_many(params: NetworkParams, x: np.ndarray) -> np.ndarray:
    """Network outputs for each row of an (n, J) input matrix."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise InvalidArgumentError(f"inputs must be (n, {params.input_dim}), got shape {x.shape}")
    _, _, out = _forward_arrays(params.weights, params.shifts, x)
    return out


def _hinge(margins: np.ndarray) -> np.ndarray:
    return np.maximum(1.0 - margins, 0.0)


def hinge_risk(params: NetworkParams, scores: ScoreMatrix) -> float:
    """Empirical hinge risk of the network on labeled scores."""
    if scores.labels is None:
        raise InvalidArgumentError("hinge risk needs labeled scores")
    margins = forward_many(params, scores.scores) * scores.labels
    return float(_hinge(margins).mean())


def _backprop(
    weights: list[np.ndarray],
    shifts: list[np.ndarray],
    x: np.ndarray,
    y: np.ndarray,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Batch-average hinge-risk subgradient via backpropagation."""
    activations, pre_shift, out = _forward_arrays(weights, shifts, x)
    margins = out * y
    # d(hinge)/d(out) is -y on the active branch, 0 at the kink and beyond
    g = np.where(margins < 1.0, -y, 0.0) / x.shape[0]
    grad_w: list[np.ndarray] = [np.empty(0)] * len(weights)
    grad_v: list[np.ndarray] = [np.empty(0)] * len(shifts)
    current = g[:, None]
    grad_w[-1] = current.T @ activations[-1]
    for l in range(len(shifts), 0, -1):
        upstream = current @ weights[l]
        gate = (pre_shift[l - 1] - shifts[l - 1]) > 0.0
        current = upstream * gate
        grad_v[l - 1] = -current.sum(axis=0)
        grad_w[l - 1] = current.T @ activations[l - 1]
    return grad_w, grad_v


def subgradient(params: NetworkParams, batch: ScoreMatrix) -> NetworkGradient:
    """Subgradient of the batch-average hinge risk, shaped like params."""
    if batch.labels is None:
        raise InvalidArgumentError("subgradient needs labeled scores")
    if batch.truncation != params.input_dim:
        raise InvalidArgumentError(
            f"score dimension {batch.truncation} does not match network input {params.input_dim}"
        )
    gw, gv = _backprop(list(params.weights), list(params.shifts), batch.scores, batch.labels.astype(float))
    return NetworkGradient(weights=tuple(gw), shifts=tuple(gv))


def _initial_arrays(
    arch: NetworkArchitecture, cfg: TrainConfig, rng: np.random.Generator
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    sizes = arch.layer_sizes
    weights = []
    shifts = []
    for l in range(arch.depth + 1):
        fan_in, fan_out = sizes[l], sizes[l + 1]
        scale = min(arch.bound, cfg.init_scale * math.sqrt(6.0 / (fan_in + fan_out)))
        weights.append(rng.uniform(-scale, scale, size=(fan_out, fan_in)))
        if l < arch.depth:
            shifts.append(rng.uniform(-scale, scale, size=fan_out))
    return weights, shifts


def _full_risk(weights: list[np.ndarray], shifts: list[np.ndarray], x: np.ndarray, y: np.ndarray) -> float:
    _, _, out = _forward_arrays(weights, shifts, x)
    return float(_hinge(out * y).mean())


def train_trace(
    scores: ScoreMatrix, arch: NetworkArchitecture, cfg: TrainConfig
) -> tuple[NetworkParams, list[float]]:
    """Projected mini-batch subgradient descent; also returns the epoch-end risks.

    The trace starts with the risk of the initial parameters.  The returned
    parameters are the epoch-end iterate with the smallest full-sample hinge
    risk, so the final risk never exceeds the initial one.  The run is
    deterministic given the seed.
    """
    if scores.labels is None:
        raise InvalidArgumentError("training needs labeled scores")
    if scores.truncation != arch.input_dim:
        raise InvalidArgumentError(
            f"score dimension {scores.truncation} does not match network input {arch.input_dim}"
        )
    rng = np.random.default_rng(cfg.seed)
    weights, shifts = _initial_arrays(arch, cfg, rng)
    x = scores.scores
    y = scores.labels.astype(float)
    n = x.shape[0]
    bound = arch.bound

    best_risk = _full_risk(weights, shifts, x, y)
    best = ([w.copy() for w in weights], [v.copy() for v in shifts])
    trace = [best_risk]
    for epoch in range(cfg.epochs):
        rate = cfg.learning_rate * cfg.lr_decay**epoch
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            gw, gv = _backprop(weights, shifts, x[idx], y[idx])
            for w, g in zip(weights, gw):
                w -= rate * g
                np.clip(w, -bound, bound, out=w)
            for v, g in zip(shifts, gv):
                v -= rate * g
                np.clip(v, -bound, bound, out=v)
        risk = _full_risk(weights, shifts, x, y)
        trace.append(risk)
        if risk < best_risk:
            best_risk = risk
            best = ([w.copy() for w in weights], [v.copy() for v in shifts])
    params = NetworkParams(weights=tuple(best[0]), shifts=tuple(best[1]), bound=bound)
    return params, trace


def train(scores: ScoreMatrix, arch: NetworkArchitecture, cfg: TrainConfig) -> NetworkParams:
    """Approximate hinge-risk minimizer over the bounded network class."""
    params, _ = train_trace(scores, arch, cfg)
    return params
