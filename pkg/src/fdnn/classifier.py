"""End-to-end classifiers on projection scores.

The main pipeline estimates one pooled eigensystem from all labeled
training functions, projects to scores, and selects the network shape
(depth L, truncation J, width, bound B) by a stratified 80/20 data split:
each candidate trains on the larger part and is scored by its sign error
on the held-out part; the winner (ties resolved toward the smallest
J, L, width, B) is retrained on all samples.

Two reference classifiers operate on the same scores: Gaussian QDA with
diagonal covariances, and a naive Bayes rule with per-coordinate Gaussian
kernel density estimates (Silverman bandwidth).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .dnn import NetworkArchitecture, NetworkParams, TrainConfig, forward_many, train
from .errors import (
    DegenerateDataError,
    EmptyClassError,
    IncompatibleGridsError,
    InsufficientDataError,
    InvalidArgumentError,
)
from .fpca import EigenSystem, ScoreMatrix, fit_eigensystem, project_scores
from .grid import FunctionalObservation, grids_equal

__all__ = [
    "Candidate",
    "HyperGrid",
    "SelectionRecord",
    "FDNNModel",
    "QDAModel",
    "NPBayesModel",
    "default_hyper_grid",
    "fit_fdnn",
    "predict_fdnn",
    "predict_fdnn_many",
    "fit_qda",
    "predict_qda",
    "predict_qda_many",
    "fit_npbayes",
    "predict_npbayes",
    "predict_npbayes_many",
    "misclassification_rate",
]


class Candidate(NamedTuple):
    """One network-shape candidate: (depth, truncation, width, bound)."""

    depth: int
    truncation: int
    width: int
    bound: float


@dataclass(frozen=True)
class HyperGrid:
    """Nonempty set of candidate tuples; one width value per candidate."""

    candidates: tuple[Candidate, ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            raise InvalidArgumentError("hyper grid must contain at least one candidate")
        object.__setattr__(self, "candidates", tuple(Candidate(*c) for c in self.candidates))


class SelectionRecord(NamedTuple):
    """Validation error of one candidate on the held-out part."""

    candidate: Candidate
    error: float


@dataclass(frozen=True)
class FDNNModel:
    """Fitted pipeline: eigensystem, selected truncation, trained network."""

    eigensystem: EigenSystem
    truncation: int
    params: NetworkParams
    selection: tuple[SelectionRecord, ...]
    selected: Candidate

    def __post_init__(self) -> None:
        if self.params.input_dim != self.truncation:
            raise InvalidArgumentError("network input dimension must equal the selected truncation")
        if not 1 <= self.truncation <= self.eigensystem.count:
            raise InvalidArgumentError("truncation exceeds the retained eigenpairs")


def default_hyper_grid(n: int, max_truncation: int | None = None) -> HyperGrid:
    """Desk-scale candidate grid with depth tied to log(sample size).

    Depths are round(log n) and its predecessor (at least 1); widths
    {8, 16, 32}; truncations {2, 4, 6, 10} capped at max_truncation;
    bounds {10, 100}.
    """
    if n < 2:
        raise InvalidArgumentError("need at least 2 samples")
    log_n = round(math.log(n))
    depths = sorted({max(1, log_n - 1), max(1, log_n)})
    truncations = [2, 4, 6, 10]
    if max_truncation is not None:
        truncations = [j for j in truncations if j <= max_truncation]
        if not truncations:
            truncations = [max_truncation]
    candidates = [
        Candidate(depth, j, width, bound)
        for depth in depths
        for j in truncations
        for width in (8, 16, 32)
        for bound in (10.0, 100.0)
    ]
    return HyperGrid(candidates=tuple(candidates))


def _stratified_split(labels: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """80/20 index split keeping both labels in each part."""
    rng = np.random.default_rng(seed)
    fit_part: list[np.ndarray] = []
    holdout: list[np.ndarray] = []
    for label in (-1, 1):
        idx = np.flatnonzero(labels == label)
        if idx.size < 2:
            raise InsufficientDataError(f"class {label} needs at least 2 samples for the split")
        perm = rng.permutation(idx)
        k = min(max(int(round(0.8 * idx.size)), 1), idx.size - 1)
        fit_part.append(perm[:k])
        holdout.append(perm[k:])
    return np.sort(np.concatenate(fit_part)), np.sort(np.concatenate(holdout))


def _canonical_order(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort rows lexicographically so training ignores sample order."""
    keys = np.column_stack([scores, labels])
    order = np.lexsort(keys.T[::-1])
    return scores[order], labels[order]


def fit_fdnn(
    samples: Sequence[FunctionalObservation],
    hyper: HyperGrid,
    cfg: TrainConfig,
    split_seed: int,
) -> FDNNModel:
    """Fit the full pipeline with data-split candidate selection.

    The eigensystem is estimated from all samples; the 80/20 split happens
    at the score level.  Every candidate's held-out error is returned in
    the selection report.
    """
    if len(samples) < 10:
        raise InsufficientDataError(f"need at least 10 samples, got {len(samples)}")
    if any(s.label is None for s in samples):
        raise InvalidArgumentError("all training samples must be labeled")
    labels = np.array([s.label for s in samples])
    for label in (-1, 1):
        if not np.any(labels == label):
            raise EmptyClassError(f"no samples with label {label}")
    eig = fit_eigensystem(samples)
    max_j = max(c.truncation for c in hyper.candidates)
    if max_j > eig.count:
        raise InvalidArgumentError(
            f"candidate truncation {max_j} exceeds the {eig.count} retained eigenpairs"
        )
    full = project_scores(samples, eig, max_j)
    fit_idx, holdout_idx = _stratified_split(full.labels, split_seed)

    records = []
    for cand in hyper.candidates:
        arch = NetworkArchitecture(
            input_dim=cand.truncation,
            depth=cand.depth,
            widths=(cand.width,) * cand.depth,
            bound=cand.bound,
        )
        x, y = _canonical_order(full.scores[fit_idx, : cand.truncation], full.labels[fit_idx])
        params = train(ScoreMatrix(scores=x, labels=y), arch, cfg)
        margins = forward_many(params, full.scores[holdout_idx, : cand.truncation]) * full.labels[holdout_idx]
        records.append(SelectionRecord(cand, float(np.mean(margins < 0.0))))

    best = min(
        records,
        key=lambda r: (r.error, r.candidate.truncation, r.candidate.depth, r.candidate.width, r.candidate.bound),
    )
    winner = best.candidate
    arch = NetworkArchitecture(
        input_dim=winner.truncation,
        depth=winner.depth,
        widths=(winner.width,) * winner.depth,
        bound=winner.bound,
    )
    x, y = _canonical_order(full.scores[:, : winner.truncation], full.labels)
    params = train(ScoreMatrix(scores=x, labels=y), arch, cfg)
    return FDNNModel(
        eigensystem=eig,
        truncation=winner.truncation,
        params=params,
        selection=tuple(records),
        selected=winner,
    )


def predict_fdnn_many(model: FDNNModel, samples: Sequence[FunctionalObservation]) -> np.ndarray:
    """Predicted labels for observations on the model's grid."""
    for s in samples:
        if not grids_equal(s.grid, model.eigensystem.grid):
            raise IncompatibleGridsError("observation grid does not match the model grid")
    scores = project_scores(samples, model.eigensystem, model.truncation).scores
    return np.where(forward_many(model.params, scores) >= 0.0, 1, -1)


def predict_fdnn(model: FDNNModel, x: FunctionalObservation) -> int:
    """Sign rule on the network output; exact zero maps to +1."""
    return int(predict_fdnn_many(model, [x])[0])


@dataclass(frozen=True)
class QDAModel:
    """Per-class score means and diagonal variances with log priors."""

    mean_pos: np.ndarray
    var_pos: np.ndarray
    mean_neg: np.ndarray
    var_neg: np.ndarray
    log_prior_pos: float
    log_prior_neg: float

    def __post_init__(self) -> None:
        for name in ("mean_pos", "var_pos", "mean_neg", "var_neg"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise InvalidArgumentError(f"{name} must be a vector")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.mean_pos.shape == self.var_pos.shape == self.mean_neg.shape == self.var_neg.shape):
            raise InvalidArgumentError("per-class parameter vectors must share one length")
        if np.any(self.var_pos <= 0) or np.any(self.var_neg <= 0):
            raise InvalidArgumentError("variances must be positive")


def fit_qda(scores: ScoreMatrix) -> QDAModel:
    """Gaussian QDA with diagonal covariances on the scores."""
    if scores.labels is None:
        raise InvalidArgumentError("QDA needs labeled scores")
    per_class = {}
    for label in (-1, 1):
        rows = scores.scores[scores.labels == label]
        if rows.shape[0] == 0:
            raise EmptyClassError(f"no samples with label {label}")
        if rows.shape[0] < 2:
            raise InsufficientDataError(f"class {label} needs at least 2 samples for variances")
        var = rows.var(axis=0, ddof=1)
        if np.any(var <= 0):
            warnings.warn("zero score variance; flooring at 1e-12", stacklevel=2)
            var = np.maximum(var, 1e-12)
        per_class[label] = (rows.mean(axis=0), var, math.log(rows.shape[0] / scores.n))
    return QDAModel(
        mean_pos=per_class[1][0],
        var_pos=per_class[1][1],
        mean_neg=per_class[-1][0],
        var_neg=per_class[-1][1],
        log_prior_pos=per_class[1][2],
        log_prior_neg=per_class[-1][2],
    )


def _gaussian_loglik(x: np.ndarray, mean: np.ndarray, var: np.ndarray) -> np.ndarray:
    return np.sum(-0.5 * np.log(2.0 * np.pi * var) - (x - mean) ** 2 / (2.0 * var), axis=1)


def predict_qda_many(model: QDAModel, x: np.ndarray) -> np.ndarray:
    """Labels from the larger Gaussian log posterior; ties go to +1."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.mean_pos.size:
        raise InvalidArgumentError(f"scores must be (m, {model.mean_pos.size})")
    lp = model.log_prior_pos + _gaussian_loglik(x, model.mean_pos, model.var_pos)
    ln = model.log_prior_neg + _gaussian_loglik(x, model.mean_neg, model.var_neg)
    return np.where(lp >= ln, 1, -1)


def predict_qda(model: QDAModel, x: np.ndarray) -> int:
    return int(predict_qda_many(model, np.asarray(x, dtype=float)[None, :])[0])


@dataclass(frozen=True)
class NPBayesModel:
    """Per-class, per-coordinate kernel density estimates with log priors."""

    points_pos: tuple[np.ndarray, ...]
    points_neg: tuple[np.ndarray, ...]
    bandwidths_pos: np.ndarray
    bandwidths_neg: np.ndarray
    log_prior_pos: float
    log_prior_neg: float

    def __post_init__(self) -> None:
        for name in ("bandwidths_pos", "bandwidths_neg"):
            arr = np.array(getattr(self, name), dtype=float)
            if np.any(arr <= 0):
                raise InvalidArgumentError("bandwidths must be positive")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        for name in ("points_pos", "points_neg"):
            object.__setattr__(
                self, name, tuple(np.array(p, dtype=float) for p in getattr(self, name))
            )


def fit_npbayes(scores: ScoreMatrix) -> NPBayesModel:
    """Product of per-coordinate Gaussian-kernel KDEs with Silverman bandwidths."""
    if scores.labels is None:
        raise InvalidArgumentError("the KDE classifier needs labeled scores")
    per_class = {}
    for label in (-1, 1):
        rows = scores.scores[scores.labels == label]
        m = rows.shape[0]
        if m < 5:
            raise InsufficientDataError(f"class {label} needs at least 5 samples, got {m}")
        sd = rows.std(axis=0, ddof=1)
        bandwidths = 1.06 * sd * m ** (-1.0 / 5.0)
        if np.any(bandwidths <= 0):
            raise DegenerateDataError(f"class {label} has a zero-spread coordinate (bandwidth 0)")
        per_class[label] = (tuple(rows[:, j].copy() for j in range(rows.shape[1])), bandwidths, math.log(m / scores.n))
    return NPBayesModel(
        points_pos=per_class[1][0],
        points_neg=per_class[-1][0],
        bandwidths_pos=per_class[1][1],
        bandwidths_neg=per_class[-1][1],
        log_prior_pos=per_class[1][2],
        log_prior_neg=per_class[-1][2],
    )


def _kde_loglik(x: np.ndarray, points: tuple[np.ndarray, ...], bandwidths: np.ndarray) -> np.ndarray:
    total = np.zeros(x.shape[0])
    for j, (pts, h) in enumerate(zip(points, bandwidths)):
        u = (x[:, j, None] - pts[None, :]) / h
        total += logsumexp(-0.5 * u**2, axis=1) - math.log(pts.size * h * math.sqrt(2.0 * math.pi))
    return total


def predict_npbayes_many(model: NPBayesModel, x: np.ndarray) -> np.ndarray:
    """Labels from the larger KDE log posterior; ties go to +1."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != len(model.points_pos):
        raise InvalidArgumentError(f"scores must be (m, {len(model.points_pos)})")
    lp = model.log_prior_pos + _kde_loglik(x, model.points_pos, model.bandwidths_pos)
    ln = model.log_prior_neg + _kde_loglik(x, model.points_neg, model.bandwidths_neg)
    return np.where(lp >= ln, 1, -1)


def predict_npbayes(model: NPBayesModel, x: np.ndarray) -> int:
    return int(predict_npbayes_many(model, np.asarray(x, dtype=float)[None, :])[0])


def misclassification_rate(predictions: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of label disagreements."""
    preds = np.asarray(predictions)
    actual = np.asarray(truth)
    if preds.shape != actual.shape or preds.ndim != 1 or preds.size == 0:
        raise InvalidArgumentError("predictions and truth must be equal-length nonempty vectors")
    return float(np.mean(preds != actual))
