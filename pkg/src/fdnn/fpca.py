"""Empirical covariance estimation, weighted eigenproblem and score projection.

The covariance matrix C on an N-point grid discretizes a covariance
function.  The continuous eigenproblem under the quadrature inner product
is solved by forming A = W^{1/2} C W^{1/2} with W the diagonal weight
matrix, taking the symmetric eigendecomposition of A, and rescaling the
eigenvectors by W^{-1/2}; the resulting eigenfunctions are orthonormal
under the grid quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyClassError,
    InsufficientDataError,
    InvalidArgumentError,
    NumericalFailureError,
)
from .grid import FunctionalObservation, SamplingGrid, grids_equal

__all__ = [
    "EigenSystem",
    "ScoreMatrix",
    "class_mean",
    "pooled_covariance",
    "eigendecompose",
    "fit_eigensystem",
    "project_scores",
]


@dataclass(frozen=True)
class EigenSystem:
    """Nonincreasing eigenvalues with grid-sampled eigenfunctions.

    eigenfunctions has one row per component; rows are orthonormal under the
    grid quadrature.  mean_function carries the pooled sample mean of the
    data the system was estimated from.
    """

    grid: SamplingGrid
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    mean_function: np.ndarray

    def __post_init__(self) -> None:
        ev = np.array(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size < 1:
            raise InvalidArgumentError("eigenvalues must be a nonempty vector")
        if np.any(ev < -1e-10):
            raise InvalidArgumentError("eigenvalues must be >= -1e-10 before clamping")
        ev = np.maximum(ev, 0.0)
        if np.any(np.diff(ev) > 0):
            raise InvalidArgumentError("eigenvalues must be nonincreasing")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        ef = np.array(self.eigenfunctions, dtype=float)
        if ef.shape != (ev.size, self.grid.size):
            raise InvalidArgumentError(
                f"eigenfunctions must have shape ({ev.size}, {self.grid.size}), got {ef.shape}"
            )
        ef.setflags(write=False)
        object.__setattr__(self, "eigenfunctions", ef)
        mf = np.array(self.mean_function, dtype=float)
        if mf.shape != (self.grid.size,):
            raise InvalidArgumentError("mean_function must have one value per grid point")
        mf.setflags(write=False)
        object.__setattr__(self, "mean_function", mf)

    @property
    def count(self) -> int:
        """Number of retained eigenpairs."""
        return self.eigenvalues.size


@dataclass(frozen=True)
class ScoreMatrix:
    """Projection coefficients of n observations onto J eigenfunctions."""

    scores: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self) -> None:
        s = np.array(self.scores, dtype=float)
        if s.ndim != 2 or s.shape[1] < 1:
            raise InvalidArgumentError("scores must be an n x J matrix with J >= 1")
        s.setflags(write=False)
        object.__setattr__(self, "scores", s)
        if self.labels is not None:
            y = np.array(self.labels, dtype=int)
            if y.shape != (s.shape[0],):
                raise InvalidArgumentError("labels must have one entry per score row")
            if not np.all(np.isin(y, (-1, 1))):
                raise InvalidArgumentError("labels must be -1 or +1")
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def truncation(self) -> int:
        return self.scores.shape[1]


def _values_matrix(samples: Sequence[FunctionalObservation]) -> np.ndarray:
    grid = samples[0].grid
    for s in samples[1:]:
        if not grids_equal(grid, s.grid):
            raise InvalidArgumentError("all samples must share one sampling grid")
    return np.stack([s.values for s in samples])


def _sorted_rows(matrix: np.ndarray) -> np.ndarray:
    # canonical row order makes sums independent of sample order
    return matrix[np.lexsort(matrix.T[::-1])]


def class_mean(samples: Sequence[FunctionalObservation], label: int) -> FunctionalObservation:
    """Pointwise average of the samples carrying the given label."""
    matching = [s for s in samples if s.label == label]
    if not matching:
        raise EmptyClassError(f"no samples with label {label}")
    values = _sorted_rows(_values_matrix(matching)).mean(axis=0)
    return FunctionalObservation(grid=matching[0].grid, values=values, label=label)


def pooled_covariance(samples: Sequence[FunctionalObservation]) -> np.ndarray:
    """Within-class-centered covariance matrix pooled over both classes.

    C[p,q] = (1/n) sum_k sum_{i in class k} (X_i(s_p) - Xbar_k(s_p)) (X_i(s_q) - Xbar_k(s_q)).
    """
    if not samples:
        raise InsufficientDataError("no samples")
    if any(s.label is None for s in samples):
        raise InvalidArgumentError("pooled covariance requires labeled samples")
    values = _values_matrix(samples)
    labels = np.array([s.label for s in samples])
    n = len(samples)
    c = np.zeros((values.shape[1], values.shape[1]))
    for label in np.unique(labels):
        rows = values[labels == label]
        if rows.shape[0] < 2:
            raise InsufficientDataError(f"class {label} has {rows.shape[0]} sample(s), need at least 2")
        rows = _sorted_rows(rows)
        centered = rows - rows.mean(axis=0)
        c += centered.T @ centered
    c /= n
    return (c + c.T) / 2.0


def eigendecompose(
    cov: np.ndarray,
    grid: SamplingGrid,
    max_components: int,
    mean_function: np.ndarray | None = None,
) -> EigenSystem:
    """Solve the quadrature-weighted eigenproblem of a covariance matrix.

    Eigenvalues come back nonincreasing with tiny negatives clamped to 0;
    eigenfunctions are orthonormal under the grid inner product and signed
    so that each one's entry of largest magnitude is positive.
    """
    cov = np.asarray(cov, dtype=float)
    n = grid.size
    if cov.shape != (n, n):
        raise InvalidArgumentError(f"covariance must be {n}x{n} for this grid, got {cov.shape}")
    if not 1 <= max_components <= n:
        raise InvalidArgumentError(f"max_components must be in [1, {n}], got {max_components}")
    if np.max(np.abs(cov - cov.T)) > 1e-10:
        raise InvalidArgumentError("covariance matrix is not symmetric within 1e-10")
    sqrt_w = np.sqrt(grid.weights)
    a = sqrt_w[:, None] * cov * sqrt_w[None, :]
    eigvals, eigvecs = np.linalg.eigh((a + a.T) / 2.0)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    top = max(eigvals[0], 0.0)
    if eigvals[-1] < -1e-6 * top:
        raise NumericalFailureError(
            f"eigenvalue {eigvals[-1]!r} below tolerance {-1e-6 * top!r}; matrix is far from positive semidefinite"
        )
    eigvals = np.maximum(eigvals, 0.0)[:max_components]
    funcs = (eigvecs[:, :max_components] / sqrt_w[:, None]).T
    for row in funcs:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    if mean_function is None:
        mean_function = np.zeros(n)
    return EigenSystem(grid=grid, eigenvalues=eigvals, eigenfunctions=funcs, mean_function=mean_function)


def fit_eigensystem(
    samples: Sequence[FunctionalObservation], max_components: int | None = None
) -> EigenSystem:
    """Pooled covariance plus eigendecomposition of labeled training samples."""
    cov = pooled_covariance(samples)
    grid = samples[0].grid
    if max_components is None:
        max_components = min(len(samples), grid.size)
    mean = _sorted_rows(_values_matrix(samples)).mean(axis=0)
    return eigendecompose(cov, grid, max_components, mean_function=mean)


def project_scores(
    samples: Sequence[FunctionalObservation], eig: EigenSystem, truncation: int
) -> ScoreMatrix:
    """Uncentered projections of samples onto the leading eigenfunctions.

    Score (i, j) is the quadrature inner product of sample i with
    eigenfunction j; no mean is subtracted, so class-mean differences stay
    in the scores.
    """
    if not 1 <= truncation <= eig.count:
        raise InvalidArgumentError(f"truncation must be in [1, {eig.count}], got {truncation}")
    if not samples:
        raise InvalidArgumentError("no samples to project")
    for s in samples:
        if not grids_equal(s.grid, eig.grid):
            raise InvalidArgumentError("samples must live on the eigensystem's grid")
    values = np.stack([s.values for s in samples])
    weighted = eig.eigenfunctions[:truncation] * eig.grid.weights[None, :]
    scores = values @ weighted.T
    raw_labels = [s.label for s in samples]
    labels = np.array(raw_labels) if all(l is not None for l in raw_labels) else None
    return ScoreMatrix(scores=scores, labels=labels)
