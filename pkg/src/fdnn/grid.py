"""Discretized functions on tensor-product grids over [0,1]^d.

A function is represented by its values at the grid points, flattened
row-major over axes (the last axis varies fastest), together with one
nonnegative quadrature weight per point.  Integrals over the domain are
approximated by weighted sums, so the weights of any valid grid sum to
the domain volume 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import IncompatibleGridsError, InvalidArgumentError

__all__ = [
    "SamplingGrid",
    "FunctionalObservation",
    "make_equispaced_grid",
    "make_trapezoid_grid",
    "inner_product",
    "quadrature_norm",
    "grids_equal",
    "require_same_grid",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SamplingGrid:
    """Tensor-product evaluation points on [0,1]^d with quadrature weights.

    coordinates holds the ordered per-axis evaluation points; weights has one
    entry per flattened grid point and sums to 1.
    """

    dim: int
    points_per_axis: tuple[int, ...]
    coordinates: tuple[np.ndarray, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidArgumentError(f"grid dimension must be >= 1, got {self.dim}")
        if len(self.points_per_axis) != self.dim or len(self.coordinates) != self.dim:
            raise InvalidArgumentError("points_per_axis and coordinates must have one entry per axis")
        object.__setattr__(self, "points_per_axis", tuple(int(m) for m in self.points_per_axis))
        coords = []
        for axis, (m, c) in enumerate(zip(self.points_per_axis, self.coordinates)):
            c = _frozen(c)
            if m < 1 or c.shape != (m,):
                raise InvalidArgumentError(f"axis {axis}: expected {m} coordinates, got shape {c.shape}")
            if np.any(np.diff(c) <= 0):
                raise InvalidArgumentError(f"axis {axis}: coordinates must be strictly increasing")
            if c[0] < 0.0 or c[-1] > 1.0:
                raise InvalidArgumentError(f"axis {axis}: coordinates must lie in [0,1]")
            coords.append(c)
        object.__setattr__(self, "coordinates", tuple(coords))
        w = _frozen(self.weights)
        n = int(np.prod(self.points_per_axis))
        if w.shape != (n,):
            raise InvalidArgumentError(f"expected {n} weights, got shape {w.shape}")
        if np.any(w < 0):
            raise InvalidArgumentError("quadrature weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidArgumentError(f"quadrature weights must sum to 1, got {w.sum()!r}")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        """Total number of grid points N."""
        return self.weights.shape[0]

    def points(self) -> np.ndarray:
        """All grid points as an (N, dim) array in row-major order."""
        mesh = np.meshgrid(*self.coordinates, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)


@dataclass(frozen=True)
class FunctionalObservation:
    """A data function sampled on a grid, optionally carrying a class label."""

    grid: SamplingGrid
    values: np.ndarray
    label: int | None = None

    def __post_init__(self) -> None:
        v = _frozen(self.values)
        if v.shape != (self.grid.size,):
            raise InvalidArgumentError(
                f"values must have one entry per grid point ({self.grid.size}), got shape {v.shape}"
            )
        object.__setattr__(self, "values", v)
        if self.label is not None:
            label = int(self.label)
            if label not in (-1, 1):
                raise InvalidArgumentError(f"label must be -1 or +1, got {self.label!r}")
            object.__setattr__(self, "label", label)


def make_equispaced_grid(dim: int, points_per_axis: Sequence[int]) -> SamplingGrid:
    """Midpoint-rule grid: axis point i of m is (i + 0.5)/m with weight 1/m.

    Tensor weights multiply across axes, so every point of an equispaced
    grid carries weight 1/N.
    """
    if dim < 1:
        raise InvalidArgumentError(f"grid dimension must be >= 1, got {dim}")
    counts = [int(m) for m in points_per_axis]
    if len(counts) != dim:
        raise InvalidArgumentError(f"expected {dim} axis counts, got {len(counts)}")
    for m in counts:
        if m < 2:
            raise InvalidArgumentError(f"each axis needs at least 2 points, got {m}")
    coords = tuple((np.arange(m) + 0.5) / m for m in counts)
    n = int(np.prod(counts))
    weights = np.full(n, 1.0 / n)
    return SamplingGrid(dim=dim, points_per_axis=tuple(counts), coordinates=coords, weights=weights)


def make_trapezoid_grid(coordinates: Sequence[Sequence[float]]) -> SamplingGrid:
    """Grid with user-supplied (possibly non-equispaced) axis coordinates.

    Weights come from the trapezoid rule on each axis and multiply across
    axes.  Each axis must start at 0 and end at 1 so the weights sum to the
    domain volume.
    """
    axes = [np.asarray(c, dtype=float) for c in coordinates]
    if not axes:
        raise InvalidArgumentError("need at least one axis")
    per_axis_w = []
    for axis, c in enumerate(axes):
        if c.ndim != 1 or c.size < 2:
            raise InvalidArgumentError(f"axis {axis}: need at least 2 coordinates")
        if not (c[0] == 0.0 and c[-1] == 1.0):
            raise InvalidArgumentError(f"axis {axis}: trapezoid coordinates must span [0,1] exactly")
        gaps = np.diff(c)
        if np.any(gaps <= 0):
            raise InvalidArgumentError(f"axis {axis}: coordinates must be strictly increasing")
        w = np.zeros(c.size)
        w[:-1] += gaps / 2.0
        w[1:] += gaps / 2.0
        per_axis_w.append(w)
    weights = per_axis_w[0]
    for w in per_axis_w[1:]:
        weights = np.multiply.outer(weights, w)
    return SamplingGrid(
        dim=len(axes),
        points_per_axis=tuple(c.size for c in axes),
        coordinates=tuple(axes),
        weights=weights.reshape(-1),
    )


def grids_equal(a: SamplingGrid, b: SamplingGrid) -> bool:
    """Exact equality of dimensions, coordinates and weights."""
    if a is b:
        return True
    if a.dim != b.dim or a.points_per_axis != b.points_per_axis:
        return False
    return all(np.array_equal(ca, cb) for ca, cb in zip(a.coordinates, b.coordinates)) and np.array_equal(
        a.weights, b.weights
    )


def require_same_grid(f: FunctionalObservation, g: FunctionalObservation) -> None:
    if not grids_equal(f.grid, g.grid):
        raise IncompatibleGridsError("observations live on different sampling grids")


def inner_product(f: FunctionalObservation, g: FunctionalObservation) -> float:
    """Quadrature approximation of the L2 inner product of f and g."""
    require_same_grid(f, g)
    return float(np.sum(f.grid.weights * f.values * g.values))


def quadrature_norm(f: FunctionalObservation) -> float:
    """Quadrature L2 norm of f."""
    return float(np.sqrt(max(inner_product(f, f), 0.0)))
