"""Shared test helpers: independent density oracles and toy data builders.

The log-ratio oracle here must stay independent of the implementation's
code paths: Gaussian and central-t densities go through scipy.stats
(the package hand-rolls them), the noncentral t goes through Gauss-Legendre
quadrature of its scale-mixture integral (the package uses scipy.stats.nct),
and multivariate-t blocks go through scipy.stats.multivariate_t (the
package evaluates its own block formula).
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import logsumexp

from fdnn import FunctionalObservation, make_equispaced_grid
from fdnn.dgp import DGPSpec, GaussianLaw, MultivariateTBlock, StudentTLaw


def nct_logpdf_quadrature(x: np.ndarray, df: float, ncp: float, nodes: int = 500) -> np.ndarray:
    """Noncentral-t log density via the scale-mixture integral.

    T = (Z + ncp) / W with W = sqrt(chi2_df / df), so the density is
    E_W[ W * phi(W x - ncp) ]; the W density is integrated with
    Gauss-Legendre on [0, hi] where its mass lives.
    """
    x = np.asarray(x, dtype=float)
    hi = 1.0 + 14.0 / math.sqrt(df)
    t, gl_w = np.polynomial.legendre.leggauss(nodes)
    w = 0.5 * hi * (t + 1.0)
    quad_w = 0.5 * hi * gl_w
    log_fw = (
        math.log(2.0)
        + (df / 2.0) * math.log(df / 2.0)
        - math.lgamma(df / 2.0)
        + (df - 1.0) * np.log(w)
        - df * w**2 / 2.0
    )
    z = w[None, :] * x[:, None] - ncp
    log_integrand = np.log(w)[None, :] + (-0.5 * z**2 - 0.5 * math.log(2.0 * math.pi)) + log_fw[None, :]
    return logsumexp(log_integrand + np.log(quad_w)[None, :], axis=1)


def law_logpdf_independent(law, block: np.ndarray) -> np.ndarray:
    """Log density of one law via routes disjoint from the implementation."""
    if isinstance(law, GaussianLaw):
        return stats.norm.logpdf(block[:, 0], loc=law.mean, scale=law.sd)
    if isinstance(law, StudentTLaw):
        if law.ncp == 0.0:
            return stats.t.logpdf(block[:, 0], law.df)
        return nct_logpdf_quadrature(block[:, 0], law.df, law.ncp)
    if isinstance(law, MultivariateTBlock):
        return stats.multivariate_t.logpdf(block, loc=np.asarray(law.mean), shape=law.scale_matrix, df=law.df)
    raise TypeError(f"unknown law {law!r}")


def independent_log_ratio(spec: DGPSpec, xi: np.ndarray) -> np.ndarray:
    """Sum of per-block log-density differences, all via independent routes."""
    total = np.zeros(xi.shape[0])
    col = 0
    for pos, neg in zip(spec.laws_pos, spec.laws_neg):
        width = len(pos.mean) if isinstance(pos, MultivariateTBlock) else 1
        block = xi[:, col : col + width]
        total += law_logpdf_independent(pos, block) - law_logpdf_independent(neg, block)
        col += width
    return total


def _law_center_scale(law) -> list[tuple[float, float]]:
    if isinstance(law, GaussianLaw):
        return [(law.mean, law.sd)]
    if isinstance(law, StudentTLaw):
        spread = math.sqrt(law.df / (law.df - 2.0)) if law.df > 2 else 4.0
        return [(law.ncp, spread)]
    out = []
    for i, m in enumerate(law.mean):
        spread = math.sqrt(law.scale_matrix[i, i] * law.df / (law.df - 2.0))
        out.append((m, spread))
    return out


def moderate_box_points(spec: DGPSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws over a box covering both class laws out to ~6 spreads."""
    lows, highs = [], []
    for pos, neg in zip(spec.laws_pos, spec.laws_neg):
        for (cp, sp), (cn, sn) in zip(_law_center_scale(pos), _law_center_scale(neg)):
            lows.append(min(cp - 6.0 * sp, cn - 6.0 * sn))
            highs.append(max(cp + 6.0 * sp, cn + 6.0 * sn))
    return rng.uniform(np.array(lows), np.array(highs), size=(m, len(lows)))


@pytest.fixture
def small_grid():
    return make_equispaced_grid(1, [30])


def separable_samples(n: int = 40, grid=None, seed: int = 0, gap: float = 6.0):
    """Two far-apart clusters along one smooth curve; trivially separable scores."""
    if grid is None:
        grid = make_equispaced_grid(1, [30])
    rng = np.random.default_rng(seed)
    pts = grid.points()[:, 0]
    base = np.sin(2.0 * np.pi * pts) + 1.5
    wiggle = np.cos(np.pi * pts)
    samples = []
    for i in range(n):
        label = 1 if i % 2 == 0 else -1
        a = gap * label + rng.normal(0.0, 0.3)
        b = rng.normal(0.0, 0.3)
        samples.append(FunctionalObservation(grid=grid, values=a * base + b * wiggle, label=label))
    return samples
