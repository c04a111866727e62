"""Brute-force and closed-form oracles for validating solver output.

These live in the library rather than in the test tree so the command line
harness can emit the same verification columns (gamma, residuals) that the
tests check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_ZERO_TOL, Partition
from .prox import prox_group_l2, prox_l1


@dataclass(frozen=True)
class GridSpec:
    """Uniform search grid [lo, hi] with the given step."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if (self.hi - self.lo) / self.step > 1e7:
            raise ValueError("grid too fine: more than 1e7 points")


def grid_minimize_1d(f, grid: GridSpec) -> tuple[float, float]:
    """Minimize a scalar convex function by dense grid search plus refinement.

    ``f`` must accept numpy arrays elementwise.  The coarse grid argmin is
    refined by ternary search (valid because ``f`` is convex, so no step-size
    bias survives near kinks) down to a bracket of width ``step * 1e-3``.
    Returns ``(argmin, min value)``.
    """
    xs = np.arange(grid.lo, grid.hi + grid.step / 2, grid.step)
    vals = np.asarray(f(xs), dtype=float)
    k = int(np.argmin(vals))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, xs.size - 1)]
    while hi - lo > grid.step * 1e-3:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    arg = 0.5 * (lo + hi)
    return float(arg), float(f(arg))


def orthogonal_lasso_closed_form(a_mat, x, lam: float, atol: float = 1e-10) -> np.ndarray:
    """Exact solution of the quadratic-fit l1 problem when A has orthonormal columns.

    For A with A^T A = I the objective separates in the coefficients of
    A^T x, so the solution is the soft threshold of A^T x at lam.
    """
    a_mat = np.asarray(a_mat, dtype=float)
    gram = a_mat.T @ a_mat
    if not np.allclose(gram, np.eye(gram.shape[0]), atol=atol):
        raise ValueError("matrix does not have orthonormal columns")
    return prox_l1(a_mat.T @ np.asarray(x, dtype=float), lam)


def orthogonal_group_lasso_closed_form(
    a_mat, x, partition: Partition, lam: float, atol: float = 1e-10
) -> np.ndarray:
    """Exact group-lasso solution for A with orthonormal columns.

    Blockwise shrinkage of A^T x with per-group weights lam * sqrt(n_j).
    """
    a_mat = np.asarray(a_mat, dtype=float)
    gram = a_mat.T @ a_mat
    if not np.allclose(gram, np.eye(gram.shape[0]), atol=atol):
        raise ValueError("matrix does not have orthonormal columns")
    weights = lam * np.sqrt(np.asarray(partition.sizes, dtype=float))
    return prox_group_l2(a_mat.T @ np.asarray(x, dtype=float), partition, weights)


def fermat_residual(grad, u, lam: float, zero_tol: float = DEFAULT_ZERO_TOL) -> float:
    """Max-norm violation of the first-order optimality system at ``u``.

    ``grad`` is the gradient of the smooth data-fit term at ``u``.  On the
    support the optimality system demands grad_j + lam * sign(u_j) = 0; off
    the support it demands |grad_j| <= lam.  Support membership uses the
    relative zero test with ``zero_tol``.
    """
    grad = np.asarray(grad, dtype=float)
    u = np.asarray(u, dtype=float)
    if grad.shape != u.shape:
        raise ValueError(f"shape mismatch: {grad.shape} vs {u.shape}")
    cut = zero_tol * max(1.0, float(np.abs(u).max())) if u.size else 0.0
    on = np.abs(u) > cut
    res_on = np.abs(grad[on] + lam * np.sign(u[on]))
    res_off = np.maximum(np.abs(grad[~on]) - lam, 0.0)
    pieces = [p.max() for p in (res_on, res_off) if p.size]
    return float(max(pieces)) if pieces else 0.0
