"""Proximity operators and scalar subdifferential evaluators.

Every operator here evaluates ``prox_f(z) = argmin_u 1/2||u - z||^2 + f(u)``
for one of the losses used by the solver: the l1 norm, group-l2 norms, the
quadratic data-fit term, the hinge sum and the epsilon-insensitive sum.  All
are stateless pure functions, separable (or block separable), and written in
closed form; piecewise boundaries agree across adjacent branches because the
prox of a convex function is single valued.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Partition


def prox_l1(z, t: float) -> np.ndarray:
    """Soft threshold: componentwise sign(z) * max(|z| - t, 0)."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def prox_group_l2(z, partition: Partition, weights) -> np.ndarray:
    """Blockwise shrinkage: scale block j by max(0, 1 - w_j / ||z_j||_2).

    A block with ``||z_j||_2 <= w_j`` is set to zero.  ``weights`` holds one
    nonnegative threshold per group.
    """
    z = np.asarray(z, dtype=float)
    if z.size != partition.n:
        raise ValueError(f"vector of dimension {z.size} does not match partition over {partition.n} indices")
    w = np.asarray(weights, dtype=float)
    if w.shape != (partition.d,):
        raise ValueError(f"expected {partition.d} weights, got shape {w.shape}")
    if (w < 0).any():
        raise ValueError("weights must be nonnegative")
    out = np.empty_like(z)
    for j, g in enumerate(partition.groups):
        idx = list(g)
        block = z[idx]
        norm = float(np.linalg.norm(block))
        if norm <= w[j]:
            out[idx] = 0.0
        else:
            out[idx] = block * (1.0 - w[j] / norm)
    return out


def prox_square_fidelity(z, x, c: float) -> np.ndarray:
    """Prox of c/2 * ||. - x||_2^2, i.e. (z + c*x) / (1 + c) componentwise."""
    if c <= 0:
        raise ValueError("c must be positive")
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if z.shape != x.shape:
        raise ValueError(f"shape mismatch: {z.shape} vs {x.shape}")
    return (z + c * x) / (1.0 + c)


def prox_hinge_sum(z, c: float) -> np.ndarray:
    """Prox of c * sum_j max(1 - z_j, 0).

    Componentwise: z_j for z_j >= 1, z_j + c for z_j <= 1 - c, and 1 in
    between (the kink of the loss absorbs the whole interval).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    z = np.asarray(z, dtype=float)
    return np.where(z >= 1.0, z, np.where(z <= 1.0 - c, z + c, 1.0))


def prox_eps_insensitive_sum(z, y, eps: float, c: float) -> np.ndarray:
    """Prox of c * sum_j max(|z_j - y_j| - eps, 0).

    With t = z_j - y_j the result is y_j + t inside the tube |t| <= eps,
    clipped to the tube edge for eps < |t| <= eps + c, and pulled in by c
    beyond that.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if c <= 0:
        raise ValueError("c must be positive")
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    if z.shape != y.shape:
        raise ValueError(f"shape mismatch: {z.shape} vs {y.shape}")
    t = z - y
    a = np.abs(t)
    s = np.sign(t)
    return y + np.where(a <= eps, t, np.where(a <= eps + c, s * eps, t - c * s))


@dataclass(frozen=True)
class SubdiffInterval:
    """Closed interval [lo, hi] of one-sided derivatives."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order")


@dataclass(frozen=True)
class SquareLoss:
    """1/2 (t - x)^2 for a fixed target x."""

    x: float


@dataclass(frozen=True)
class HingeLoss:
    """max(1 - t, 0)."""


@dataclass(frozen=True)
class EpsInsensitiveLoss:
    """max(|t - y| - eps, 0) for a fixed target y and tube half-width eps."""

    y: float
    eps: float

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class AbsLoss:
    """|t|."""


ScalarLossKind = SquareLoss | HingeLoss | EpsInsensitiveLoss | AbsLoss


def subdiff_at(kind: ScalarLossKind, t: float, kink_tol: float = 0.0) -> SubdiffInterval:
    """Exact subdifferential interval of a scalar convex loss at ``t``.

    Where the loss is differentiable the interval is a singleton.  A point
    within ``kink_tol`` of a kink is treated as the kink, which widens the
    interval; verifiers of inexact solver output rely on this.
    """
    if isinstance(kind, SquareLoss):
        g = t - kind.x
        return SubdiffInterval(g, g)
    if isinstance(kind, HingeLoss):
        if abs(t - 1.0) <= kink_tol:
            return SubdiffInterval(-1.0, 0.0)
        return SubdiffInterval(-1.0, -1.0) if t < 1.0 else SubdiffInterval(0.0, 0.0)
    if isinstance(kind, EpsInsensitiveLoss):
        d = t - kind.y
        if abs(d - kind.eps) <= kink_tol:
            return SubdiffInterval(0.0, 1.0)
        if abs(d + kind.eps) <= kink_tol:
            return SubdiffInterval(-1.0, 0.0)
        if abs(d) < kind.eps:
            return SubdiffInterval(0.0, 0.0)
        return SubdiffInterval(1.0, 1.0) if d > 0 else SubdiffInterval(-1.0, -1.0)
    if isinstance(kind, AbsLoss):
        if abs(t) <= kink_tol or t == 0.0:
            return SubdiffInterval(-1.0, 1.0)
        return SubdiffInterval(1.0, 1.0) if t > 0 else SubdiffInterval(-1.0, -1.0)
    raise TypeError(f"unsupported loss kind: {kind!r}")


def hinge_subdiff_box(t, kink_tol: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized hinge subdifferential: per-coordinate [lo, hi] arrays."""
    t = np.asarray(t, dtype=float)
    at_kink = np.abs(t - 1.0) <= kink_tol
    lo = np.where(at_kink, -1.0, np.where(t < 1.0, -1.0, 0.0))
    hi = np.where(at_kink, 0.0, np.where(t < 1.0, -1.0, 0.0))
    return lo, hi


def eps_insensitive_subdiff_box(t, y, eps: float, kink_tol: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized epsilon-insensitive subdifferential intervals."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    d = t - y
    inner = np.where(np.abs(d) < eps, 0.0, np.sign(d))
    lo = np.where(np.abs(d - eps) <= kink_tol, 0.0, np.where(np.abs(d + eps) <= kink_tol, -1.0, inner))
    hi = np.where(np.abs(d - eps) <= kink_tol, 1.0, np.where(np.abs(d + eps) <= kink_tol, 0.0, inner))
    return lo, hi
