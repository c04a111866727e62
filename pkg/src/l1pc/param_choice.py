"""Regularization-parameter choice strategies and solution verifiers.

Two families live here.  The choice side turns data into per-coordinate or
per-block thresholds whose order statistics pin the parameter for a wanted
sparsity level, including the noise-scaled rule lambda = C * delta.  The
verification side checks, for a computed solution, the first-order equality
and inequality system that characterizes its sparsity, both for the identity
transform and, through the SVD machinery, for a general full-row-rank
transform.  Verifiers take the (sub)gradient as input so they stay agnostic
of the loss.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import DEFAULT_ZERO_TOL, Partition, sparsity_level, subvector
from .prox import SubdiffInterval
from .transforms import SvdTransform, first_difference

SEPARABILITY_TOL = 1e-10
MinNormVerdict = Literal["unique", "inconclusive", "violated"]


def _default_tol(lam: float) -> float:
    return 1e-6 * max(1.0, abs(lam))


@dataclass(frozen=True)
class ThresholdSet:
    """Nonnegative thresholds, one per coordinate or block, plus the stable
    permutation that sorts them nondecreasingly."""

    values: np.ndarray
    order: np.ndarray

    @classmethod
    def from_values(cls, values) -> "ThresholdSet":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("need a nonempty 1-d threshold array")
        if not np.isfinite(vals).all():
            raise ValueError("thresholds must be finite")
        if (vals < 0).any():
            raise ValueError("thresholds must be nonnegative")
        order = np.argsort(vals, kind="stable")
        vals.flags.writeable = False
        order.flags.writeable = False
        return cls(values=vals, order=order)

    @property
    def d(self) -> int:
        return self.values.size

    def sorted_values(self) -> np.ndarray:
        return self.values[self.order]


def lambda_for_sparsity(thresholds: ThresholdSet, level: int) -> float:
    """The (level+1)-th largest threshold; at this parameter or above, a
    solution with at most ``level`` active coordinates/blocks exists.

    ``level == d`` places no constraint and returns 0.
    """
    d = thresholds.d
    if not 0 <= level <= d:
        raise ValueError(f"level must lie in [0, {d}], got {level}")
    if level == d:
        return 0.0
    return float(thresholds.sorted_values()[d - 1 - level])


def lasso_identity_thresholds(x) -> ThresholdSet:
    """Per-coordinate thresholds |x_j| for the identity-design quadratic fit."""
    return ThresholdSet.from_values(np.abs(np.asarray(x, dtype=float)))


def check_block_separability(a_mat, partition: Partition, tol: float = SEPARABILITY_TOL) -> bool:
    """True iff all cross-block Gram entries vanish relative to ||A||_inf^2."""
    a_mat = np.asarray(a_mat, dtype=float)
    if a_mat.shape[1] != partition.n:
        raise ValueError(f"matrix with {a_mat.shape[1]} columns does not match partition over {partition.n} indices")
    gram = a_mat.T @ a_mat
    scale = float(np.abs(a_mat).sum(axis=1).max()) ** 2
    block_of = np.empty(partition.n, dtype=int)
    for j, g in enumerate(partition.groups):
        block_of[list(g)] = j
    cross = block_of[:, None] != block_of[None, :]
    worst = float(np.abs(gram[cross]).max()) if cross.any() else 0.0
    return worst <= tol * max(scale, 1e-300)


def block_thresholds(a_mat, x, partition: Partition) -> ThresholdSet:
    """Per-block thresholds ||A_(j)^T x||_inf (block-separable designs)."""
    a_mat = np.asarray(a_mat, dtype=float)
    if not check_block_separability(a_mat, partition):
        warnings.warn("design matrix is not block separable for this partition; thresholds are heuristic")
    coef = a_mat.T @ np.asarray(x, dtype=float)
    vals = [float(np.abs(coef[list(g)]).max()) for g in partition.groups]
    return ThresholdSet.from_values(vals)


def group_lasso_thresholds(a_mat, x, partition: Partition) -> ThresholdSet:
    """Per-block thresholds ||A_(j)^T x||_2 / sqrt(n_j) for the group model."""
    a_mat = np.asarray(a_mat, dtype=float)
    if not check_block_separability(a_mat, partition):
        warnings.warn("design matrix is not block separable for this partition; thresholds are heuristic")
    coef = a_mat.T @ np.asarray(x, dtype=float)
    vals = [float(np.linalg.norm(coef[list(g)]) / np.sqrt(len(g))) for g in partition.groups]
    return ThresholdSet.from_values(vals)


def verify_separable_zero(intervals: Sequence[SubdiffInterval], lam: float) -> np.ndarray:
    """Per-coordinate test of the zero-solution condition.

    Coordinate j admits a zero solution iff lam >= max(lo_j, -hi_j), where
    [lo_j, hi_j] is the subdifferential of its scalar loss at 0.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    return np.array([lam >= max(iv.lo, -iv.hi) for iv in intervals], dtype=bool)


@dataclass(frozen=True)
class CharacterizationVerdict:
    """Outcome of a first-order characterization check.

    ``gamma`` is the largest inequality-side magnitude (must stay <= lam up
    to the tolerance), ``equality_residual`` the worst deviation on the
    equality side, and ``support_used`` the index set the check treated as
    active.
    """

    holds: bool
    gamma: float
    equality_residual: float
    support_used: tuple[int, ...]


def verify_general_characterization(
    grad,
    u_star,
    lam: float,
    tol: float | None = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> CharacterizationVerdict:
    """Check the coordinatewise optimality system at ``u_star``.

    On the support (relative zero test at ``zero_tol``) the system requires
    lam = -grad_j * sign(u_j); off the support it requires |grad_j| <= lam.
    ``grad`` is the gradient of the data-fit term at ``u_star``, supplied by
    the caller.
    """
    if tol is None:
        tol = _default_tol(lam)
    grad = np.asarray(grad, dtype=float)
    u = np.asarray(u_star, dtype=float)
    if grad.shape != u.shape:
        raise ValueError(f"shape mismatch: {grad.shape} vs {u.shape}")
    support = sparsity_level(u, tol=zero_tol).support
    on = np.zeros(u.size, dtype=bool)
    on[list(support)] = True
    eq = np.abs(lam + grad[on] * np.sign(u[on]))
    residual = float(eq.max()) if eq.size else 0.0
    off = np.abs(grad[~on])
    gamma = float(off.max()) if off.size else 0.0
    holds = gamma <= lam + tol and residual <= tol
    return CharacterizationVerdict(holds=holds, gamma=gamma, equality_residual=residual, support_used=support)


def verify_group_characterization(
    grad,
    u_star,
    lam: float,
    partition: Partition,
    tol: float | None = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> CharacterizationVerdict:
    """Blockwise analogue of `verify_general_characterization` for the
    group regularizer sum_j sqrt(n_j) ||u_j||_2.

    Zero blocks must satisfy ||grad_j||_2 / sqrt(n_j) <= lam; active blocks
    must satisfy grad_j + lam * sqrt(n_j) * u_j / ||u_j||_2 = 0.
    """
    if tol is None:
        tol = _default_tol(lam)
    grad = np.asarray(grad, dtype=float)
    u = np.asarray(u_star, dtype=float)
    cut = zero_tol * max(1.0, float(np.abs(u).max()))
    support: list[int] = []
    gamma = 0.0
    residual = 0.0
    for j in range(partition.d):
        gj = subvector(grad, partition, j)
        uj = subvector(u, partition, j)
        root = np.sqrt(len(partition.groups[j]))
        if np.abs(uj).max() <= cut:
            gamma = max(gamma, float(np.linalg.norm(gj)) / root)
        else:
            support.append(j)
            direction = uj / np.linalg.norm(uj)
            residual = max(residual, float(np.abs(gj + lam * root * direction).max()))
    holds = gamma <= lam + tol and residual <= tol
    return CharacterizationVerdict(
        holds=holds, gamma=gamma, equality_residual=residual, support_used=tuple(support)
    )


def sufficient_sparsity_bound(grad_at_v, eps: float, lipschitz, lam: float, candidate_support) -> bool:
    """Strict sufficient condition bounding the true solution's sparsity.

    True iff lam > |grad_j(v)| + eps * L_j for every j outside the candidate
    support, where v is any point within eps of the solution and L_j bounds
    the Lipschitz constant of the j-th partial derivative.  Strictness
    matters: equality does not qualify.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    grad = np.asarray(grad_at_v, dtype=float)
    lip = np.asarray(lipschitz, dtype=float)
    if lip.shape != grad.shape:
        raise ValueError(f"shape mismatch: {lip.shape} vs {grad.shape}")
    if (lip < 0).any():
        raise ValueError("Lipschitz constants must be nonnegative")
    off = np.ones(grad.size, dtype=bool)
    off[list(candidate_support)] = False
    return bool(np.all(lam > np.abs(grad[off]) + eps * lip[off]))


@dataclass(frozen=True)
class SubgradientBox:
    """Subgradient set of the form {M^T c : lo <= c <= hi componentwise}.

    Covers the kink losses, whose subdifferential at the solve point is a
    product of intervals pushed through the data matrix.
    """

    matrix: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if m.ndim != 2 or lo.shape != (m.shape[0],) or hi.shape != (m.shape[0],):
            raise ValueError("box bounds must match the matrix row count")
        if (lo > hi).any():
            raise ValueError("box bounds out of order")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


def _inner_product_ranges(t: SvdTransform, a) -> tuple[np.ndarray, np.ndarray]:
    """Ranges of (B'_j)^T a for every column j, as [lo, hi] arrays."""
    if isinstance(a, SubgradientBox):
        proj = a.matrix @ t.b_prime
        lo = np.minimum(proj * a.lo[:, None], proj * a.hi[:, None]).sum(axis=0)
        hi = np.maximum(proj * a.lo[:, None], proj * a.hi[:, None]).sum(axis=0)
        return lo, hi
    vec = np.asarray(a, dtype=float)
    if vec.shape != (t.n,):
        raise ValueError(f"expected a subgradient of dimension {t.n}, got shape {vec.shape}")
    w = t.b_prime.T @ vec
    return w, w


def _min_abs_over(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))


def verify_transform_characterization(
    t: SvdTransform,
    a,
    lam: float,
    z_star,
    tol: float | None = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> CharacterizationVerdict:
    """Check the transform-domain optimality system at z_star = B u_star.

    ``a`` is either an exact subgradient vector of the data-fit term at
    u_star or a `SubgradientBox`; interval arithmetic reduces the box case
    coordinatewise (the minimum of |.| over [lo, hi] is 0 when the interval
    crosses zero, else the nearer endpoint).  Three conditions are checked:
    equality rows on the support of z_star, the off-support bound gamma <=
    lam, and vanishing inner products against the trailing null-space
    columns of B'.  Only full-row-rank transforms are supported; a
    rank-deficient non-square B would require searching the null space of
    B^T for a certificate.
    """
    if t.rank != t.m:
        raise ValueError("transform matrix must have full row rank")
    if tol is None:
        tol = _default_tol(lam)
    z = np.asarray(z_star, dtype=float)
    if z.shape != (t.m,):
        raise ValueError(f"expected z of dimension {t.m}, got shape {z.shape}")
    lo, hi = _inner_product_ranges(t, a)
    support = sparsity_level(z, tol=zero_tol).support
    on = np.zeros(t.m, dtype=bool)
    on[list(support)] = True

    residual = 0.0
    for k in np.flatnonzero(on):
        s = np.sign(z[k])
        tgt_lo, tgt_hi = (-hi[k], -lo[k]) if s > 0 else (lo[k], hi[k])
        residual = max(residual, max(tgt_lo - lam, lam - tgt_hi, 0.0))

    min_abs = _min_abs_over(lo, hi)
    off_main = min_abs[: t.m][~on]
    gamma = float(off_main.max()) if off_main.size else 0.0
    tail = min_abs[t.m:]
    if tail.size:
        residual = max(residual, float(tail.max()))

    holds = gamma <= lam + tol and residual <= tol
    return CharacterizationVerdict(
        holds=holds, gamma=gamma, equality_residual=float(residual), support_used=support
    )


def tv_lambda_max(x, t: SvdTransform) -> tuple[float, np.ndarray]:
    """Smallest parameter making the total-variation solution constant.

    Returns (lambda_max, u_star) with lambda_max the sup-norm of the leading
    B' columns applied to x and u_star the mean signal; for any parameter at
    or above lambda_max the first-difference transform of the solution is
    identically zero.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if t.b.shape != (n - 1, n) or not np.array_equal(t.b, first_difference(n)):
        raise ValueError("transform must be built from the first-difference matrix of matching size")
    lam_max = float(np.abs(t.b_prime[:, : n - 1].T @ x).max())
    u_star = np.full(n, x.mean())
    return lam_max, u_star


def svm_square_lambda_max(kernel, y) -> tuple[float, np.ndarray]:
    """Parameter bound zeroing all kernel coefficients in the square-loss
    machine; the remaining bias is the label mean.

    Returns (lambda_max, u_star) where u_star stacks n zeros and the bias.
    """
    k = np.asarray(kernel, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    if k.shape != (n, n):
        raise ValueError(f"kernel must be {n} x {n}, got {k.shape}")
    mean = float(y.mean())
    lam_max = float(np.abs(k.T @ (mean - y)).max())
    return lam_max, np.concatenate([np.zeros(n), [mean]])


@dataclass(frozen=True)
class LogisticChoice:
    lambda_max: float
    b_star: float
    c: np.ndarray
    y_dot_c: float


def logistic_lambda_max(x_mat, y) -> LogisticChoice:
    """Parameter bound zeroing all logistic weights; the bias solves the
    class-balance equation exactly.

    With q = n_plus / n_minus the zero-weight stationarity gives
    b_star = ln(q) and the scalar weights c_j = (1 + q**y_j)^-1, whose
    label-weighted sum vanishes identically (checked to 1e-12).
    """
    x_mat = np.asarray(x_mat, dtype=float)
    y = np.asarray(y, dtype=float)
    if x_mat.ndim != 2 or x_mat.shape[0] != y.size:
        raise ValueError("need one sample row per label")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    n_plus = int(np.sum(y > 0))
    n_minus = int(np.sum(y < 0))
    if n_plus == 0 or n_minus == 0:
        raise ValueError("both classes must be present")
    q = n_plus / n_minus
    c = 1.0 / (1.0 + np.power(q, y))
    y_dot_c = float(y @ c)
    if abs(y_dot_c) > 1e-12:
        raise AssertionError(f"class-balance identity violated: y.c = {y_dot_c:.3e}")
    lam_max = float(np.abs((y[:, None] * x_mat).T @ c).max() / y.size)
    return LogisticChoice(lambda_max=lam_max, b_star=float(np.log(q)), c=c, y_dot_c=y_dot_c)


def balance_strategy(
    thresholds: ThresholdSet,
    *,
    target_level: int | None = None,
    c: float | None = None,
    delta: float | None = None,
    min_lambda: float = float(np.finfo(float).tiny),
) -> tuple[float, int]:
    """Pick the parameter balancing sparsity against the noise level.

    Exactly one mode applies.  Level mode returns the threshold order
    statistic admitting at most ``target_level`` active blocks (floored at
    ``min_lambda`` so the parameter stays positive).  Scaled mode returns
    lambda = c * delta and the implied level, the count of thresholds
    strictly above that value.
    """
    level_mode = target_level is not None
    scaled_mode = c is not None or delta is not None
    if level_mode == scaled_mode:
        raise ValueError("choose exactly one of target_level or (c, delta)")
    if level_mode:
        lam = max(lambda_for_sparsity(thresholds, target_level), min_lambda)
        return lam, int(target_level)
    if c is None or delta is None:
        raise ValueError("scaled mode needs both c and delta")
    if c <= 0 or delta <= 0:
        raise ValueError("c and delta must be positive")
    lam = c * delta
    implied = int(np.sum(thresholds.values > lam))
    return lam, implied


def min_norm_uniqueness_check(
    a_mat,
    x,
    u_tilde,
    tol: float = 1e-8,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> MinNormVerdict:
    """Assess whether ``u_tilde`` is the unique minimal-l1 interpolant.

    Verifies A u = x, full column rank of the support columns, and the
    strict dual bound ||A_offsupport^T y||_inf < 1 for the least-norm dual
    certificate.  The dual condition is existential, so a failed strict
    bound is only ``inconclusive``; a failed interpolation or rank check is
    ``violated``.
    """
    a_mat = np.asarray(a_mat, dtype=float)
    x = np.asarray(x, dtype=float)
    u = np.asarray(u_tilde, dtype=float)
    scale = max(1.0, float(np.abs(x).max())) if x.size else 1.0
    if np.abs(a_mat @ u - x).max() > tol * scale:
        return "violated"
    support = list(sparsity_level(u, tol=zero_tol).support)
    if not support:
        return "unique"
    a_on = a_mat[:, support]
    svals = np.linalg.svd(a_on, compute_uv=False)
    if svals[-1] <= 1e-10 * svals[0]:
        return "violated"
    v = np.sign(u[support])
    y, *_ = np.linalg.lstsq(a_on.T, v, rcond=None)
    off = [j for j in range(a_mat.shape[1]) if j not in set(support)]
    if not off:
        return "unique"
    if np.abs(a_mat[:, off].T @ y).max() < 1.0:
        return "unique"
    return "inconclusive"
