"""Fixed-point proximity solver for min phi(u) + omega(C u).

The iteration interleaves a primal prox step with a dual step built from the
Moreau identity:

    u_{k+1} = prox_{beta*phi}(u_k - beta * C^T v_k)
    v_{k+1} = rho * (I - prox_{omega/rho})(v_k / rho + C (2 u_{k+1} - u_k))

and converges whenever beta * rho < 1 / ||C||_2^2.  Both arrangements used in
practice are supported: regularizer in phi with C the data/transform matrix,
or data fit in phi with C a difference operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DEFAULT_ZERO_TOL, SparsityReport, sparsity_level
from .oracle import fermat_residual

DIVERGENCE_CAP = 1e12
DEFAULT_STEP_SAFETY = 0.99


class StepSizeError(ValueError):
    """The configured steps violate beta * rho < 1 / ||C||_2^2."""


class DivergenceError(RuntimeError):
    """Iterates blew up; usually a mis-specified prox pair."""


@dataclass(frozen=True)
class LinearMap:
    """Matrix-free stand-in for the coupling matrix C.

    ``norm_2``, when given, must be an upper bound on the spectral norm (it
    is exact for orthogonal maps); otherwise the solver falls back to power
    iteration, which needs both ``matvec`` and ``rmatvec``.
    """

    shape: tuple[int, int]
    matvec: Callable[[np.ndarray], np.ndarray]
    rmatvec: Callable[[np.ndarray], np.ndarray]
    norm_2: float | None = None


def _as_map(c) -> LinearMap:
    if isinstance(c, LinearMap):
        return c
    arr = np.asarray(c, dtype=float)
    if arr.ndim != 2:
        raise ValueError("C must be a matrix or a LinearMap")
    return LinearMap(shape=arr.shape, matvec=lambda x: arr @ x, rmatvec=lambda y: arr.T @ y)


def spectral_norm(c, iters: int = 200) -> float:
    """Power-iteration estimate of ||C||_2 (never above the true value).

    The iteration runs on the Gram operator from a fixed seeded start, so
    the estimate is deterministic.  Callers enforcing the step condition
    should keep a safety factor since the estimate approaches the norm from
    below.
    """
    cmap = _as_map(c)
    m, n = cmap.shape
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ValueError("degenerate start vector")
    x /= nx
    est = 0.0
    for _ in range(iters):
        y = cmap.matvec(x)
        est = float(np.linalg.norm(y))
        if est == 0.0:
            raise ValueError("zero matrix has no spectral norm estimate")
        x = cmap.rmatvec(y)
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            break
        x /= nx
    return est


@dataclass(frozen=True)
class FppaConfig:
    """Step sizes, budget, and initial points for one solver run.

    ``beta * rho`` must stay below 1 / ||C||_2^2; `fppa_solve` validates
    this before iterating.  ``u0``/``v0`` default to zero vectors.
    """

    beta: float
    rho: float
    max_iters: int
    rel_tol: float = 0.0
    u0: np.ndarray | None = None
    v0: np.ndarray | None = None

    def __post_init__(self):
        if self.beta <= 0 or self.rho <= 0:
            raise ValueError("beta and rho must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")


def default_config(
    c,
    max_iters: int,
    rel_tol: float = 0.0,
    beta: float | None = None,
    rho: float | None = None,
    norm_c: float | None = None,
) -> FppaConfig:
    """Config with steps beta = rho = 0.99 / ||C||_2 unless overridden.

    The default product beta * rho = 0.9801 / ||C||_2^2 sits strictly inside
    the convergence region; step choices only affect convergence speed.
    """
    if norm_c is None:
        cmap = _as_map(c)
        norm_c = cmap.norm_2 if cmap.norm_2 is not None else spectral_norm(cmap)
    if beta is None:
        beta = DEFAULT_STEP_SAFETY / norm_c
    if rho is None:
        rho = DEFAULT_STEP_SAFETY / norm_c
    return FppaConfig(beta=beta, rho=rho, max_iters=max_iters, rel_tol=rel_tol)


@dataclass(frozen=True)
class SolveReport:
    """Converged iterate plus the bookkeeping the experiment tables need.

    ``v_inf`` is the final dual iterate, kept for warm restarts and
    fixed-point consistency checks.
    """

    u_inf: np.ndarray
    iterations_run: int
    final_rel_change: float
    converged: bool
    sparsity: SparsityReport
    v_inf: np.ndarray | None = None
    transform_sparsity: SparsityReport | None = None
    fermat_residual: float | None = None
    objective_trace: tuple[float, ...] = field(default=())


def fppa_solve(
    prox_phi: Callable[[np.ndarray], np.ndarray],
    prox_omega: Callable[[np.ndarray], np.ndarray],
    c,
    cfg: FppaConfig,
    *,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    lam: float | None = None,
    transform_b: Callable[[np.ndarray], np.ndarray] | None = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
    objective_fn: Callable[[np.ndarray], float] | None = None,
    trace_every: int = 100,
) -> SolveReport:
    """Run the two-line iteration until the budget or tolerance is hit.

    ``prox_phi`` must be the prox of beta * phi and ``prox_omega`` the prox
    of omega / rho, consistent with the steps in ``cfg``.  Optional hooks:
    ``grad`` and ``lam`` (gradient of the smooth data-fit term and the l1
    weight) populate the first-order optimality residual of the report,
    ``transform_b`` adds the sparsity count of B u_inf, and ``objective_fn``
    is sampled every ``trace_every`` iterations into the objective trace.

    Raises `StepSizeError` if beta * rho >= 1 / ||C||_2^2 and
    `DivergenceError` if an iterate leaves [-1e12, 1e12] or goes non-finite.
    """
    cmap = _as_map(c)
    m, n = cmap.shape
    norm_c = cmap.norm_2 if cmap.norm_2 is not None else spectral_norm(cmap)
    if cfg.beta * cfg.rho >= 1.0 / (norm_c * norm_c):
        raise StepSizeError(
            f"beta*rho = {cfg.beta * cfg.rho:.6g} is not below 1/||C||^2 = {1.0 / norm_c**2:.6g}"
        )

    u = np.zeros(n) if cfg.u0 is None else np.array(cfg.u0, dtype=float)
    v = np.zeros(m) if cfg.v0 is None else np.array(cfg.v0, dtype=float)
    if u.shape != (n,) or v.shape != (m,):
        raise ValueError("initial points do not match the dimensions of C")

    trace: list[float] = []
    rel = np.inf
    converged = False
    iterations = 0
    for k in range(cfg.max_iters):
        u_new = prox_phi(u - cfg.beta * cmap.rmatvec(v))
        arg = v / cfg.rho + cmap.matvec(2.0 * u_new - u)
        v_new = cfg.rho * (arg - prox_omega(arg))
        rel = float(np.linalg.norm(u_new - u) / max(1.0, np.linalg.norm(u)))
        rel_v = float(np.linalg.norm(v_new - v) / max(1.0, np.linalg.norm(v)))
        u = u_new
        v = v_new
        iterations = k + 1
        peak = float(np.abs(u).max()) if u.size else 0.0
        if not np.isfinite(peak) or peak > DIVERGENCE_CAP:
            raise DivergenceError(f"iterate escaped at iteration {iterations} (max |u| = {peak:.3g})")
        if objective_fn is not None and iterations % trace_every == 0:
            trace.append(float(objective_fn(u)))
        # The dual change must be small too: from a cold start the primal
        # prox can hold u fixed for one step while v is still moving.
        if rel < cfg.rel_tol and rel_v < cfg.rel_tol:
            converged = True
            break

    residual = None
    if grad is not None and lam is not None:
        residual = fermat_residual(grad(u), u, lam, zero_tol=zero_tol)
    transform_report = None
    if transform_b is not None:
        transform_report = sparsity_level(transform_b(u), tol=zero_tol)
    return SolveReport(
        u_inf=u,
        iterations_run=iterations,
        final_rel_change=rel,
        converged=converged,
        sparsity=sparsity_level(u, tol=zero_tol),
        v_inf=v,
        transform_sparsity=transform_report,
        fermat_residual=residual,
        objective_trace=tuple(trace),
    )
