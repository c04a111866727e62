"""Experiment harness: problem builders, parameter sweeps, and CSV emission.

Each experiment mirrors one table pipeline: build data (with seeded noise),
choose the parameter values (explicit list, target sparsity levels, or the
noise-scaled rule), solve with the fixed-point proximity iteration, then
emit one row per parameter value with the sparsity count, the verification
quantity gamma, and the fit metrics.  Identical config and seed give
byte-identical CSV output.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .core import DEFAULT_ZERO_TOL, block_sparsity_level, dyadic_partition, sparsity_level
from .data import (
    STREAM_DATA,
    STREAM_NOISE,
    add_gaussian_noise,
    box_muller,
    classification_accuracy,
    derived_rng,
    doppler_signal,
    load_csv_dataset,
    load_signal,
    mse,
    psnr,
    read_pgm,
    synth_two_class,
    synthetic_test_image,
)
from .fppa import LinearMap, SolveReport, default_config, fppa_solve
from .param_choice import (
    SubgradientBox,
    ThresholdSet,
    balance_strategy,
    lambda_for_sparsity,
    logistic_lambda_max,
    svm_square_lambda_max,
    verify_general_characterization,
    verify_group_characterization,
    verify_transform_characterization,
)
from .prox import (
    eps_insensitive_subdiff_box,
    hinge_subdiff_box,
    prox_eps_insensitive_sum,
    prox_group_l2,
    prox_hinge_sum,
    prox_l1,
    prox_square_fidelity,
)
from .transforms import (
    daubechies_matrix,
    dct_matrix,
    degenerate_identity_transform,
    first_difference_map,
    gaussian_kernel_matrix,
    kron_2d_apply,
    kron_2d_apply_t,
)

EXPERIMENTS = (
    "lasso-identity",
    "image-dwt",
    "group-lasso",
    "tv-signal",
    "svm-square",
    "svm-hinge",
    "svm-eps",
    "logistic-check",
    "balance",
)

DEFAULT_ITERS = {
    "lasso-identity": 2000,
    "image-dwt": 100,
    "group-lasso": 1000,
    "tv-signal": 50000,
    "svm-square": 30000,
    "svm-hinge": 30000,
    "svm-eps": 30000,
    "logistic-check": 0,
    "balance": 1000,
}

DEFAULT_N = {
    "lasso-identity": 20,
    "group-lasso": 4096,
    "tv-signal": 4096,
    "balance": 4096,
    "svm-square": 100,
    "svm-hinge": 100,
    "svm-eps": 100,
    "logistic-check": 100,
}

EXPERIMENT_COLUMNS: dict[str, tuple[tuple[str, str], ...]] = {
    "lasso-identity": (("lambda", "lam"), ("sl", "sl"), ("gamma", "gamma"), ("mse", "mse"), ("iterations", "iterations")),
    "image-dwt": (("lambda", "lam"), ("sl", "sl"), ("gamma", "gamma"), ("psnr", "psnr"), ("iterations", "iterations")),
    "group-lasso": (("lambda", "lam"), ("bsl", "bsl"), ("gamma", "gamma"), ("mse", "mse"), ("iterations", "iterations")),
    "tv-signal": (("lambda", "lam"), ("gamma", "gamma"), ("sl", "sl"), ("mse", "mse"), ("iterations", "iterations")),
    "svm-square": (("lambda", "lam"), ("gamma", "gamma"), ("sl", "sl"), ("tra", "tra"), ("tea", "tea"), ("iterations", "iterations")),
    "svm-hinge": (("lambda", "lam"), ("gamma", "gamma"), ("sl", "sl"), ("tra", "tra"), ("tea", "tea"), ("iterations", "iterations")),
    "svm-eps": (("lambda", "lam"), ("gamma", "gamma"), ("sl", "sl"), ("trm", "trm"), ("tem", "tem"), ("iterations", "iterations")),
    "logistic-check": (("lambda_max", "lam"), ("b_star", "b_star"), ("y_dot_c", "y_dot_c")),
    "balance": (
        ("delta", "delta"), ("lambda", "lam"), ("implied_level", "implied_level"), ("sl", "sl"),
        ("mse", "mse"), ("mse_over_delta", "mse_over_delta"), ("err_over_delta", "err_over_delta"),
        ("iterations", "iterations"),
    ),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one sweep needs; command-line flags map 1:1 onto fields.

    At most one noise spec (sigma, snr, or delta_list) and one parameter
    spec (lambda_list, target_levels, lambda_fracs, or c) may be given; a
    seed is mandatory whenever anything random is drawn.
    """

    experiment: str
    n: int | None = None
    image: str | None = None
    signal: str | None = None
    dataset: str | None = None
    test_dataset: str | None = None
    wavelet: tuple[int, int] = (4, 4)
    use_dct: bool = False
    mu: float = 1.0
    eps: float = 1e-4
    sigma: float | None = None
    snr: float | None = None
    delta_list: tuple[float, ...] | None = None
    lambda_list: tuple[float, ...] | None = None
    target_levels: tuple[int, ...] | None = None
    lambda_fracs: tuple[float, ...] | None = None
    c: float | None = None
    iters: int | None = None
    beta: float | None = None
    rho: float | None = None
    rel_tol: float = 0.0
    seed: int | None = None
    out: str | None = None
    zero_tol: float = DEFAULT_ZERO_TOL
    blocks: int = 10
    separation: float = 3.0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        noise_specs = sum(x is not None for x in (self.sigma, self.snr, self.delta_list))
        if noise_specs > 1:
            raise ValueError("specify at most one of sigma, snr, delta-list")
        lam_specs = sum(
            x is not None for x in (self.lambda_list, self.target_levels, self.lambda_fracs, self.c)
        )
        if lam_specs > 1:
            raise ValueError("specify at most one of lambda-list, target-levels, lambda-fracs, c")


@dataclass(frozen=True)
class SweepRow:
    """One table row; which fields are populated depends on the experiment."""

    lam: float | None = None
    delta: float | None = None
    sl: int | None = None
    bsl: int | None = None
    implied_level: int | None = None
    gamma: float | None = None
    mse: float | None = None
    psnr: float | None = None
    tra: float | None = None
    tea: float | None = None
    trm: float | None = None
    tem: float | None = None
    mse_over_delta: float | None = None
    err_over_delta: float | None = None
    b_star: float | None = None
    y_dot_c: float | None = None
    iterations: int | None = None


def format_value(value) -> str:
    """Deterministic cell text: ints verbatim, floats at 17 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def rows_to_csv(experiment: str, rows: list[SweepRow]) -> str:
    """Render rows under the fixed column schema of the experiment."""
    columns = EXPERIMENT_COLUMNS[experiment]
    lines = [",".join(header for header, _ in columns)]
    for row in rows:
        cells = []
        for header, attr in columns:
            value = getattr(row, attr)
            if value is None:
                raise ValueError(f"row missing value for column {header!r}")
            cells.append(format_value(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _require_seed(cfg: ExperimentConfig, why: str) -> int:
    if cfg.seed is None:
        raise ValueError(f"a --seed is required: {why}")
    return cfg.seed


def _noise_kwargs(cfg: ExperimentConfig) -> dict:
    if cfg.delta_list is not None:
        if len(cfg.delta_list) != 1:
            raise ValueError("a multi-valued delta list only makes sense for the balance experiment")
        return {"delta": float(cfg.delta_list[0])}
    if cfg.snr is not None:
        return {"snr": float(cfg.snr)}
    return {"sigma": float(cfg.sigma) if cfg.sigma is not None else 0.0}


def _noisy(cfg: ExperimentConfig, f: np.ndarray) -> tuple[np.ndarray, float]:
    kwargs = _noise_kwargs(cfg)
    if kwargs.get("sigma") == 0.0:
        return f.copy(), 0.0
    seed = _require_seed(cfg, "noise is drawn")
    return add_gaussian_noise(f, seed=seed, **kwargs)


def _resolve_iters(cfg: ExperimentConfig) -> int:
    return cfg.iters if cfg.iters is not None else DEFAULT_ITERS[cfg.experiment]


def _resolve_n(cfg: ExperimentConfig) -> int:
    return cfg.n if cfg.n is not None else DEFAULT_N[cfg.experiment]


def _input_signal(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.signal:
        return load_signal(cfg.signal)
    return doppler_signal(_resolve_n(cfg))


def _resolve_lambdas(cfg: ExperimentConfig, thresholds: ThresholdSet | None, lam_max: float | None) -> list[float]:
    if cfg.lambda_list is not None:
        return [float(v) for v in cfg.lambda_list]
    if cfg.target_levels is not None:
        if thresholds is None:
            raise ValueError(f"{cfg.experiment}: target levels are not supported (no threshold formula)")
        return [lambda_for_sparsity(thresholds, int(level)) for level in cfg.target_levels]
    if cfg.lambda_fracs is not None:
        if lam_max is None:
            raise ValueError(f"{cfg.experiment}: lambda fractions are not supported (no lambda_max formula)")
        return [float(frac) * lam_max for frac in cfg.lambda_fracs]
    raise ValueError(f"{cfg.experiment}: a parameter spec is required (lambda-list, target-levels or lambda-fracs)")


def _solve(
    cfg: ExperimentConfig,
    c_op,
    make_prox_phi: Callable[[float], Callable],
    make_prox_omega: Callable[[float], Callable],
) -> SolveReport:
    """Build the step-consistent prox pair and run the solver."""
    conf = default_config(c_op, max_iters=_resolve_iters(cfg), rel_tol=cfg.rel_tol, beta=cfg.beta, rho=cfg.rho)
    return fppa_solve(make_prox_phi(conf.beta), make_prox_omega(conf.rho), c_op, conf, zero_tol=cfg.zero_tol)


def _kink_tol(cfg: ExperimentConfig, report: SolveReport) -> float:
    """Width for treating computed margins as sitting on a loss kink.

    Support points converge to the kink exactly, so the interval test must
    absorb the remaining iterate error; the solver's final relative change
    is the available proxy for it.
    """
    return max(10.0 * cfg.zero_tol, 100.0 * report.final_rel_change)


# ----------------------------------------------------------------------
# signal experiments

def _run_lasso_identity(cfg: ExperimentConfig) -> list[SweepRow]:
    n = _resolve_n(cfg)
    seed = _require_seed(cfg, "the identity experiment draws its signal")
    f = box_muller(derived_rng(seed, STREAM_DATA), n)
    x, _ = _noisy(cfg, f)
    thresholds = ThresholdSet.from_values(np.abs(x))
    identity = LinearMap((n, n), matvec=lambda u: u, rmatvec=lambda u: u, norm_2=1.0)
    rows = []
    for lam in _resolve_lambdas(cfg, thresholds, float(np.abs(x).max())):
        report = _solve(
            cfg, identity,
            make_prox_phi=lambda beta, lam=lam: lambda z: prox_l1(z, lam * beta),
            make_prox_omega=lambda rho: lambda z: prox_square_fidelity(z, x, 1.0 / rho),
        )
        u = report.u_inf
        verdict = verify_general_characterization(u - x, u, lam, zero_tol=cfg.zero_tol)
        rows.append(SweepRow(
            lam=lam, sl=report.sparsity.level, gamma=verdict.gamma,
            mse=mse(f, u), iterations=report.iterations_run,
        ))
    return rows


def _run_image_dwt(cfg: ExperimentConfig) -> list[SweepRow]:
    img = read_pgm(cfg.image) if cfg.image else synthetic_test_image(cfg.n or 64)
    q = img.shape[0]
    if img.shape[0] != img.shape[1] or q & (q - 1):
        raise ValueError("image must be square with a power-of-two side")
    f = img.reshape(-1)
    x, _ = _noisy(cfg, f)
    w = daubechies_matrix(q, *cfg.wavelet)
    bx = kron_2d_apply(w, x)
    thresholds = ThresholdSet.from_values(np.abs(bx))
    synthesis = LinearMap(
        (q * q, q * q),
        matvec=lambda v: kron_2d_apply_t(w, v),
        rmatvec=lambda r: kron_2d_apply(w, r),
        norm_2=1.0,
    )
    rows = []
    for lam in _resolve_lambdas(cfg, thresholds, float(np.abs(bx).max())):
        report = _solve(
            cfg, synthesis,
            make_prox_phi=lambda beta, lam=lam: lambda z: prox_l1(z, lam * beta),
            make_prox_omega=lambda rho: lambda z: prox_square_fidelity(z, x, 1.0 / rho),
        )
        v = report.u_inf
        verdict = verify_general_characterization(v - bx, v, lam, zero_tol=cfg.zero_tol)
        rows.append(SweepRow(
            lam=lam, sl=report.sparsity.level, gamma=verdict.gamma,
            psnr=psnr(f, kron_2d_apply_t(w, v)), iterations=report.iterations_run,
        ))
    return rows


def _run_group_lasso(cfg: ExperimentConfig) -> list[SweepRow]:
    f = _input_signal(cfg)
    n = f.size
    x, _ = _noisy(cfg, f)
    w = daubechies_matrix(n, *cfg.wavelet)
    partition = dyadic_partition(n, cfg.blocks)
    coef = w @ x
    vals = [float(np.linalg.norm(coef[list(g)]) / np.sqrt(len(g))) for g in partition.groups]
    thresholds = ThresholdSet.from_values(vals)
    weights_unit = np.sqrt(np.asarray(partition.sizes, dtype=float))
    design = LinearMap((n, n), matvec=lambda u: w.T @ u, rmatvec=lambda r: w @ r, norm_2=1.0)
    rows = []
    for lam in _resolve_lambdas(cfg, thresholds, float(max(vals))):
        report = _solve(
            cfg, design,
            make_prox_phi=lambda beta, lam=lam: lambda z: prox_group_l2(z, partition, lam * beta * weights_unit),
            make_prox_omega=lambda rho: lambda z: prox_square_fidelity(z, x, 1.0 / rho),
        )
        u = report.u_inf
        grad = w @ (w.T @ u - x)
        verdict = verify_group_characterization(grad, u, lam, partition, zero_tol=cfg.zero_tol)
        rows.append(SweepRow(
            lam=lam, bsl=block_sparsity_level(u, partition, cfg.zero_tol).level,
            gamma=verdict.gamma, mse=mse(f, w.T @ u), iterations=report.iterations_run,
        ))
    return rows


def _tv_dual_coefficients(r: np.ndarray) -> np.ndarray:
    """Leading pseudoinverse-transpose coefficients of the first-difference
    matrix applied to ``r``: the solution of tridiag(-1, 2, -1) y = diff(r)."""
    rhs = np.diff(r)
    m = rhs.size
    cp = np.empty(m)
    dp = np.empty(m)
    cp[0] = -0.5
    dp[0] = rhs[0] / 2.0
    for i in range(1, m):
        denom = 2.0 + cp[i - 1]
        cp[i] = -1.0 / denom
        dp[i] = (rhs[i] + dp[i - 1]) / denom
    y = np.empty(m)
    y[-1] = dp[-1]
    for i in range(m - 2, -1, -1):
        y[i] = dp[i] - cp[i] * y[i + 1]
    return y


def tv_lambda_max_direct(x) -> tuple[float, np.ndarray]:
    """Total-variation lambda_max and the mean solution, without an SVD.

    Matches `l1pc.param_choice.tv_lambda_max` but runs in O(n) through the
    tridiagonal normal equations, so it scales to long signals.
    """
    x = np.asarray(x, dtype=float)
    return float(np.abs(_tv_dual_coefficients(x)).max()), np.full(x.size, x.mean())


def tv_verification(x, u, lam: float, zero_tol: float = DEFAULT_ZERO_TOL) -> tuple[float, float, int]:
    """(gamma, equality residual incl. the mean condition, sparsity of Du).

    Direct O(n) evaluation of the transform-domain optimality check for the
    total-variation model.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    z = np.diff(u)
    w = _tv_dual_coefficients(u - x)
    support = sparsity_level(z, tol=zero_tol).support
    on = np.zeros(z.size, dtype=bool)
    on[list(support)] = True
    gamma = float(np.abs(w[~on]).max()) if (~on).any() else 0.0
    residual = float(np.abs(lam + w[on] * np.sign(z[on])).max()) if on.any() else 0.0
    residual = max(residual, float(abs((u - x).sum()) / np.sqrt(x.size)))
    return gamma, residual, len(support)


def _run_tv_signal(cfg: ExperimentConfig) -> list[SweepRow]:
    f = _input_signal(cfg)
    n = f.size
    x, _ = _noisy(cfg, f)
    lam_max, _ = tv_lambda_max_direct(x)
    diff_op = first_difference_map(n)
    rows = []
    for lam in _resolve_lambdas(cfg, None, lam_max):
        report = _solve(
            cfg, diff_op,
            make_prox_phi=lambda beta: lambda z: prox_square_fidelity(z, x, beta),
            make_prox_omega=lambda rho, lam=lam: lambda z: prox_l1(z, lam / rho),
        )
        u = report.u_inf
        gamma, _, sl = tv_verification(x, u, lam, cfg.zero_tol)
        rows.append(SweepRow(lam=lam, gamma=gamma, sl=sl, mse=mse(f, u), iterations=report.iterations_run))
    return rows


# ----------------------------------------------------------------------
# kernel-machine experiments

def _svm_data(cfg: ExperimentConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(train X, train y, test X, test y); test defaults to the train data."""
    if cfg.dataset:
        x, y = load_csv_dataset(cfg.dataset)
        if cfg.test_dataset:
            xt, yt = load_csv_dataset(cfg.test_dataset)
        else:
            xt, yt = x, y
        return x, y, xt, yt
    n = _resolve_n(cfg)
    seed = _require_seed(cfg, "synthetic data is drawn")
    x, y = synth_two_class(n, 2, cfg.separation, seed)
    xt, yt = synth_two_class(n, 2, cfg.separation, seed + 1)
    return x, y, xt, yt


def _prox_leading_l1(w: np.ndarray, t: float, n_lead: int) -> np.ndarray:
    out = w.copy()
    out[:n_lead] = prox_l1(w[:n_lead], t)
    return out


def _kernel_blocks(cfg: ExperimentConfig, x: np.ndarray, xt: np.ndarray):
    k = gaussian_kernel_matrix(x, cfg.mu)
    k_prime = np.hstack([k, np.ones((k.shape[0], 1))])
    k_test = gaussian_kernel_matrix(xt, cfg.mu, x)
    return k, k_prime, k_test


def _svm_predictions(k_mat: np.ndarray, u: np.ndarray) -> np.ndarray:
    return k_mat @ u[:-1] + u[-1]


def _run_svm_square(cfg: ExperimentConfig) -> list[SweepRow]:
    x, y, xt, yt = _svm_data(cfg)
    k, k_prime, k_test = _kernel_blocks(cfg, x, xt)
    n = y.size
    lam_max, _ = svm_square_lambda_max(k, y)
    t = degenerate_identity_transform(n, n + 1)
    norm_c = float(np.linalg.norm(k_prime, 2))
    c_op = LinearMap((n, n + 1), matvec=lambda u: k_prime @ u, rmatvec=lambda r: k_prime.T @ r, norm_2=norm_c)
    rows = []
    for lam in _resolve_lambdas(cfg, None, lam_max):
        report = _solve(
            cfg, c_op,
            make_prox_phi=lambda beta, lam=lam: lambda w: _prox_leading_l1(w, lam * beta, n),
            make_prox_omega=lambda rho: lambda w: prox_square_fidelity(w, y, 1.0 / rho),
        )
        u = report.u_inf
        a = k_prime.T @ (k_prime @ u - y)
        verdict = verify_transform_characterization(t, a, lam, u[:n], zero_tol=cfg.zero_tol)
        rows.append(SweepRow(
            lam=lam, gamma=verdict.gamma, sl=sparsity_level(u[:n], cfg.zero_tol).level,
            tra=classification_accuracy(_svm_predictions(k, u), y),
            tea=classification_accuracy(_svm_predictions(k_test, u), yt),
            iterations=report.iterations_run,
        ))
    return rows


def _run_svm_hinge(cfg: ExperimentConfig) -> list[SweepRow]:
    x, y, xt, yt = _svm_data(cfg)
    k, k_prime, k_test = _kernel_blocks(cfg, x, xt)
    n = y.size
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("hinge classification needs labels +1/-1")
    yk_prime = y[:, None] * k_prime
    t = degenerate_identity_transform(n, n + 1)
    norm_c = float(np.linalg.norm(yk_prime, 2))
    c_op = LinearMap((n, n + 1), matvec=lambda u: yk_prime @ u, rmatvec=lambda r: yk_prime.T @ r, norm_2=norm_c)
    rows = []
    for lam in _resolve_lambdas(cfg, None, None):
        report = _solve(
            cfg, c_op,
            make_prox_phi=lambda beta, lam=lam: lambda w: _prox_leading_l1(w, lam * beta, n),
            make_prox_omega=lambda rho: lambda w: prox_hinge_sum(w, 1.0 / rho),
        )
        u = report.u_inf
        lo, hi = hinge_subdiff_box(yk_prime @ u, kink_tol=_kink_tol(cfg, report))
        verdict = verify_transform_characterization(
            t, SubgradientBox(yk_prime, lo, hi), lam, u[:n], zero_tol=cfg.zero_tol
        )
        rows.append(SweepRow(
            lam=lam, gamma=verdict.gamma, sl=sparsity_level(u[:n], cfg.zero_tol).level,
            tra=classification_accuracy(_svm_predictions(k, u), y),
            tea=classification_accuracy(_svm_predictions(k_test, u), yt),
            iterations=report.iterations_run,
        ))
    return rows


def _run_svm_eps(cfg: ExperimentConfig) -> list[SweepRow]:
    x, y, xt, yt = _svm_data(cfg)
    k, k_prime, k_test = _kernel_blocks(cfg, x, xt)
    n = y.size
    t = degenerate_identity_transform(n, n + 1)
    norm_c = float(np.linalg.norm(k_prime, 2))
    c_op = LinearMap((n, n + 1), matvec=lambda u: k_prime @ u, rmatvec=lambda r: k_prime.T @ r, norm_2=norm_c)
    rows = []
    for lam in _resolve_lambdas(cfg, None, None):
        report = _solve(
            cfg, c_op,
            make_prox_phi=lambda beta, lam=lam: lambda w: _prox_leading_l1(w, lam * beta, n),
            make_prox_omega=lambda rho: lambda w: prox_eps_insensitive_sum(w, y, cfg.eps, 1.0 / rho),
        )
        u = report.u_inf
        lo, hi = eps_insensitive_subdiff_box(k_prime @ u, y, cfg.eps, kink_tol=_kink_tol(cfg, report))
        verdict = verify_transform_characterization(
            t, SubgradientBox(k_prime, lo, hi), lam, u[:n], zero_tol=cfg.zero_tol
        )
        rows.append(SweepRow(
            lam=lam, gamma=verdict.gamma, sl=sparsity_level(u[:n], cfg.zero_tol).level,
            trm=mse(y, _svm_predictions(k, u)), tem=mse(yt, _svm_predictions(k_test, u)),
            iterations=report.iterations_run,
        ))
    return rows


def _run_logistic_check(cfg: ExperimentConfig) -> list[SweepRow]:
    if cfg.dataset:
        x, y = load_csv_dataset(cfg.dataset)
    else:
        n = _resolve_n(cfg)
        seed = _require_seed(cfg, "synthetic data is drawn")
        x, y = synth_two_class(n, 2, cfg.separation, seed)
    choice = logistic_lambda_max(x, y)
    return [SweepRow(lam=choice.lambda_max, b_star=choice.b_star, y_dot_c=choice.y_dot_c)]


# ----------------------------------------------------------------------
# balance experiment

def _run_balance(cfg: ExperimentConfig) -> list[SweepRow]:
    f = _input_signal(cfg)
    n = f.size
    w = dct_matrix(n) if cfg.use_dct else daubechies_matrix(n, *cfg.wavelet)
    u_tilde = w @ f
    design = LinearMap((n, n), matvec=lambda u: w.T @ u, rmatvec=lambda r: w @ r, norm_2=1.0)

    def solve_row(x_delta: np.ndarray, lam: float, implied: int, realized: float) -> SweepRow:
        report = _solve(
            cfg, design,
            make_prox_phi=lambda beta: lambda z: prox_l1(z, lam * beta),
            make_prox_omega=lambda rho: lambda z: prox_square_fidelity(z, x_delta, 1.0 / rho),
        )
        u = report.u_inf
        m = mse(f, w.T @ u)
        return SweepRow(
            delta=realized, lam=lam, implied_level=implied, sl=report.sparsity.level,
            mse=m, mse_over_delta=m / realized,
            err_over_delta=float(np.linalg.norm(u - u_tilde)) / realized,
            iterations=report.iterations_run,
        )

    rows = []
    if cfg.c is not None:
        if not cfg.delta_list:
            raise ValueError("balance with c needs a delta list")
        seed = _require_seed(cfg, "noise is drawn per noise level")
        for i, delta in enumerate(cfg.delta_list):
            x_delta, realized = add_gaussian_noise(f, delta=float(delta), seed=seed, subkeys=(STREAM_NOISE, i))
            thresholds = ThresholdSet.from_values(np.abs(w @ x_delta))
            lam, implied = balance_strategy(thresholds, c=cfg.c, delta=realized)
            rows.append(solve_row(x_delta, lam, implied, realized))
        return rows

    if cfg.target_levels is None:
        raise ValueError("balance needs either c with a delta list or target levels")
    x_delta, realized = _noisy(cfg, f)
    if realized == 0.0:
        raise ValueError("balance is noise driven; give a positive noise spec")
    thresholds = ThresholdSet.from_values(np.abs(w @ x_delta))
    for level in cfg.target_levels:
        lam, implied = balance_strategy(thresholds, target_level=int(level))
        rows.append(solve_row(x_delta, lam, implied, realized))
    return rows


_RUNNERS = {
    "lasso-identity": _run_lasso_identity,
    "image-dwt": _run_image_dwt,
    "group-lasso": _run_group_lasso,
    "tv-signal": _run_tv_signal,
    "svm-square": _run_svm_square,
    "svm-hinge": _run_svm_hinge,
    "svm-eps": _run_svm_eps,
    "logistic-check": _run_logistic_check,
    "balance": _run_balance,
}


def run_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """Run one experiment sweep; writes the CSV when ``cfg.out`` is set."""
    rows = _RUNNERS[cfg.experiment](cfg)
    if cfg.out:
        Path(cfg.out).write_text(rows_to_csv(cfg.experiment, rows), encoding="ascii")
    return rows
