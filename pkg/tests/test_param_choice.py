import numpy as np
import pytest

from l1pc.core import Partition, natural_partition
from l1pc.oracle import orthogonal_group_lasso_closed_form, orthogonal_lasso_closed_form
from l1pc.param_choice import (
    SubgradientBox,
    ThresholdSet,
    balance_strategy,
    block_thresholds,
    check_block_separability,
    group_lasso_thresholds,
    lambda_for_sparsity,
    lasso_identity_thresholds,
    logistic_lambda_max,
    min_norm_uniqueness_check,
    sufficient_sparsity_bound,
    svm_square_lambda_max,
    tv_lambda_max,
    verify_general_characterization,
    verify_group_characterization,
    verify_separable_zero,
    verify_transform_characterization,
)
from l1pc.prox import SquareLoss, prox_l1, subdiff_at
from l1pc.transforms import degenerate_identity_transform, first_difference, svd
from l1pc.core import block_sparsity_level, sparsity_level


# ---------------------------------------------------------------- thresholds

def test_lambda_for_sparsity_order_statistics():
    t = ThresholdSet.from_values([5.0, 3.0, 1.0])
    assert lambda_for_sparsity(t, 0) == 5.0
    assert lambda_for_sparsity(t, 1) == 3.0
    assert lambda_for_sparsity(t, 2) == 1.0
    assert lambda_for_sparsity(t, 3) == 0.0
    with pytest.raises(ValueError):
        lambda_for_sparsity(t, 4)


def test_lasso_identity_thresholds():
    t = lasso_identity_thresholds([3.0, -1.0, 2.0])
    assert t.values.tolist() == [3.0, 1.0, 2.0]
    assert t.order.tolist() == [1, 2, 0]
    assert lasso_identity_thresholds(np.zeros(3)).values.tolist() == [0.0, 0.0, 0.0]


def test_threshold_set_rejects_bad_input():
    with pytest.raises(ValueError):
        ThresholdSet.from_values([-1.0])
    with pytest.raises(ValueError):
        ThresholdSet.from_values([])


def test_block_separability():
    s = natural_partition(2)
    assert check_block_separability(np.eye(2), s)
    assert not check_block_separability(np.array([[1.0, 1.0], [0.0, 1.0]]), s)
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    assert check_block_separability(q, Partition(((0, 1, 2), (3,), (4, 5))))


def test_block_thresholds():
    s = natural_partition(2)
    t = block_thresholds(np.eye(2), [3.0, -1.0], s)
    assert t.values.tolist() == [3.0, 1.0]
    assert block_thresholds(np.eye(2), np.zeros(2), s).values.tolist() == [0.0, 0.0]


def test_block_thresholds_orthogonal_matches_coefficients():
    rng = np.random.default_rng(1)
    a, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    x = rng.standard_normal(5)
    t = block_thresholds(a, x, natural_partition(5))
    np.testing.assert_allclose(t.values, np.abs(a.T @ x))


def test_block_thresholds_warn_when_not_separable():
    with pytest.warns(UserWarning):
        block_thresholds(np.array([[1.0, 1.0], [0.0, 1.0]]), [1.0, 1.0], natural_partition(2))


def test_group_lasso_thresholds():
    t = group_lasso_thresholds(np.eye(2), [3.0, 4.0], Partition(((0, 1),)))
    np.testing.assert_allclose(t.values, [5.0 / np.sqrt(2.0)])
    assert group_lasso_thresholds(np.eye(3), np.zeros(3), natural_partition(3)).values.tolist() == [0.0] * 3
    rng = np.random.default_rng(2)
    a, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    x = rng.standard_normal(4)
    np.testing.assert_allclose(
        group_lasso_thresholds(a, x, natural_partition(4)).values,
        block_thresholds(a, x, natural_partition(4)).values,
    )


# ------------------------------------------------------------- verification

def test_verify_separable_zero():
    iv3 = subdiff_at(SquareLoss(3.0), 0.0)
    assert verify_separable_zero([iv3], 3.0).tolist() == [True]
    assert verify_separable_zero([iv3], 2.9).tolist() == [False]
    # a loss minimized at zero admits the zero solution for every parameter
    flat = subdiff_at(SquareLoss(0.0), 0.0)
    assert verify_separable_zero([flat], 1e-9).tolist() == [True]


def test_verify_general_characterization_example():
    u = np.array([1.0, 0.0])
    x = np.array([3.0, 1.0])
    verdict = verify_general_characterization(u - x, u, 2.0)
    assert verdict.holds
    assert verdict.gamma == pytest.approx(1.0)
    assert verdict.equality_residual == pytest.approx(0.0, abs=1e-14)
    assert verdict.support_used == (0,)


def test_verify_general_zero_solution():
    grad0 = np.array([0.5, -1.5])
    verdict = verify_general_characterization(grad0, np.zeros(2), 1.5)
    assert verdict.holds and verdict.support_used == ()


def test_verify_general_rejects_small_lambda():
    u = np.array([1.0, 0.0])
    x = np.array([3.0, 1.0])
    verdict = verify_general_characterization(u - x, u, 0.5)
    assert not verdict.holds
    assert verdict.gamma == pytest.approx(1.0)


def test_verify_group_characterization():
    rng = np.random.default_rng(3)
    a, _ = np.linalg.qr(rng.standard_normal((8, 8)))
    x = rng.standard_normal(8) * 2
    s = Partition(((0, 1, 2), (3, 4), (5, 6, 7)))
    t = group_lasso_thresholds(a, x, s)
    lam = float(np.sort(t.values)[1])  # keeps exactly one block active
    u = orthogonal_group_lasso_closed_form(a, x, s, lam)
    verdict = verify_group_characterization(a.T @ (a @ u - x), u, lam, s)
    assert verdict.holds
    assert verdict.gamma <= lam + 1e-9
    assert len(verdict.support_used) == block_sparsity_level(u, s).level


def test_sufficient_sparsity_bound():
    assert sufficient_sparsity_bound([0.5], 0.1, [1.0], 0.61, [])
    assert not sufficient_sparsity_bound([0.5], 0.1, [1.0], 0.60, [])  # strictness
    # eps = 0 reduces to the strict plain inequality
    assert sufficient_sparsity_bound([0.5, 2.0], 0.0, [1.0, 1.0], 0.51, [1])
    assert not sufficient_sparsity_bound([0.5, 2.0], 0.0, [1.0, 1.0], 0.5, [1])


def test_transform_characterization_identity_reduces_to_general():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(5)
    lam = 0.8
    u = prox_l1(x, lam)
    t = svd(np.eye(5))
    v1 = verify_transform_characterization(t, u - x, lam, u)
    v2 = verify_general_characterization(u - x, u, lam)
    assert v1.holds == v2.holds
    assert v1.gamma == pytest.approx(v2.gamma)
    assert v1.support_used == v2.support_used


def test_transform_characterization_tv_mean_solution():
    x = np.array([1.0, 2.0, 3.0])
    t = svd(first_difference(3))
    u_star = np.full(3, 2.0)
    verdict = verify_transform_characterization(t, u_star - x, 2.0, np.diff(u_star))
    assert verdict.holds
    assert verdict.equality_residual <= 1e-12  # the mean condition is exact here
    assert verdict.gamma <= 2.0


def test_transform_characterization_svm_square_most_sparse():
    rng = np.random.default_rng(5)
    n = 12
    pts = rng.standard_normal((n, 2))
    from l1pc.transforms import gaussian_kernel_matrix

    k = gaussian_kernel_matrix(pts, 1.0)
    y = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    k_prime = np.hstack([k, np.ones((n, 1))])
    lam_max, u_star = svm_square_lambda_max(k, y)
    a = k_prime.T @ (k_prime @ u_star - y)
    t = degenerate_identity_transform(n, n + 1)
    verdict = verify_transform_characterization(t, a, lam_max, u_star[:n])
    assert verdict.holds
    assert verdict.gamma == pytest.approx(lam_max, rel=1e-12)
    assert verdict.equality_residual <= 1e-10  # the bias condition 1^T residual = 0


def test_transform_characterization_box_reduction():
    # one active coordinate, box subgradients covering the exact certificate
    t = degenerate_identity_transform(2, 3)
    m = np.eye(3)
    lam = 1.0
    z = np.array([2.0, 0.0])
    box = SubgradientBox(m, np.array([-1.5, -0.3, -0.1]), np.array([-0.5, 0.3, 0.1]))
    verdict = verify_transform_characterization(t, box, lam, z)
    assert verdict.holds
    assert verdict.gamma == 0.0  # off-support interval crosses zero
    box_bad = SubgradientBox(m, np.array([-0.5, -0.3, -0.1]), np.array([-0.2, 0.3, 0.1]))
    verdict = verify_transform_characterization(t, box_bad, lam, z)
    assert verdict.equality_residual == pytest.approx(0.5)


def test_transform_characterization_requires_full_row_rank():
    t = svd(np.array([[1.0, 0.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        verify_transform_characterization(t, np.zeros(2), 1.0, np.zeros(2))


# ----------------------------------------------------------- model lambdas

def test_tv_lambda_max_examples():
    x = np.array([1.0, 2.0, 3.0])
    t = svd(first_difference(3))
    lam_max, u_star = tv_lambda_max(x, t)
    np.testing.assert_allclose(u_star, [2.0, 2.0, 2.0])
    const = np.full(4, 1.7)
    t4 = svd(first_difference(4))
    lam0, _ = tv_lambda_max(const, t4)
    assert lam0 <= 1e-12


def test_tv_lambda_max_solver_sharpness():
    from l1pc.fppa import FppaConfig, fppa_solve
    from l1pc.prox import prox_square_fidelity

    rng = np.random.default_rng(6)
    x = rng.standard_normal(24)
    t = svd(first_difference(24))
    lam_max, u_star = tv_lambda_max(x, t)
    d = first_difference(24)

    def solve(lam):
        cfg = FppaConfig(beta=1.0 / 64.0, rho=0.9801 * 32.0 / 2.0, max_iters=40000, rel_tol=1e-14)
        return fppa_solve(
            lambda w: prox_square_fidelity(w, x, cfg.beta),
            lambda w: prox_l1(w, lam / cfg.rho),
            d,
            cfg,
        ).u_inf

    at_max = solve(lam_max)
    np.testing.assert_allclose(at_max, u_star, atol=1e-7)
    below = solve(0.99 * lam_max)
    assert np.abs(np.diff(below)).max() > 1e-6


def test_svm_square_lambda_max_solver_sharpness():
    from l1pc.fppa import FppaConfig, fppa_solve
    from l1pc.prox import prox_square_fidelity
    from l1pc.transforms import gaussian_kernel_matrix
    from l1pc.data import synth_two_class

    pts, y = synth_two_class(20, 2, 2.0, seed=14)
    k = gaussian_kernel_matrix(pts, 1.0)
    k_prime = np.hstack([k, np.ones((20, 1))])
    lam_max, u_star = svm_square_lambda_max(k, y)
    norm_c = float(np.linalg.norm(k_prime, 2))

    def solve(lam):
        cfg = FppaConfig(beta=1.0 / norm_c, rho=0.9801 / norm_c, max_iters=60000, rel_tol=1e-15)

        def prox_phi(w):
            out = w.copy()
            out[:20] = prox_l1(w[:20], lam * cfg.beta)
            return out

        return fppa_solve(prox_phi, lambda w: prox_square_fidelity(w, y, 1.0 / cfg.rho), k_prime, cfg).u_inf

    at_max = solve(lam_max)
    assert np.abs(at_max[:20]).max() <= 1e-8
    assert at_max[20] == pytest.approx(y.mean(), abs=1e-8)
    below = solve(0.95 * lam_max)
    assert np.abs(below[:20]).max() > 1e-6


def test_svm_square_lambda_max_examples():
    lam_max, u_star = svm_square_lambda_max(np.eye(2), [1.0, -1.0])
    assert lam_max == pytest.approx(1.0)
    np.testing.assert_allclose(u_star, [0.0, 0.0, 0.0])
    lam0, u0 = svm_square_lambda_max(np.eye(3), [2.0, 2.0, 2.0])
    assert lam0 == 0.0
    assert u0[-1] == pytest.approx(2.0)


def test_logistic_lambda_max_balanced():
    choice = logistic_lambda_max(np.array([[1.0], [-1.0]]), [1.0, -1.0])
    assert choice.b_star == 0.0
    np.testing.assert_allclose(choice.c, [0.5, 0.5])
    assert choice.lambda_max == pytest.approx(0.5)
    assert choice.y_dot_c == 0.0


def test_logistic_lambda_max_unbalanced():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((9, 3))
    y = np.array([1.0] * 6 + [-1.0] * 3)
    choice = logistic_lambda_max(x, y)
    assert choice.b_star == pytest.approx(np.log(2.0))
    assert abs(choice.y_dot_c) <= 1e-12


def test_logistic_lambda_max_single_class_rejected():
    with pytest.raises(ValueError):
        logistic_lambda_max(np.ones((3, 1)), [1.0, 1.0, 1.0])


# --------------------------------------------------------------- strategies

def test_balance_strategy_level_mode():
    t = ThresholdSet.from_values([1.0, 2.0, 4.0])
    lam, level = balance_strategy(t, target_level=1)
    assert (lam, level) == (2.0, 1)
    lam, level = balance_strategy(t, target_level=3)
    assert level == 3 and 0.0 < lam < 1e-300


def test_balance_strategy_scaled_mode():
    t = ThresholdSet.from_values([1.0, 2.0, 4.0])
    lam, level = balance_strategy(t, c=0.5, delta=2.0)
    assert lam == pytest.approx(1.0)
    assert level == 2  # thresholds 2 and 4 exceed 1


def test_balance_strategy_mode_exclusivity():
    t = ThresholdSet.from_values([1.0])
    with pytest.raises(ValueError):
        balance_strategy(t)
    with pytest.raises(ValueError):
        balance_strategy(t, target_level=0, c=1.0, delta=1.0)
    with pytest.raises(ValueError):
        balance_strategy(t, c=1.0)


# ----------------------------------------------------------------- min norm

def test_min_norm_square_invertible():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    u = rng.standard_normal(4)
    assert min_norm_uniqueness_check(a, a @ u, u) == "unique"


def test_min_norm_hand_examples():
    assert min_norm_uniqueness_check(np.array([[1.0, 1.0]]), [1.0], [1.0, 0.0]) == "inconclusive"
    assert min_norm_uniqueness_check(np.array([[1.0, 0.5]]), [1.0], [1.0, 0.0]) == "unique"


def test_min_norm_violations():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert min_norm_uniqueness_check(a, [1.0, 1.0], [1.0, 0.0]) == "violated"


# --------------------------------------------------- solver/threshold ties

def test_threshold_solver_agreement_identity():
    rng = np.random.default_rng(9)
    x = rng.standard_normal(20) * 3
    t = lasso_identity_thresholds(x)
    for level in range(21):
        lam = lambda_for_sparsity(t, level) + 1e-9
        u = prox_l1(x, lam)
        achieved = sparsity_level(u, tol=0.0).level
        assert achieved == min(level, int(np.sum(np.abs(x) > lam)))


def test_threshold_solver_agreement_orthogonal():
    rng = np.random.default_rng(10)
    n = 20
    a, _ = np.linalg.qr(rng.standard_normal((n, n)))
    x = rng.standard_normal(n)
    t = block_thresholds(a, x, natural_partition(n))
    sorted_vals = np.sort(t.values)
    for level in range(n):
        lam = lambda_for_sparsity(t, level) + 1e-9
        u = orthogonal_lasso_closed_form(a, x, lam)
        assert sparsity_level(u, tol=0.0).level <= level
        if level > 0 and sorted_vals[n - 1 - level] < sorted_vals[n - level] - 2e-9:
            mid = 0.5 * (sorted_vals[n - 1 - level] + sorted_vals[n - level])
            u_mid = orthogonal_lasso_closed_form(a, x, mid)
            assert sparsity_level(u_mid, tol=0.0).level == level


def test_group_threshold_solver_agreement():
    rng = np.random.default_rng(11)
    n = 16
    a, _ = np.linalg.qr(rng.standard_normal((n, n)))
    x = rng.standard_normal(n)
    s = Partition((tuple(range(0, 4)), tuple(range(4, 8)), tuple(range(8, 12)), tuple(range(12, 16))))
    t = group_lasso_thresholds(a, x, s)
    sorted_vals = np.sort(t.values)
    for level in range(s.d + 1):
        lam = lambda_for_sparsity(t, level) + 1e-12
        u = orthogonal_group_lasso_closed_form(a, x, s, lam)
        assert block_sparsity_level(u, s, tol=0.0).level <= level
        if 0 < level < s.d:
            mid = 0.5 * (sorted_vals[s.d - 1 - level] + sorted_vals[s.d - level])
            u_mid = orthogonal_group_lasso_closed_form(a, x, s, mid)
            assert block_sparsity_level(u_mid, s, tol=0.0).level == level


def test_sparsity_monotone_in_lambda():
    rng = np.random.default_rng(12)
    x = rng.standard_normal(30)
    levels = []
    for lam in np.linspace(1e-3, np.abs(x).max() * 1.1, 40):
        levels.append(sparsity_level(prox_l1(x, lam), tol=0.0).level)
    assert all(a >= b for a, b in zip(levels, levels[1:]))


def test_balance_implied_level_matches_block_solution():
    rng = np.random.default_rng(13)
    n = 12
    a, _ = np.linalg.qr(rng.standard_normal((n, n)))
    x = rng.standard_normal(n)
    s = Partition((tuple(range(0, 3)), tuple(range(3, 6)), tuple(range(6, 9)), tuple(range(9, 12))))
    t = group_lasso_thresholds(a, x, s)
    c, delta = 0.9, float(np.median(t.values) / 0.9)
    lam, implied = balance_strategy(t, c=c, delta=delta)
    u = orthogonal_group_lasso_closed_form(a, x, s, lam)
    assert block_sparsity_level(u, s, tol=0.0).level == implied
