"""Parameter-choice strategies for l1-regularized problems, with the
fixed-point proximity solver and the oracles that verify every
characterization at desk scale."""

from .core import (
    Partition,
    SparsityReport,
    block_sparsity_level,
    dyadic_partition,
    natural_partition,
    sparsity_level,
    subvector,
)
from .fppa import DivergenceError, FppaConfig, LinearMap, SolveReport, StepSizeError, default_config, fppa_solve, spectral_norm
from .oracle import GridSpec, fermat_residual, grid_minimize_1d, orthogonal_group_lasso_closed_form, orthogonal_lasso_closed_form
from .param_choice import (
    CharacterizationVerdict,
    LogisticChoice,
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
from .prox import (
    AbsLoss,
    EpsInsensitiveLoss,
    HingeLoss,
    SquareLoss,
    SubdiffInterval,
    prox_eps_insensitive_sum,
    prox_group_l2,
    prox_hinge_sum,
    prox_l1,
    prox_square_fidelity,
    subdiff_at,
)
from .transforms import (
    SvdTransform,
    daubechies_matrix,
    dct_matrix,
    degenerate_identity_transform,
    first_difference,
    first_difference_map,
    gaussian_kernel_matrix,
    haar_matrix,
    kron_2d,
    kron_2d_apply,
    kron_2d_apply_t,
    kth_difference,
    mapping_b,
    svd,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
