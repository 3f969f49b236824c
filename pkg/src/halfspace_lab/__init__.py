"""Noisy-halfspace learning testbed.

Synthetic labeled distributions with exact planar densities, logistic and
hinge optimizers, quadrature/geometry risk oracles, and a reproduction
CLI (`halfspace-lab`).
"""

from .core import angle_between, project_ball, project_halfspace, sign_predict
from .distributions import (
    CapabilityError,
    DistributionModel,
    LowerBoundParams,
    check_moments,
    check_sub_exponential,
    check_well_behaved,
    density_q,
    dump_samples,
    make_gaussian_noisy,
    make_lower_bound_q,
    make_smooth_benchmark,
    sample,
)
from .losses import Hinge, Logistic, TruncatedLogistic, loss_deriv, loss_value
from .optimize import (
    OracleReport,
    PgdConfig,
    SgdConfig,
    Trajectory,
    TwoPhaseResult,
    oracle_global_min,
    oracle_global_min_q,
    pgd_logistic,
    reference_axis_minimum,
    sgd_hinge_phase2,
    two_phase,
)
from .oracle import QuadratureSpec, finite_diff_grad, grid_refine_minimize, quad2d
from .risk import (
    DecompositionReport,
    RiskReport,
    decomposition_terms,
    empirical_grad,
    empirical_risk,
    evaluate_report,
    hinge_m,
    mc_zero_one,
    population_grad,
    population_grad_q,
    population_risk,
    population_risk_q,
    zero_one_exact,
    zero_one_risk_q,
)

__version__ = "0.1.0"
