"""Orthogonal polynomials for smoothly perturbed Chebyshev weights."""

from .cheb_core import ChebSeries, cheb_coeffs, cheb_nodes, clenshaw, clenshaw_eval
from .dbar_extension import (
    ExtensionField,
    ExtensionParams,
    L_field,
    Lambda_n,
    build_l_n,
    bump_psi,
    lambda_n,
)
from .errors import (
    AccuracyDomainError,
    ChebpertError,
    InsufficientDataError,
    InvalidArgumentError,
    NumericDomainError,
    PrecisionLossError,
    ResolutionError,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    dumps_report,
    fit_rate,
    predict_exterior,
    predict_interval,
    run_experiment,
)
from .orthopoly import (
    RecurrenceTable,
    eval_exterior_ratio,
    eval_scaled_monic,
    gauss_cheb_integrate,
    second_kind_R,
    stieltjes_recurrence,
)
from .szego import (
    SzegoData,
    build_szego,
    phi,
    sqrt_w,
    szego_S,
    szego_Si,
    theta_i,
    theta_phase,
)
from .weights import (
    WeightSpec,
    const_weight,
    epsilon_n,
    exp_weight,
    holder_weight,
    modulus_of_continuity,
    parse_weight,
    recip_poly_weight,
)

__version__ = "0.1.0"
