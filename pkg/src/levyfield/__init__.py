"""Levy white-noise fields on grids: exponents, characteristic
functionals, spectral and line-quadrature left inverses, sparse-process
synthesis and statistical validation."""

from .charfunc import (
    BoundConstants,
    H_metric,
    bound_constants,
    characteristic_functional,
    finite_dim_cf,
    generalized_exponent,
    h_metric,
    psd_gram_check,
    verify_continuity_bound,
    verify_g_bound,
)
from .dirops import (
    DirFactor,
    FracFactor,
    OperatorSpec,
    compose_adjoint_left_inverse,
    directional_derivative,
    marginal_adjoint_left_inverse,
    marginal_right_inverse,
    modulation,
    stable_inverse,
)
from .fracops import (
    CorrectionPlan,
    FracOrder,
    corrected_riesz,
    forbidden_set,
    frac_laplacian,
    interval_for,
    k_count,
    matching_k,
    riesz_potential,
)
from .grids import SampledFunction, gaussian_bump, wave_packet
from .levy import (
    CompoundPoisson,
    CustomDensity,
    Dirac,
    GaussianLaw,
    LevyMeasure,
    LevyTriplet,
    MomentReport,
    SAlphaStable,
    TwoPoint,
    Uniform,
    VarianceGamma,
    in_class,
    is_levy_schwartz,
    jump_exponent,
    levy_exponent,
    moment,
)
from .synth import (
    FieldRealization,
    sample_innovation,
    synthesize_directional,
    synthesize_self_similar,
)
from .validate import (
    compatibility_certificate,
    ecf_vs_analytic,
    excess_kurtosis,
    stationarity_test,
)

__version__ = "0.1.0"
