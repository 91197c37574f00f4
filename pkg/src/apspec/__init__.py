"""Spectral factorization of nonnegative band-limited almost periodic functions."""

from apspec.cepstral import (
    AlmostPeriodReport,
    ArgDecomposition,
    almost_period_test,
    arg_decompose,
    bohr_project,
    cepstral_factorize,
    conjugate_boundary,
    half_log,
)
from apspec.certify import (
    NormBracket,
    certify_lower_bound,
    integer_lattice_sup,
    sup_norm_certified,
)
from apspec.checks import (
    BernsteinResult,
    CheckResult,
    DecayTable,
    FactorizationReport,
    asym_decay_check,
    bernstein_check,
    factorization_residual,
    inverse_poisson_identity,
    poisson_eval,
)
from apspec.construction import (
    ConstructionParams,
    ConstructionResult,
    assemble,
    build_g,
    build_q,
    cesaro_p,
    choose_rho,
    recheck,
    safety_margin,
    select_n_sequence,
    wiener_growth_table,
)
from apspec.errors import (
    ApspecError,
    IncommensurableSpectrum,
    MalformedInput,
    NonConvergence,
    NotBoundedBelow,
    NotNonnegative,
    OddRealMultiplicity,
    OracleTooSmall,
    ReciprocalApproximationFailed,
    SpectraCollision,
    WindowTooSmall,
)
from apspec.frequency import ExactFrequency, qlin_independent, rational_ratio
from apspec.periodic import LaurentForm, commensurable_base, fejer_riesz, polynomial_roots
from apspec.products import (
    EntireFactor,
    LindelofReport,
    ZeroSet,
    ahiezer_split,
    factor_from_zeros,
    lindelof_check,
    log_integrability,
    product_eval,
    weierstrass_factor,
)
from apspec.sampling import SampledFunction
from apspec.trigpoly import (
    ProductPoly,
    SpectrumInfo,
    TrigPoly,
    bohr_coefficient,
    mean_value_numeric,
    modulus_squared,
    spectrum,
)

__all__ = [
    "AlmostPeriodReport",
    "ApspecError",
    "ArgDecomposition",
    "BernsteinResult",
    "CheckResult",
    "ConstructionParams",
    "ConstructionResult",
    "DecayTable",
    "EntireFactor",
    "ExactFrequency",
    "FactorizationReport",
    "IncommensurableSpectrum",
    "LaurentForm",
    "LindelofReport",
    "MalformedInput",
    "NonConvergence",
    "NormBracket",
    "NotBoundedBelow",
    "NotNonnegative",
    "OddRealMultiplicity",
    "OracleTooSmall",
    "ProductPoly",
    "ReciprocalApproximationFailed",
    "SampledFunction",
    "SpectraCollision",
    "SpectrumInfo",
    "TrigPoly",
    "WindowTooSmall",
    "ZeroSet",
    "ahiezer_split",
    "almost_period_test",
    "arg_decompose",
    "assemble",
    "asym_decay_check",
    "bernstein_check",
    "bohr_coefficient",
    "bohr_project",
    "build_g",
    "build_q",
    "certify_lower_bound",
    "cepstral_factorize",
    "cesaro_p",
    "choose_rho",
    "commensurable_base",
    "conjugate_boundary",
    "factor_from_zeros",
    "factorization_residual",
    "fejer_riesz",
    "half_log",
    "integer_lattice_sup",
    "inverse_poisson_identity",
    "lindelof_check",
    "log_integrability",
    "mean_value_numeric",
    "modulus_squared",
    "poisson_eval",
    "polynomial_roots",
    "product_eval",
    "qlin_independent",
    "rational_ratio",
    "recheck",
    "safety_margin",
    "select_n_sequence",
    "spectrum",
    "sup_norm_certified",
    "wiener_growth_table",
    "weierstrass_factor",
]

__version__ = "0.1.0"
