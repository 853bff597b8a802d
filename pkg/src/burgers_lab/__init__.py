"""Spectral laboratory for odd solutions of Burgers-type equations on the torus."""

from .spectral import (
    GridFunction,
    NonOddInputError,
    SineSpectrum,
    UnderResolvedError,
    analyze,
    inner_product,
    load_spectrum,
    save_spectrum,
    sobolev_norm,
    synthesize,
)
from .dynamics import (
    DiagnosticsConfig,
    ModelParams,
    SimulationRecord,
    StepFailureError,
    evolve,
    rhs_direct,
    rhs_pseudospectral,
    step,
)
from .characteristics import (
    HorizonError,
    InitialField,
    eval_characteristics,
    sample_solution,
    tmax_inviscid,
)
from .attractors import (
    AttractorFn,
    DivergentSeriesError,
    F_L2_NORM_SQ,
    InvalidAttractorError,
    attractor_decay_series,
    attractor_distance,
    c_alpha,
    key_identity_residual,
    lyapunov,
    make_F,
    make_Phi,
    make_sawtooth,
    optimal_r,
    validate_H,
)
from .blowup import (
    BlowupCertificate,
    DetectionPolicy,
    HypothesisError,
    KAPPA_F,
    OutsideValidityError,
    UnsupportedRegimeError,
    certify_blowup_F,
    certify_blowup_H,
    comparison_lower_bound,
    corollary_condition,
    detect_numerical_blowup,
    monitor_lyapunov_bound,
    simplified_lower_bound,
    verify_comparison_lemma,
)

__version__ = "0.1.0"
