"""Radial shooting for the Hardy-potential reaction equation on a ball.

Computes, classifies, and certifies positive radial solutions of

    u'' + (n-1)/r u' + mu/(R-r)^2 u = u^p,   u'(0) = 0,

including the blowup threshold u*, boundary decay/growth coefficients at
the indicial exponents, dead-core and origin-touching families in the
sublinear regime, and envelope/flux certificates.
"""

from .asymptotics import (
    FitResult,
    VTransformResult,
    envelope_extrema_check,
    fit_power_coefficient,
    fit_power_samples,
    richardson,
    subsolution_check,
    supersolution_margin,
    v_transform,
    w0_profile,
    w_transform_limit,
)
from .errors import (
    BracketFailure,
    Degenerate,
    HardyShootError,
    HTooLarge,
    MaxSteps,
    MuAboveHardy,
    MuZero,
    NoConvergence,
    NonPositive,
    NonPositiveTarget,
    NoSolutionRegime,
    NotBlowup,
    NotConverged,
    PowerOne,
    TargetUnreachable,
    TooFewSamples,
    WrongRegime,
    WrongSign,
)
from .linearfuchs import (
    LinearTrajectory,
    eta_profile,
    integrate_linear,
    linear_coefficient,
    perturbed_exponent,
)
from .model import (
    Exponents,
    Problem,
    Regime,
    exponents,
    indicial_roots,
    mu_star,
    validate,
)
from .shooting import (
    BLOWUP,
    GLOBAL_POSITIVE,
    INDETERMINATE,
    Classification,
    SolutionDescriptor,
    ThresholdResult,
    blowup_radius,
    boundary_coefficient,
    classify,
    find_ustar,
    solve_for_boundary_coefficient,
)
from .stepper import (
    Event,
    IntegratorOptions,
    Launch,
    State,
    Trajectory,
    center_series,
    dead_core_edge_series,
    integrate,
    integrate_forced,
    launch_state,
    origin_touch_series,
    refine_until,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "Problem",
    "Regime",
    "Exponents",
    "mu_star",
    "indicial_roots",
    "validate",
    "exponents",
    # stepper
    "State",
    "Event",
    "IntegratorOptions",
    "Trajectory",
    "Launch",
    "center_series",
    "dead_core_edge_series",
    "origin_touch_series",
    "launch_state",
    "integrate",
    "integrate_forced",
    "refine_until",
    # asymptotics
    "FitResult",
    "VTransformResult",
    "richardson",
    "fit_power_samples",
    "fit_power_coefficient",
    "w_transform_limit",
    "v_transform",
    "w0_profile",
    "supersolution_margin",
    "subsolution_check",
    "envelope_extrema_check",
    # linear
    "LinearTrajectory",
    "integrate_linear",
    "linear_coefficient",
    "eta_profile",
    "perturbed_exponent",
    # shooting
    "GLOBAL_POSITIVE",
    "BLOWUP",
    "INDETERMINATE",
    "Classification",
    "ThresholdResult",
    "SolutionDescriptor",
    "classify",
    "find_ustar",
    "blowup_radius",
    "boundary_coefficient",
    "solve_for_boundary_coefficient",
    # errors
    "HardyShootError",
    "MuZero",
    "PowerOne",
    "MuAboveHardy",
    "NoSolutionRegime",
    "NonPositive",
    "WrongRegime",
    "WrongSign",
    "HTooLarge",
    "MaxSteps",
    "NoConvergence",
    "NotConverged",
    "TooFewSamples",
    "Degenerate",
    "BracketFailure",
    "NotBlowup",
    "TargetUnreachable",
    "NonPositiveTarget",
]
