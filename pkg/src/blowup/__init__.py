"""Blow-up time estimation for autonomous ODEs with a priori adaptive stepping."""

from . import catalog
from .baselines import InvalidExponent, MinStepUnderflow, solve_arclength, solve_rescaling_1d
from .errors import BlowupError, SolverError
from .expr import DomainError, ExprSyntaxError, differentiate, evaluate, parse, pretty
from .harness import (
    AXIS_COST,
    AXIS_ERROR,
    InsufficientPoints,
    RateFit,
    StudyRow,
    StudyTable,
    emit_csv,
    emit_svg,
    fit_rate,
    run_method,
    run_rd_study,
    run_study,
)
from .integrate import (
    FixedPointDivergence,
    Overflow,
    SolverConfig,
    StepBudgetExceeded,
    solve_1d,
    solve_log_nd,
    solve_nd,
    solve_separable,
)
from .linalg import JacobianAccess, TransposeUnavailable, jvp_norm, spectral_norm
from .problems import (
    AssumptionReport,
    GrowthSpec,
    RunResult,
    ScalarProblem,
    VectorProblem,
    check_assumptions,
    validate,
)
from .stepping import (
    Adaptive1D,
    AdaptiveND,
    AltND,
    DegenerateJVP,
    LogNDImplicitN,
    NonpositiveDerivative,
    PowerUniformND,
    RDCapped,
    Taylor1D,
    Uniform1D,
    UniformND,
    h_adaptive_1d,
    h_adaptive_nd,
    h_alt_nd,
    h_log_nd,
    h_taylor_1d,
    h_uniform_1d,
    h_uniform_nd,
)
from .thresholds import (
    RADIUS_CAP,
    BPrimeLog,
    BracketFailure,
    ExplicitRadius,
    FInverse,
    LogND,
    NonMonotone,
    PolyND,
    radius,
    tau_tail_bound,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
