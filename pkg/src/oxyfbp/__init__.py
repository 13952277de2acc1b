"""Moment-method and finite-difference solvers for sealed-surface oxygen absorption."""

from .errors import (
    ConstraintWarning,
    DegenerateBoundaryError,
    DomainError,
    ExtinctionSignal,
    NoSignChangeError,
    OxyFBPError,
    SingularDenominatorError,
    StabilityError,
    StepFailureError,
)
from .integrator import Event, EventKind, IntegratorOptions, Scheme, integrate, refine_event, run
from .model import (
    A0_DEG6,
    DEFAULT_T0,
    Method,
    ProblemSpec,
    ProfileCoefficients,
    State,
    Termination,
    Trajectory,
    coeffs_deg3,
    coeffs_deg6,
    eval_profile,
    initial_profile,
    profile_derivative,
    steady_state_boundary,
)
from .moments import (
    Derivative,
    MomentResidual,
    check_constraint,
    constraint_boundary_a0,
    moment_residual,
    oxygen_mass,
    rhs_deg3,
    rhs_deg6,
)
from .oracle import OracleField, estimate_boundary, oracle_solve, oracle_step
from .reference import Column, ComparisonReport, ReferenceTable, compare, load_tables

__version__ = "0.1.0"
