"""
Problem definition and closed-form concentration profiles.

Everything here works in the transformed (slab) coordinates of the
sealed-surface oxygen absorption problem:

    u_t = u_xx - 1,            0 < x < s(t)
    u(s, t) = u_x(s, t) = 0
    u_x(0, t) = 0
    u(x, 0) = (1 - x)**2 / 2,  s(0) = 1

The two moment methods replace u by a polynomial in x/s whose
coefficients depend only on the sealed-face value a(t) = u(0, t) and on
the boundary position s(t).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateBoundaryError, DomainError

A0_DEG6 = Fraction(29, 128)
#: Time-origin offset that aligns the moment-method clock with the
#: published comparison tables.
DEFAULT_T0 = 0.050


class Method(enum.Enum):
    DEG3 = "deg3"
    DEG6 = "deg6"
    ORACLE = "oracle"

    @property
    def is_moment(self) -> bool:
        return self is not Method.ORACLE


class Termination(enum.Enum):
    HORIZON_REACHED = "HorizonReached"
    EXTINCTION = "Extinction"
    CONSTRAINT_VIOLATED = "ConstraintViolated"
    CONCENTRATION_FLOOR = "ConcentrationFloor"


@dataclass(frozen=True)
class ProblemSpec:
    """Method selection, initial data and integration controls.

    ``t0`` is the offset added to the internal clock when reporting times.
    ``None`` selects the per-method default: :data:`DEFAULT_T0` for the
    moment methods and 0 for the finite-difference oracle, which runs on
    the physical clock of the problem. ``t_end`` is measured on the
    reported axis.
    """

    method: Method = Method.DEG6
    a0: float = float(A0_DEG6)
    s0: float = 1.0
    t0: float | None = None
    dt: float = 1e-4
    t_end: float = 0.25
    s_min: float = 1e-3
    a_min: float = 0.0

    def __post_init__(self):
        if not isinstance(self.method, Method):
            object.__setattr__(self, "method", Method(self.method))
        if self.s0 != 1.0:
            raise DomainError(f"s0 must be exactly 1, got {self.s0}")
        if not self.a0 > 0:
            raise DomainError(f"a0 must be positive, got {self.a0}")
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not 0 < self.s_min < 1:
            raise DomainError(f"s_min must lie in (0, 1), got {self.s_min}")
        if self.t_end <= self.time_offset:
            raise DomainError(
                f"t_end={self.t_end} must exceed the time offset {self.time_offset}"
            )

    @property
    def time_offset(self) -> float:
        if self.t0 is not None:
            return self.t0
        return DEFAULT_T0 if self.method.is_moment else 0.0


@dataclass(frozen=True)
class State:
    t: float
    s: float
    a: float


@dataclass(frozen=True)
class ProfileCoefficients:
    """Coefficients of ``u = a + b X**2 + c X**4 + d X**6`` with ``X = x/s``.

    For the cubic profile ``c`` multiplies ``X**3`` and ``d`` is ``None``.
    """

    a: float
    b: float
    c: float
    d: float | None = None

    def total(self) -> float:
        return self.a + self.b + self.c + (self.d or 0.0)


@dataclass(frozen=True)
class Trajectory:
    method: Method
    samples: tuple[State, ...]
    termination: Termination
    event: object | None = None
    extinction_estimate: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.samples)

    @property
    def t(self) -> np.ndarray:
        return np.array([p.t for p in self.samples])

    @property
    def s(self) -> np.ndarray:
        return np.array([p.s for p in self.samples])

    @property
    def a(self) -> np.ndarray:
        return np.array([p.a for p in self.samples])

    @property
    def t_last(self) -> float:
        return self.samples[-1].t

    def state_at(self, t: float) -> State:
        """Linear interpolation between neighbouring samples."""
        ts = self.t
        if not ts[0] <= t <= ts[-1]:
            raise DomainError(f"t={t} outside trajectory range [{ts[0]}, {ts[-1]}]")
        return State(t, float(np.interp(t, ts, self.s)), float(np.interp(t, ts, self.a)))


def _require_positive_boundary(s):
    if not s > 0:
        raise DegenerateBoundaryError(f"boundary position must be positive, got s={s}")


def initial_profile(x):
    """Concentration at the moment the surface is sealed."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > 1)):
        raise DomainError("initial profile is defined on 0 <= x <= 1")
    out = 0.5 * (1.0 - xa) ** 2
    return float(out) if out.ndim == 0 else out


def coeffs_deg6(a: float, s: float) -> ProfileCoefficients:
    _require_positive_boundary(s)
    s2 = s * s
    return ProfileCoefficients(a, -3 * a + s2 / 8, 3 * a - s2 / 4, -a + s2 / 8)


def coeffs_deg3(a: float, s: float) -> ProfileCoefficients:
    _require_positive_boundary(s)
    return ProfileCoefficients(a, -3 * a, 2 * a)


def coefficients(method: Method, a: float, s: float) -> ProfileCoefficients:
    if method is Method.DEG6:
        return coeffs_deg6(a, s)
    if method is Method.DEG3:
        return coeffs_deg3(a, s)
    raise DomainError(f"{method} has no closed-form profile")


def _check_x(x, s):
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > s):
        raise DomainError(f"profile is defined on 0 <= x <= s={s}")
    return xa


def eval_profile(method: Method, a: float, s: float, x):
    """Polynomial concentration u(x) for a moment method, 0 <= x <= s."""
    k = coefficients(method, a, s)
    X = _check_x(x, s) / s
    if method is Method.DEG6:
        X2 = X * X
        out = k.a + X2 * (k.b + X2 * (k.c + X2 * k.d))
    else:
        out = k.a + X * X * (k.b + X * k.c)
    return float(out) if np.ndim(out) == 0 else out


def profile_derivative(method: Method, a: float, s: float, x, order: int):
    """Analytic x-derivative of order 1 or 2 of the profile."""
    k = coefficients(method, a, s)
    X = _check_x(x, s) / s
    if method is Method.DEG6:
        X2 = X * X
        if order == 1:
            out = X * (2 * k.b + X2 * (4 * k.c + 6 * k.d * X2)) / s
        elif order == 2:
            out = (2 * k.b + X2 * (12 * k.c + 30 * k.d * X2)) / (s * s)
        else:
            raise DomainError(f"unsupported derivative order {order}")
    else:
        if order == 1:
            out = X * (2 * k.b + 3 * k.c * X) / s
        elif order == 2:
            out = (2 * k.b + 6 * k.c * X) / (s * s)
        else:
            raise DomainError(f"unsupported derivative order {order}")
    return float(out) if np.ndim(out) == 0 else out


def steady_state_boundary(c0: float, m: float) -> float:
    """Penetration depth of the steady profile ``C = m (X - X0)**2 / 2``."""
    if not m > 0:
        raise DomainError(f"absorption rate must be positive, got m={m}")
    if not c0 >= 0:
        raise DomainError(f"surface concentration must be non-negative, got C0={c0}")
    return math.sqrt(2.0 * c0 / m)
