"""
Reduced ODE systems of the constrained-integral methods.

Integrating u_t = u_xx - 1 over [0, s] (zeroth moment) and against x
(first moment), with the polynomial profile substituted, gives two
linear equations in (a', s'). Their closed-form solutions are the
right-hand sides below; :func:`moment_residual` substitutes a candidate
derivative back into both the scaled closed-form identities and a direct
quadrature of the moment integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import ExtinctionSignal, SingularDenominatorError
from .model import (
    Method,
    State,
    _require_positive_boundary,
    eval_profile,
    profile_derivative,
)

GUARD = 1e-14
QUADRATURE_PANELS = 2048

# Multipliers turning the unscaled moment balances into the integer forms
# used by the closed-form identities.
_ZEROTH_SCALE = {Method.DEG6: 35.0, Method.DEG3: 2.0}
_FIRST_SCALE = {Method.DEG6: 48.0, Method.DEG3: 20.0}


@dataclass(frozen=True)
class Derivative:
    ds_dt: float
    da_dt: float


@dataclass(frozen=True)
class MomentResidual:
    """Left-minus-right of the zeroth and first moment identities.

    ``zeroth``/``first`` come from the closed-form ODE identities;
    the ``*_quadrature`` fields evaluate the same balances by Simpson
    quadrature of the profile and are scaled to be directly comparable.
    """

    zeroth: float
    first: float
    zeroth_quadrature: float
    first_quadrature: float

    def max_abs(self) -> float:
        return max(abs(self.zeroth), abs(self.first))


def rhs_deg6(a: float, s: float) -> Derivative:
    _require_positive_boundary(s)
    s2 = s * s
    den = 48 * a + 5 * s2
    if abs(den) < GUARD:
        raise SingularDenominatorError(f"48a + 5s^2 = {den!r} below guard")
    ds = 3.0 / s * (128 * a - 29 * s2) / den
    da = (-84 * a * s2 - 11 * s2 * s2 - 768 * a * a) / (2 * s2 * den)
    return Derivative(ds, da)


def rhs_deg3(a: float, s: float) -> Derivative:
    _require_positive_boundary(s)
    if abs(a) < GUARD:
        raise ExtinctionSignal(f"sealed-face concentration a={a!r} below guard")
    s2 = s * s
    ds = 4.0 / 3.0 * (5 * a - s2) / (a * s)
    da = -2.0 / 3.0 - 20 * a / (3 * s2)
    return Derivative(ds, da)


def rhs(method: Method, a: float, s: float) -> Derivative:
    if method is Method.DEG6:
        return rhs_deg6(a, s)
    if method is Method.DEG3:
        return rhs_deg3(a, s)
    raise ValueError(f"{method} is not a moment method")


def check_constraint(method: Method, a: float, s: float) -> float:
    """Signed slack of the sign constraint; <= 0 means the boundary recedes."""
    if method is Method.DEG6:
        return 128 * a - 29 * s * s
    if method is Method.DEG3:
        return 5 * a - s * s
    raise ValueError(f"{method} is not a moment method")


def constraint_boundary_a0(method: Method, s: float = 1.0) -> float:
    """Largest sealed-face value compatible with the constraint at ``s``."""
    if method is Method.DEG6:
        return 29 * s * s / 128
    if method is Method.DEG3:
        return s * s / 5
    raise ValueError(f"{method} is not a moment method")


def oxygen_mass(method: Method, a: float, s: float) -> float:
    """Closed-form integral of the profile over [0, s]."""
    _require_positive_boundary(s)
    if method is Method.DEG6:
        return s * (48 * a + s * s) / 105
    if method is Method.DEG3:
        return a * s / 2
    raise ValueError(f"{method} is not a moment method")


def first_moment(method: Method, a: float, s: float) -> float:
    """Closed-form integral of x*u over [0, s]."""
    _require_positive_boundary(s)
    s2 = s * s
    if method is Method.DEG6:
        return s2 * (24 * a + s2) / 192
    if method is Method.DEG3:
        return 3 * a * s2 / 20
    raise ValueError(f"{method} is not a moment method")


def oxygen_mass_rate(method: Method, a: float, s: float, d: Derivative) -> float:
    """d/dt of :func:`oxygen_mass` along a trajectory (chain rule)."""
    if method is Method.DEG6:
        return ((48 * a + 3 * s * s) * d.ds_dt + 48 * s * d.da_dt) / 105
    if method is Method.DEG3:
        return (d.da_dt * s + a * d.ds_dt) / 2
    raise ValueError(f"{method} is not a moment method")


def _closed_form_residuals(method, a, s, d):
    da, ds = d.da_dt, d.ds_dt
    if method is Method.DEG6:
        zeroth = 16 * (da * s + a * ds) + s * s * ds + 35 * s
        first = 6 * (da * s * s + 2 * a * s * ds) + s**3 * ds - 48 * (a - s * s / 2)
    else:
        zeroth = da * s + a * ds + 2 * s
        first = 3 * (da * s * s + 2 * a * s * ds) - 20 * (a - s * s / 2)
    return zeroth, first


def _profile_time_derivative(method, a, s, d, x):
    # u depends on t only through (a, s): u_t = u_a a' + u_s s'. The profile
    # is linear in a; the s-derivative uses a complex step, exact to rounding.
    u_a = eval_profile(method, 1.0, s, x) - eval_profile(method, 0.0, s, x)
    h = 1e-30 * max(s, 1.0)
    sc = s + 1j * h
    Xc = x / sc
    if method is Method.DEG6:
        b, c, e = -3 * a + sc**2 / 8, 3 * a - sc**2 / 4, -a + sc**2 / 8
        Xc2 = Xc * Xc
        uc = a + Xc2 * (b + Xc2 * (c + Xc2 * e))
    else:
        uc = a + Xc * Xc * (-3 * a + 2 * a * Xc)
    u_s = np.imag(uc) / h
    return u_a * d.da_dt + u_s * d.ds_dt


def moment_residual(method: Method, state: State, derivative: Derivative) -> MomentResidual:
    a, s = state.a, state.s
    _require_positive_boundary(s)
    zeroth, first = _closed_form_residuals(method, a, s, derivative)

    x = np.linspace(0.0, s, 2 * QUADRATURE_PANELS + 1)
    u_t = _profile_time_derivative(method, a, s, derivative, x)
    source = profile_derivative(method, a, s, x, 2) - 1.0
    # Leibniz boundary terms vanish because u(s) = 0.
    zeroth_q = simpson(u_t, x=x) - simpson(source, x=x)
    first_q = simpson(x * u_t, x=x) - simpson(x * source, x=x)
    return MomentResidual(
        zeroth,
        first,
        _ZEROTH_SCALE[method] * zeroth_q,
        _FIRST_SCALE[method] * first_q,
    )
