"""
Time integration of the two-state moment systems.

The fixed-step RK4 path is the default and is fully deterministic. After
every step three guard quantities are checked; each is positive while the
run is valid:

    s - s_min          extinction
    a - a_min          concentration floor
    tol - slack        sign constraint (armed once slack <= 0)

A sign change inside a step is located by bisection on the length of a
single step taken from the start of that step. Where the right-hand side
becomes singular (s -> 0, or a -> 0 for the cubic profile) a step is split
into equal RK4 sub-steps; on smooth segments it is a single RK4 step.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    ConstraintWarning,
    NoSignChangeError,
    SingularDenominatorError,
    DomainError,
    StepFailureError,
)
from .model import Method, ProblemSpec, State, Termination, Trajectory
from .moments import check_constraint, rhs

EVENT_TOL = 1e-10
# Slack tolerance so a start exactly on the constraint boundary is not an event.
SLACK_TOL = 1e-12
MAX_REL_CHANGE = 0.05
MAX_SUBSTEPS = 4096


class Scheme(enum.Enum):
    RK4_FIXED = "rk4"
    RK45_ADAPTIVE = "rk45"


class EventKind(enum.Enum):
    EXTINCTION = "Extinction"
    CONSTRAINT_VIOLATED = "ConstraintViolated"
    CONCENTRATION_FLOOR = "ConcentrationFloor"

    @property
    def termination(self) -> Termination:
        return Termination(self.value)


@dataclass(frozen=True)
class IntegratorOptions:
    scheme: Scheme = Scheme.RK4_FIXED
    rtol: float = 1e-10
    atol: float = 1e-12
    dt_min: float = 1e-12
    dt_max: float = 1e-3
    stride: int = 1

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise DomainError("rtol and atol must be positive")
        if not 0 < self.dt_min <= self.dt_max:
            raise DomainError("need 0 < dt_min <= dt_max")
        if self.stride < 1:
            raise DomainError("stride must be >= 1")


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t_event: float
    state: State
    bracket: tuple[float, float]


def _rk4(method, t, a, s, h, k1=None):
    k1 = k1 or rhs(method, a, s)
    k2 = rhs(method, a + 0.5 * h * k1.da_dt, s + 0.5 * h * k1.ds_dt)
    k3 = rhs(method, a + 0.5 * h * k2.da_dt, s + 0.5 * h * k2.ds_dt)
    k4 = rhs(method, a + h * k3.da_dt, s + h * k3.ds_dt)
    a_new = a + h / 6.0 * (k1.da_dt + 2 * k2.da_dt + 2 * k3.da_dt + k4.da_dt)
    s_new = s + h / 6.0 * (k1.ds_dt + 2 * k2.ds_dt + 2 * k3.ds_dt + k4.ds_dt)
    return State(t + h, s_new, a_new)


class _Collapsed(DomainError):
    pass


def _step(method, t, a, s, h, s_stop=0.0):
    """Advance by ``h`` with RK4, splitting the step where the RHS is singular.

    Each sub-step is limited so that s moves by at most MAX_REL_CHANGE of
    itself and a by at most that fraction of a + s**2. On smooth segments
    this is one plain RK4 step of length ``h``.
    """
    st = State(t, s, a)
    done = 0.0
    for _ in range(MAX_SUBSTEPS):
        d = rhs(method, st.a, st.s)
        rate = abs(d.ds_dt) / st.s + abs(d.da_dt) / (abs(st.a) + st.s * st.s)
        remaining = h - done
        sub = remaining if rate * remaining <= MAX_REL_CHANGE else MAX_REL_CHANGE / rate
        st = _rk4(method, st.t, st.a, st.s, sub, d)
        done = h if sub == remaining else done + sub
        if not st.s > s_stop:
            raise _Collapsed(f"boundary fell to s={st.s} inside a step")
        if done == h:
            return State(t + h, st.s, st.a)
    raise _Collapsed(f"more than {MAX_SUBSTEPS} sub-steps needed")


def refine_event(
    propagate: Callable[[float], State | None],
    bracket: tuple[float, float],
    predicate: Callable[[State | None], float],
    kind: EventKind,
    tol: float = EVENT_TOL,
) -> Event:
    """Bisect ``bracket`` until it is narrower than ``tol``.

    ``propagate(t)`` returns the state at ``t`` or ``None`` when it cannot
    be computed (singular right-hand side); ``predicate`` must be positive
    at the left end and non-positive at the right end. ``None`` states
    count as non-positive. The returned event carries the last state on
    the valid side.
    """
    lo, hi = bracket
    state_lo = propagate(lo)
    g_lo = predicate(state_lo)
    g_hi = predicate(propagate(hi))
    if not (g_lo > 0 and g_hi <= 0):
        raise NoSignChangeError(
            f"predicate does not change sign on [{lo}, {hi}]: {g_lo!r}, {g_hi!r}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        state_mid = propagate(mid)
        if predicate(state_mid) > 0:
            lo, state_lo = mid, state_mid
        else:
            hi = mid
    return Event(kind, lo, state_lo, (lo, hi))


def _guards(method, spec, armed):
    def g_extinction(st):
        return -math.inf if st is None else st.s - spec.s_min

    def g_floor(st):
        return -math.inf if st is None else st.a - spec.a_min

    def g_constraint(st):
        if st is None:
            return -math.inf
        return SLACK_TOL - check_constraint(method, st.a, st.s) if armed else 1.0

    return [
        (EventKind.EXTINCTION, g_extinction),
        (EventKind.CONCENTRATION_FLOOR, g_floor),
        (EventKind.CONSTRAINT_VIOLATED, g_constraint),
    ]


def _extrapolate_extinction(samples: list[State]) -> float | None:
    """Time at which a quadratic in t through the last three values of s**2 vanishes.

    Near extinction s behaves like sqrt(T - t), so s**2 is the smooth quantity.
    """
    if len(samples) < 3:
        return None
    pts = samples[-3:]
    t = np.array([p.t for p in pts])
    s2 = np.array([p.s for p in pts]) ** 2
    coef = np.polyfit(t - t[-1], s2, 2)
    roots = [r.real for r in np.roots(coef) if abs(r.imag) < 1e-14 and r.real >= 0]
    if roots:
        return float(t[-1] + min(roots))
    slope = (s2[-1] - s2[-2]) / (t[-1] - t[-2])
    return float(t[-1] - s2[-1] / slope) if slope < 0 else None


def _warn_initial_constraint(spec: ProblemSpec) -> bool:
    slack = check_constraint(spec.method, spec.a0, spec.s0)
    if slack > 0:
        label = "128a - 29s^2" if spec.method is Method.DEG6 else "5a - s^2"
        warnings.warn(
            f"initial state violates the sign constraint: {label} = {slack:+.7g} > 0; "
            "the boundary will initially advance",
            ConstraintWarning,
            stacklevel=3,
        )
        return False
    return True


def integrate(spec: ProblemSpec, opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate a moment method from (a0, s0=1) to ``spec.t_end`` or the first event."""
    opts = opts or IntegratorOptions()
    if not spec.method.is_moment:
        raise DomainError("integrate() handles the moment methods; use oracle_solve for the PDE")
    armed = _warn_initial_constraint(spec)
    if opts.scheme is Scheme.RK45_ADAPTIVE:
        return _integrate_adaptive(spec, opts, armed)
    return _integrate_rk4(spec, opts, armed)


def _integrate_rk4(spec, opts, armed):
    method, t0, h = spec.method, spec.time_offset, spec.dt
    tau_end = spec.t_end - t0
    n_steps = max(1, math.ceil(tau_end / h - 1e-9))

    current = State(0.0, spec.s0, spec.a0)
    samples = [current]
    event = None
    for k in range(1, n_steps + 1):
        tau_next = min(k * h, tau_end)
        step = tau_next - current.t
        try:
            nxt = _step(method, current.t, current.a, current.s, step, spec.s_min)
        except (SingularDenominatorError, DomainError):
            nxt = None
        if nxt is not None:
            nxt = State(tau_next, nxt.s, nxt.a)
        guards = _guards(method, spec, armed)
        tripped = [(kind, g) for kind, g in guards if g(nxt) <= 0]
        if tripped:
            start = current

            def propagate(tau, start=start):
                if tau == start.t:
                    return start
                try:
                    return _step(method, start.t, start.a, start.s, tau - start.t, spec.s_min)
                except (SingularDenominatorError, DomainError):
                    return None

            def first_trip(st, guards=guards):
                return min(g(st) for _, g in guards)

            if first_trip(start) <= 0:
                ev = Event(tripped[0][0], start.t, start, (start.t, start.t))
            else:
                ev = refine_event(propagate, (start.t, tau_next), first_trip, tripped[0][0])
            hi_state = propagate(ev.bracket[1])
            kind = ev.kind
            if hi_state is not None:
                kind = min(guards, key=lambda kg: kg[1](hi_state))[0]
            event = Event(kind, ev.t_event, ev.state, ev.bracket)
            if ev.state.t > samples[-1].t:
                samples.append(ev.state)
            break
        if not armed and check_constraint(method, nxt.a, nxt.s) <= 0:
            armed = True
        current = nxt
        if k % opts.stride == 0 or k == n_steps:
            samples.append(current)

    return _finish(spec, samples, event)


def _integrate_adaptive(spec, opts, armed):
    method, t0 = spec.method, spec.time_offset
    tau_end = spec.t_end - t0

    def f(_t, y):
        try:
            d = rhs(method, y[0], y[1])
        except (SingularDenominatorError, DomainError):
            return [np.nan, np.nan]
        return [d.da_dt, d.ds_dt]

    def ev_extinction(_t, y):
        return y[1] - spec.s_min

    def ev_floor(_t, y):
        return y[0] - spec.a_min

    def ev_constraint(_t, y):
        return SLACK_TOL - check_constraint(method, y[0], y[1])

    events = [ev_extinction, ev_floor]
    kinds = [EventKind.EXTINCTION, EventKind.CONCENTRATION_FLOOR]
    if armed:
        events.append(ev_constraint)
        kinds.append(EventKind.CONSTRAINT_VIOLATED)
    for e in events:
        e.terminal = True
        e.direction = -1

    sol = solve_ivp(
        f,
        (0.0, tau_end),
        [spec.a0, spec.s0],
        method="RK45",
        rtol=opts.rtol,
        atol=opts.atol,
        max_step=opts.dt_max,
        first_step=min(spec.dt, opts.dt_max),
        events=events,
    )
    if sol.status == -1:
        raise StepFailureError(sol.message)
    steps = np.diff(sol.t)
    if steps.size > 1 and steps[:-1].min() < opts.dt_min:
        raise StepFailureError(f"step size {steps[:-1].min():.3e} below dt_min={opts.dt_min}")

    samples = [State(float(t), float(s), float(a)) for t, a, s in zip(sol.t, *sol.y)]
    samples = samples[:: opts.stride] + ([samples[-1]] if (len(samples) - 1) % opts.stride else [])
    event = None
    if sol.status == 1:
        for kind, te, ye in zip(kinds, sol.t_events, sol.y_events):
            if len(te):
                st = State(float(te[0]), float(ye[0][1]), float(ye[0][0]))
                event = Event(kind, st.t, st, (st.t, st.t))
                if st.t > samples[-1].t:
                    samples.append(st)
                break
    return _finish(spec, samples, event)


def _finish(spec, samples, event):
    t0 = spec.time_offset
    shifted = [State(p.t + t0, p.s, p.a) for p in samples]
    estimate = None
    if event is None:
        termination = Termination.HORIZON_REACHED
    else:
        termination = event.kind.termination
        event = Event(
            event.kind,
            event.t_event + t0,
            State(event.state.t + t0, event.state.s, event.state.a),
            (event.bracket[0] + t0, event.bracket[1] + t0),
        )
        if event.kind is EventKind.EXTINCTION:
            estimate = _extrapolate_extinction(shifted)
    return Trajectory(
        method=spec.method,
        samples=tuple(shifted),
        termination=termination,
        event=event,
        extinction_estimate=estimate,
        meta={"t0": t0},
    )


def run(spec: ProblemSpec, opts: IntegratorOptions | None = None, nx: int | None = None) -> Trajectory:
    """Dispatch to the moment integrator or the finite-difference oracle."""
    if spec.method.is_moment:
        return integrate(spec, opts)
    from .oracle import DEFAULT_NX, default_sample_times, oracle_solve

    return oracle_solve(spec, nx or DEFAULT_NX, default_sample_times(spec))

