"""
Finite-difference reference solver on the fixed domain [0, 1].

The free-boundary problem is treated as a parabolic obstacle problem:
explicit FTCS for u_t = u_xx - 1 with a mirror node at the sealed face,
followed by projection onto u >= 0. The positivity set of u is the
oxygenated region; no condition is imposed at s(t) itself. The boundary
is recovered afterwards from the local behaviour u ~ (x - s)**2 / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numba
import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError, StabilityError
from .model import Method, ProblemSpec, State, Termination, Trajectory, initial_profile

DEFAULT_NX = 1001
COURANT = 0.4
POSITIVE_EPS = 1e-12
SAMPLE_DT = 1e-3


@dataclass(frozen=True)
class OracleField:
    nx: int
    u: np.ndarray
    t: float
    s_est: float
    dt_grid: float

    @property
    def dx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nx)

    @property
    def mass(self) -> float:
        return float(trapezoid(self.u, dx=self.dx))


def initial_field(nx: int = DEFAULT_NX, courant: float = COURANT) -> OracleField:
    if nx < 3:
        raise DomainError(f"need at least 3 grid points, got nx={nx}")
    x = np.linspace(0.0, 1.0, nx)
    u = initial_profile(x)
    u[-1] = 0.0
    dx = 1.0 / (nx - 1)
    f = OracleField(nx, u, 0.0, 0.0, courant * dx * dx)
    return replace(f, s_est=estimate_boundary(f))


def _check_stable(dt, dx):
    if dt > 0.5 * dx * dx * (1 + 1e-12):
        raise StabilityError(f"dt={dt:.3e} exceeds dx^2/2={0.5 * dx * dx:.3e}")


def oracle_step(field: OracleField) -> OracleField:
    """One explicit step followed by projection onto u >= 0."""
    dx, dt = field.dx, field.dt_grid
    _check_stable(dt, dx)
    u = field.u
    lap = np.empty_like(u)
    lap[0] = 2.0 * (u[1] - u[0])
    lap[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
    lap[-1] = 0.0
    new = u + dt * (lap / (dx * dx) - 1.0)
    new[-1] = 0.0
    np.maximum(new, 0.0, out=new)
    out = OracleField(field.nx, new, field.t + dt, field.s_est, dt)
    return replace(out, s_est=estimate_boundary(out))


@numba.njit(cache=True)
def _advance(u, n, r, dt):
    # Same update as oracle_step, repeated n times in place.
    N = u.size
    new = np.empty_like(u)
    for _ in range(n):
        new[0] = u[0] + 2.0 * r * (u[1] - u[0]) - dt
        for i in range(1, N - 1):
            new[i] = u[i] + r * (u[i + 1] - 2.0 * u[i] + u[i - 1]) - dt
        new[N - 1] = 0.0
        for i in range(N):
            u[i] = new[i] if new[i] > 0.0 else 0.0


def advance_to(field: OracleField, t_target: float) -> OracleField:
    """Step to exactly ``t_target`` with the fewest steps not exceeding ``dt_grid``."""
    span = t_target - field.t
    if span < 0:
        raise DomainError(f"cannot step backwards from t={field.t} to {t_target}")
    if span == 0:
        return field
    n = max(1, math.ceil(span / field.dt_grid - 1e-9))
    dt = span / n
    _check_stable(dt, field.dx)
    u = field.u.copy()
    _advance(u, n, dt / field.dx**2, dt)
    out = OracleField(field.nx, u, t_target, field.s_est, field.dt_grid)
    return replace(out, s_est=estimate_boundary(out))


def estimate_boundary(field: OracleField) -> float:
    """Boundary from the last positive node, assuming u = (x - s)**2 / 2 nearby."""
    pos = np.nonzero(field.u > POSITIVE_EPS)[0]
    if pos.size == 0:
        return 0.0
    j = pos[-1]
    return float(min(1.0, j * field.dx + math.sqrt(2.0 * field.u[j])))


def default_sample_times(spec: ProblemSpec, step: float = SAMPLE_DT) -> np.ndarray:
    t0 = spec.time_offset
    n = int(round((spec.t_end - t0) / step))
    return t0 + step * np.arange(n + 1)


def oracle_run(nx: int, times, courant: float = COURANT, s_min: float = 0.0):
    """Yield the field at each requested physical time, stopping once it is extinct."""
    if nx < 101:
        raise DomainError(f"oracle needs nx >= 101, got {nx}")
    field = initial_field(nx, courant)
    for t in times:
        field = advance_to(field, float(t))
        yield field
        if field.s_est <= s_min:
            return


def oracle_solve(spec: ProblemSpec, nx: int = DEFAULT_NX, sample_times=None) -> Trajectory:
    """Run the oracle, reporting ``(t, s_est, u(0, t))`` at each sample time.

    Sample times are on the reported axis, i.e. physical time plus
    ``spec.time_offset`` (zero by default for this method).
    """
    t0 = spec.time_offset
    if sample_times is None:
        sample_times = default_sample_times(spec)
    taus = np.asarray(sample_times, dtype=float) - t0
    if taus.size == 0 or taus[0] < -1e-12 or np.any(np.diff(taus) <= 0):
        raise DomainError("sample times must be increasing and not precede the time offset")
    taus[0] = max(taus[0], 0.0)

    samples = []
    termination = Termination.HORIZON_REACHED
    for field in oracle_run(nx, taus, s_min=spec.s_min):
        samples.append(State(field.t + t0, field.s_est, float(field.u[0])))
        if field.s_est <= spec.s_min:
            termination = Termination.EXTINCTION
    return Trajectory(
        method=Method.ORACLE,
        samples=tuple(samples),
        termination=termination,
        meta={"t0": t0, "nx": nx},
    )
