import numpy as np
import pytest

from oxyfbp import Method, ProblemSpec, StabilityError, Termination, estimate_boundary, oracle_solve, oracle_step
from oxyfbp.errors import DomainError
from oxyfbp.oracle import OracleField, advance_to, initial_field, oracle_run

TIMES = np.round(np.arange(0.0, 0.2 + 1e-9, 1e-3), 12)


@pytest.fixture(scope="module")
def fields():
    return list(oracle_run(1001, TIMES))


@pytest.fixture(scope="module")
def oracle_traj():
    return oracle_solve(ProblemSpec(method=Method.ORACLE, t_end=0.2), 1001)


def test_one_step_from_initial_profile():
    f0 = initial_field(1001)
    f1 = oracle_step(f0)
    change = np.abs(f1.u - f0.u)
    # (1-x)^2/2 is a discrete steady state of u_xx - 1 away from the mirror node
    assert change[2:-2].max() < 1e-14
    assert change[0] > 0
    assert f1.t == pytest.approx(f0.dt_grid)


def test_zero_field_is_absorbing():
    f = OracleField(201, np.zeros(201), 0.0, 0.0, 0.4 / 200**2)
    for _ in range(5):
        f = oracle_step(f)
    assert not f.u.any()
    assert f.s_est == 0.0


def test_stability_guard():
    f = initial_field(201)
    with pytest.raises(StabilityError):
        oracle_step(OracleField(f.nx, f.u, 0.0, 1.0, 0.6 * f.dx**2))


def test_step_and_kernel_agree():
    f = initial_field(301)
    g = f
    for _ in range(500):
        g = oracle_step(g)
    h = advance_to(f, 500 * f.dt_grid)
    np.testing.assert_allclose(g.u, h.u, atol=1e-14)
    assert g.s_est == pytest.approx(h.s_est, abs=1e-12)


def test_estimate_boundary_on_exact_profile():
    f = initial_field(1001)
    assert f.s_est == pytest.approx(1.0, abs=f.dx**2)
    f = initial_field(101)
    assert estimate_boundary(f) == pytest.approx(1.0, abs=f.dx**2)


def test_estimate_boundary_zero_field():
    assert estimate_boundary(OracleField(101, np.zeros(101), 0.0, 0.0, 1e-5)) == 0.0


def test_estimate_boundary_recovers_quadratic_tail():
    nx = 1001
    x = np.linspace(0, 1, nx)
    s = 0.6372
    u = np.where(x < s, 0.5 * (x - s) ** 2, 0.0)
    f = OracleField(nx, u, 0.0, 0.0, 1e-7)
    assert estimate_boundary(f) == pytest.approx(s, abs=1e-12)


def test_sealed_face_value(fields):
    assert fields[0].u[0] == 0.5
    f51 = fields[51]
    assert f51.t == pytest.approx(0.051)
    assert f51.u[0] == pytest.approx(0.2451, abs=0.01)


def test_small_time_series(fields):
    # u(0,t) = 1/2 - 2 sqrt(t/pi) while the sealed-face disturbance has not
    # reached the free boundary
    for f in fields[1:51]:
        assert f.u[0] == pytest.approx(0.5 - 2 * np.sqrt(f.t / np.pi), abs=0.01)


def test_boundary_at_t01(fields):
    assert fields[100].s_est == pytest.approx(0.9350, abs=0.01)


def test_non_negative_and_absorbed_region_stays_absorbed(fields):
    for prev, cur in zip(fields, fields[1:]):
        assert cur.u.min() >= 0.0
        absorbed = cur.x > prev.s_est
        assert np.all(cur.u[absorbed] <= prev.u[absorbed])


def test_boundary_non_increasing(fields):
    s = np.array([f.s_est for f in fields])
    dx = fields[0].dx
    assert np.all(np.diff(s) <= dx)


def test_mass_law(fields):
    t = np.array([f.t for f in fields])
    s = np.array([f.s_est for f in fields])
    m = np.array([f.mass for f in fields])
    absorbed = np.concatenate([[0.0], np.cumsum(0.5 * (s[1:] + s[:-1]) * np.diff(t))])
    assert fields[0].mass == pytest.approx(1 / 6, abs=1e-6)
    assert np.abs(m + absorbed - 1 / 6).max() < 5e-3


def test_grid_convergence():
    s1 = list(oracle_run(1001, [0.1]))[-1].s_est
    s2 = list(oracle_run(2001, [0.1]))[-1].s_est
    assert abs(s1 - s2) < 1e-3


def test_solve_trajectory(oracle_traj):
    tr = oracle_traj
    assert tr.method is Method.ORACLE
    assert tr.samples[0].t == 0.0 and tr.samples[0].a == 0.5 and tr.samples[0].s == 1.0
    assert tr.termination is Termination.EXTINCTION
    assert 0.19 < tr.t_last < 0.2
    assert np.all(np.diff(tr.t) > 0)


def test_solve_validation():
    with pytest.raises(DomainError):
        oracle_solve(ProblemSpec(method=Method.ORACLE), 51, [0.0, 0.1])
    with pytest.raises(DomainError):
        oracle_solve(ProblemSpec(method=Method.ORACLE), 1001, [0.1, 0.05])


def test_solve_honours_offset():
    tr = oracle_solve(ProblemSpec(method=Method.ORACLE, t0=0.05, t_end=0.07), 201, [0.05, 0.06])
    assert tr.samples[0].t == 0.05 and tr.samples[0].a == 0.5
