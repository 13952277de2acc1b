import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import simpson

from oxyfbp import (
    DegenerateBoundaryError,
    Derivative,
    ExtinctionSignal,
    Method,
    SingularDenominatorError,
    State,
    check_constraint,
    eval_profile,
    moment_residual,
    oxygen_mass,
    rhs_deg3,
    rhs_deg6,
)
from oxyfbp.moments import constraint_boundary_a0, first_moment, oxygen_mass_rate, rhs

A0 = 29 / 128
MOMENT_METHODS = [Method.DEG3, Method.DEG6]


def test_rhs_deg6_at_sealing():
    d = rhs_deg6(A0, 1.0)
    assert d.ds_dt == 0.0
    assert d.da_dt == pytest.approx(-35 / 16, abs=1e-15)
    assert -69.453125 / 31.75 == -35 / 16


def test_rhs_deg6_inside_constraint():
    assert rhs_deg6(0.1, 1.0).ds_dt == pytest.approx(3 * (12.8 - 29) / 9.8, rel=1e-14)
    assert rhs_deg6(0.1, 1.0).ds_dt == pytest.approx(-4.9591837, abs=1e-7)


def test_rhs_deg3_examples():
    d = rhs_deg3(0.2, 1.0)
    assert d.ds_dt == pytest.approx(0.0, abs=1e-15)
    assert d.da_dt == pytest.approx(-2.0, abs=1e-15)
    assert rhs_deg3(0.1, 1.0).ds_dt == pytest.approx(-20 / 3, rel=1e-14)


@pytest.mark.parametrize("f", [rhs_deg3, rhs_deg6])
def test_rhs_rejects_collapsed_boundary(f):
    with pytest.raises(DegenerateBoundaryError):
        f(0.1, 0.0)


def test_rhs_guards():
    with pytest.raises(ExtinctionSignal):
        rhs_deg3(0.0, 0.5)
    with pytest.raises(SingularDenominatorError):
        rhs_deg6(-5 / 48, 1.0)


@pytest.mark.parametrize(
    "method, a, s, expected",
    [
        (Method.DEG6, A0, 1.0, 0.0),
        (Method.DEG3, 0.2265625, 1.0, 0.1328125),
        (Method.DEG3, 0.1, 1.0, -0.5),
    ],
)
def test_check_constraint(method, a, s, expected):
    assert check_constraint(method, a, s) == pytest.approx(expected, abs=1e-15)


def test_constraint_boundary_start():
    assert constraint_boundary_a0(Method.DEG6) == A0
    assert constraint_boundary_a0(Method.DEG3) == 0.2


def _linear_system_oracle(method, a, s, h=1e-6):
    """Solve the two moment balances for (a', s') using quadrature only.

    d/dt int u = int u_a a' + int u_s s' (Leibniz term vanishes) must equal
    -s; d/dt int x u must equal a - s^2/2. Partials come from central
    differences of the profile, integrals from Simpson.
    """
    x = np.linspace(0, s, 4097)
    u_a = (eval_profile(method, a + h, s, x) - eval_profile(method, a - h, s, x)) / (2 * h)
    # differentiate in s at fixed X = x/s, then shift to fixed x: u_s|x = u_s|X - X u_x
    X = x / s
    u_sp = eval_profile(method, a, s + h, X * (s + h))
    u_sm = eval_profile(method, a, s - h, X * (s - h))
    u0 = eval_profile(method, a, s, x)
    du_ds_fixedX = (u_sp - u_sm) / (2 * h)
    u_x = np.gradient(u0, x, edge_order=2)
    u_s = du_ds_fixedX - X * u_x
    A = np.array([
        [simpson(u_a, x=x), simpson(u_s, x=x)],
        [simpson(x * u_a, x=x), simpson(x * u_s, x=x)],
    ])
    b = np.array([-s, a - s * s / 2])
    da, ds = np.linalg.solve(A, b)
    return da, ds


@pytest.mark.parametrize("method", MOMENT_METHODS)
@pytest.mark.parametrize("a, s", [(0.2, 1.0), (0.05, 0.6), (0.01, 0.3), (0.15, 0.9)])
def test_rhs_matches_independent_linear_solve(method, a, s):
    da, ds = _linear_system_oracle(method, a, s)
    d = rhs(method, a, s)
    assert d.da_dt == pytest.approx(da, rel=1e-5, abs=1e-6)
    assert d.ds_dt == pytest.approx(ds, rel=1e-5, abs=1e-6)


def test_moment_residual_examples():
    r = moment_residual(Method.DEG6, State(0, 1.0, A0), rhs_deg6(A0, 1.0))
    assert abs(r.zeroth) < 1e-12 and abs(r.first) < 1e-12
    r = moment_residual(Method.DEG3, State(0, 0.9, 0.15), rhs_deg3(0.15, 0.9))
    assert abs(r.zeroth) < 1e-12 and abs(r.first) < 1e-12
    wrong = moment_residual(Method.DEG6, State(0, 1.0, 0.2), Derivative(0.0, 0.0))
    assert wrong.zeroth == pytest.approx(35.0, abs=1e-12)
    assert wrong.zeroth_quadrature == pytest.approx(35.0, abs=1e-9)


def test_moment_residual_degenerate():
    with pytest.raises(DegenerateBoundaryError):
        moment_residual(Method.DEG6, State(0, 0.0, 0.1), Derivative(0, 0))


@pytest.mark.parametrize("method", MOMENT_METHODS)
@given(a=st.floats(0.0, 0.3), s=st.floats(0.05, 1.0), da=st.floats(-5, 5), ds=st.floats(-5, 5))
def test_closed_form_and_quadrature_residuals_agree(method, a, s, da, ds):
    r = moment_residual(method, State(0, s, a), Derivative(ds, da))
    assert r.zeroth == pytest.approx(r.zeroth_quadrature, abs=1e-9)
    assert r.first == pytest.approx(r.first_quadrature, abs=1e-9)


def test_oxygen_mass_examples():
    assert oxygen_mass(Method.DEG3, 0.2, 1.0) == pytest.approx(0.1, abs=1e-16)
    assert oxygen_mass(Method.DEG6, A0, 1.0) == pytest.approx((48 * A0 + 1) / 105, abs=1e-16)
    assert oxygen_mass(Method.DEG3, 1e-14, 0.7) < 1e-14
    # the degree-6 profile keeps the s^2/8 terms when a = 0
    assert oxygen_mass(Method.DEG6, 0.0, 0.7) == pytest.approx(0.7**3 / 105)


@pytest.mark.parametrize("method", MOMENT_METHODS)
@pytest.mark.parametrize("a, s", [(A0, 1.0), (0.2, 1.0), (0.0, 0.5), (0.01, 0.05), (0.3, 0.4)])
def test_closed_forms_match_quadrature(method, a, s):
    x = np.linspace(0, s, 2 * 2048 + 1)
    u = eval_profile(method, a, s, x)
    assert oxygen_mass(method, a, s) == pytest.approx(simpson(u, x=x), abs=1e-10)
    assert first_moment(method, a, s) == pytest.approx(simpson(x * u, x=x), abs=1e-10)


@pytest.mark.parametrize("method", MOMENT_METHODS)
@given(a=st.floats(0.01, 0.3), s=st.floats(0.05, 1.0))
def test_zeroth_moment_mass_law(method, a, s):
    assert oxygen_mass_rate(method, a, s, rhs(method, a, s)) == pytest.approx(-s, abs=1e-10)


@pytest.mark.parametrize("method", MOMENT_METHODS)
@given(a=st.floats(1e-6, 0.3), s=st.floats(0.05, 1.0))
def test_sign_property(method, a, s):
    if check_constraint(method, a, s) <= 0:
        assert rhs(method, a, s).ds_dt <= 0
