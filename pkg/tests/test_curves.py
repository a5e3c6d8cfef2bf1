import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from swewaves import curves
from swewaves.curves import BranchError, NoStationaryContact, RootVerdict, WaveFamily
from swewaves.states import DomainError, DomainLabel, State, classify_domain

from scenarios import random_state

EPS = np.finfo(float).eps


def bisect(f, lo, hi, n=200):
    """Plain bisection, the independent root oracle for these tests."""
    f_lo = f(lo)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bernoulli_gap(U0, a1, g):
    q = U0.h * U0.u
    E = U0.u ** 2 / (2 * g) + U0.h + U0.a
    return lambda h: q * q / (2 * g * h * h) + h + a1 - E


@pytest.mark.parametrize("family, U0, h, expected", [
    (2, State(0.0, 1.0), 4.0, 2.0),
    (1, State(0.0, 1.0), 0.25, 1.0),
    (2, State(1.0, 1.0), 1.0, 1.0),
])
def test_rarefaction_u(family, U0, h, expected):
    assert curves.rarefaction_u(family, U0, h, 1.0) == pytest.approx(expected, abs=1e-15)


def test_rarefaction_rejects_negative_depth():
    with pytest.raises(DomainError):
        curves.rarefaction_u(1, State(0.0, 1.0), -0.1, 1.0)


@pytest.mark.parametrize("U0, axis, value", [
    (State(1.0, 1.0), "h", 0.25),
    (State(3.0, 1.0), "u", 1.0),
    (State(2.0, 1.0), "origin", 0.0),
])
def test_axis_intercept(U0, axis, value):
    got = curves.rarefaction_axis_intercept(U0, 1.0)
    assert got.axis == axis
    assert got.value == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("family, U0, h, expected", [
    (1, State(0.0, 1.0), 4.0, -math.sqrt(0.5 * 9 * 1.25)),
    (2, State(0.0, 1.0), 0.5, -math.sqrt(0.5 * 0.25 * 3)),
    (1, State(5.0, 2.0), 2.0, 5.0),
])
def test_shock_u(family, U0, h, expected):
    assert curves.shock_u(family, U0, h, 1.0) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("family, h", [(1, 0.5), (2, 2.0)])
def test_shock_u_wrong_branch(family, h):
    with pytest.raises(BranchError):
        curves.shock_u(family, State(0.0, 1.0), h, 1.0)


@settings(max_examples=300)
@given(st.floats(-5, 5), st.floats(0.05, 5), st.floats(0.05, 5), st.sampled_from([1.0, 9.81]))
@example(1.0, 1.0, 0.99999, 1.0)
def test_hugoniot_and_rankine_hugoniot(u0, h0, h, g):
    family = 1 if h >= h0 else 2
    U0 = State(u0, h0)
    U = curves.shock_state(family, U0, h, g)
    # rounding of u and u0 alone limits the relative residual of a weak jump
    du = abs(U.u - u0)
    floor = 8.0 * EPS * max(1.0, abs(u0), abs(U.u)) / du if du > 0.0 else 0.0
    assert curves.hugoniot_residual(U0, U, g) < 1e-12 + floor
    if abs(h - h0) > 1e-6 * h0:
        sigma = curves.shock_speed(family, U0, U, g)
        mass = (U.h * U.u - U0.h * U0.u) / (U.h - U0.h)
        assert sigma == pytest.approx(mass, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("family, U0, U, expected", [
    (1, State(0.0, 1.0), State(0.0, 1.0), -1.0),
    (2, State(0.0, 1.0), State(-math.sqrt(0.375), 0.5), math.sqrt(0.5 * 1.5 * 0.5)),
    (2, State(0.0, 1.0), State(0.0, 1.0), 1.0),
])
def test_shock_speed(family, U0, U, expected):
    assert curves.shock_speed(family, U0, U, 1.0) == pytest.approx(expected, rel=1e-14)


def test_zero_speed_state_none_outside_supercritical():
    assert curves.zero_speed_state(1, State(0.0, 1.0), 1.0) is None
    assert curves.zero_speed_state(2, State(0.5, 1.0), 1.0) is None


def test_zero_speed_state_matches_bisection():
    U0 = State(2.0, 1.0)
    Z = curves.zero_speed_state(1, U0, 1.0)
    sigma = lambda h: curves.shock_speed(1, U0, State(0.0, h), 1.0)
    h_ref = bisect(sigma, U0.h * (1 + 1e-12), 100 * U0.h)
    assert Z.h == pytest.approx(h_ref, rel=1e-12)
    assert abs(curves.shock_speed(1, U0, Z, 1.0)) < 1e-12
    assert curves.lax_admissible(1, U0, Z, 1.0)


def test_zero_speed_state_mirror_family_2():
    U0 = State(-2.0, 1.0)
    Z = curves.zero_speed_state(2, U0, 1.0)
    # Z is the left state of a stationary 2-shock whose right state is U0
    assert abs(curves.shock_speed(2, Z, U0, 1.0)) < 1e-12
    assert curves.hugoniot_residual(Z, U0, 1.0) < 1e-12


@pytest.mark.parametrize("family, U0, h, expected", [
    (1, State(0.0, 1.0), 4.0, True),
    (1, State(0.0, 1.0), 0.5, False),
    (2, State(0.0, 1.0), 0.5, True),
])
def test_lax_admissible(family, U0, h, expected):
    U = State(U0.u - math.sqrt(0.5 * (h - U0.h) ** 2 * (1 / h + 1 / U0.h)), h)
    assert curves.lax_admissible(family, U0, U, 1.0) is expected


@pytest.mark.parametrize("U0, expected", [
    (State(0.0, 1.0, 2.0), 3.0),
    (State(1.0, 1.0, 0.0), 0.0),
    (State(2.0, 1.0, 1.0), 4.0 - 1.5 * 2 ** (2 / 3)),
])
def test_a_max(U0, expected):
    assert curves.a_max(U0, 1.0) == pytest.approx(expected, abs=1e-14)


def test_stationary_identity_root():
    roots = curves.stationary_roots(State(1.0, 1.0, 1.0), 1.0, 1.0)
    assert roots.verdict is RootVerdict.DoubleRoot
    assert roots.supercritical.h == pytest.approx(1.0, rel=1e-12)


def test_stationary_roots_against_bisection():
    U0, a1, g = State(2.0, 1.0, 1.0), 0.5, 1.0
    roots = curves.stationary_roots(U0, a1, g)
    assert roots.verdict is RootVerdict.TwoRoots
    f = bernoulli_gap(U0, a1, g)
    hc = curves.critical_depth(U0.q, g)
    assert roots.supercritical.h == pytest.approx(bisect(f, 1e-3, hc), rel=1e-13)
    assert roots.subcritical.h == pytest.approx(bisect(f, hc, 10.0), rel=1e-13)
    for U in (roots.supercritical, roots.subcritical):
        assert abs(f(U.h)) < 1e-12
        assert curves.stationary_residual(U0, U, g) < 1e-12


def test_stationary_no_solution():
    roots = curves.stationary_roots(State(0.0, 1.0, 2.0), 3.5, 1.0)
    assert roots.verdict is RootVerdict.NoSolution
    with pytest.raises(NoStationaryContact):
        curves.stationary_select(State(0.0, 1.0, 2.0), 3.5, 1.0)


def test_stationary_zero_discharge():
    roots = curves.stationary_roots(State(0.0, 1.0, 2.0), 1.5, 1.0)
    assert roots.verdict is RootVerdict.SingleRoot
    assert roots.subcritical.h == pytest.approx(1.5, abs=1e-15)


def test_stationary_tiny_discharge_brackets():
    U0 = State(5.551115123125783e-17, 0.6545937736729018, 1.0)
    roots = curves.stationary_roots(U0, -0.18171196969558157, 1.0)
    assert roots.verdict is RootVerdict.TwoRoots
    assert roots.subcritical.h == pytest.approx(U0.h + 1.18171196969558157, rel=1e-12)


@pytest.mark.parametrize("U0, a1, branch", [
    (State(2.0, 1.0, 1.0), 0.5, "super"),
    (State(0.5, 1.0, 1.0), 0.5, "sub"),
])
def test_stationary_select_branch(U0, a1, branch):
    U1 = curves.stationary_select(U0, a1, 1.0)
    hc = curves.critical_depth(U0.q, 1.0)
    assert (U1.h < hc) if branch == "super" else (U1.h > hc)
    assert curves.stationary_residual(U0, U1, 1.0) < 1e-12


def test_stationary_select_identity():
    U0 = State(2.0, 1.0, 1.0)
    assert curves.stationary_select(U0, 1.0, 1.0) == U0


@pytest.mark.parametrize("U, expected", [
    (State(1.0, 1.0), (-1.0, 0.0, 0.0)),
    (State(2.0, 1.0), (-0.5, 3.0, -1.5)),
])
def test_stationary_curve_derivatives(U, expected):
    assert curves.stationary_curve_derivatives(U, 1.0) == pytest.approx(expected, abs=1e-15)


def test_stationary_curve_derivatives_zero_u():
    with pytest.raises(DomainError):
        curves.stationary_curve_derivatives(State(0.0, 1.0), 1.0)


@pytest.mark.parametrize("U0, a1", [
    (State(2.0, 1.0, 1.0), 0.3),   # D3, a < a0
    (State(0.5, 1.0, 1.0), 0.3),   # D2, a < a0
])
def test_lemma3_monotone_branch(U0, a1):
    # along the selected branch between a0 and a1 the depth moves monotonically in u
    levels = np.linspace(U0.a, a1, 40)
    pts = [curves.stationary_select(U0, float(a), 1.0) for a in levels]
    u = np.array([p.u for p in pts])
    h = np.array([p.h for p in pts])
    assert np.all(np.diff(u) * np.diff(h) < 0)
    if classify_domain(U0, 1.0) is DomainLabel.D3:
        assert u[-1] > U0.u and h[-1] < U0.h
    else:
        assert u[-1] < U0.u and h[-1] > U0.h


@pytest.mark.parametrize("kind, U0, h, expected", [
    ("W1", State(0.0, 1.0), 1.0, 0.0),
    ("W1", State(0.0, 1.0), 0.25, 1.0),
    ("W2", State(0.0, 1.0), 0.5, -math.sqrt(0.375)),
])
def test_wave_curve(kind, U0, h, expected):
    assert curves.wave_curve(kind, U0, h, 1.0) == pytest.approx(expected, abs=1e-14)


@given(st.floats(-3, 3), st.floats(0.1, 3))
def test_wave_curves_monotone_and_c1(u0, h0):
    U0 = State(u0, h0)
    hs = np.linspace(0.05 * h0, 4 * h0, 200)
    w1 = np.array([curves.wave_curve("W1", U0, h, 1.0) for h in hs])
    w2 = np.array([curves.wave_curve("W2", U0, h, 1.0) for h in hs])
    assert np.all(np.diff(w1) < 0) and np.all(np.diff(w2) > 0)
    eps = 1e-6 * h0
    for kind in ("W1", "W2"):
        left = (curves.wave_curve(kind, U0, h0, 1.0) - curves.wave_curve(kind, U0, h0 - eps, 1.0)) / eps
        right = (curves.wave_curve(kind, U0, h0 + eps, 1.0) - curves.wave_curve(kind, U0, h0, 1.0)) / eps
        assert left == pytest.approx(right, rel=1e-4)


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32 - 1))
def test_shock_speed_sign_tables(seed):
    # U0 is the left state of the 1-shock and the right state of the 2-shock
    rng = np.random.default_rng(seed)
    U0 = random_state(rng)
    dom = classify_domain(U0, 1.0)
    h1 = U0.h * rng.uniform(1.01, 5.0)
    h2 = U0.h * rng.uniform(1.01, 5.0)
    s1 = curves.shock_speed(1, U0, curves.shock_state(1, U0, h1, 1.0), 1.0)
    s2 = curves.shock_speed(2, State(curves.w2_backward_u(U0, h2, 1.0), h2), U0, 1.0)
    if dom in (DomainLabel.D1, DomainLabel.D2minus, DomainLabel.D2plus):
        assert s1 < 0
    if dom in (DomainLabel.D2minus, DomainLabel.D2plus, DomainLabel.D3):
        assert s2 > 0
    if dom is DomainLabel.D3:
        Z = curves.zero_speed_state(1, U0, 1.0)
        assert (s1 > 0) == (h1 < Z.h)
    if dom is DomainLabel.D1:
        Z = curves.zero_speed_state(2, U0, 1.0)
        assert (s2 < 0) == (h2 < Z.h)


@pytest.mark.parametrize("family, index, shock, rarefaction", [
    (WaveFamily.R1, 1, False, True),
    (WaveFamily.S2, 2, True, False),
    (WaveFamily.S0, 3, False, False),
])
def test_wave_family_flags(family, index, shock, rarefaction):
    assert (family.index, family.is_shock, family.is_rarefaction) == (index, shock, rarefaction)


def test_sample_curves_has_w1_knot():
    rows = curves.sample_curves(State(0.0, 1.0, 0.0), 1.0)
    w1 = {r[2]: r[1] for r in rows if r[4] == "W1"}
    assert w1[0.25] == pytest.approx(1.0, abs=1e-15)
