"""Elementary wave curves in the (u, h) phase plane.

Rarefaction and shock curves of the two genuinely nonlinear families, the
stationary contact carried by a bottom jump, and the entropy rule that picks
one of its two roots.

Curves are written for a *left* state ``U0``; the ``*_backward`` helpers give
the set of left states that reach a fixed right state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .states import (
    BOUNDARY_TOL,
    G_DEFAULT,
    DomainError,
    DomainLabel,
    State,
    celerity,
    check_gravity,
    classify_domain,
    eigenstructure,
)

DOUBLE_ROOT_TOL = 1e-11


class BranchError(DomainError):
    """Depth lies on the wrong side of ``h0`` for the requested shock branch."""


class NoStationaryContact(DomainError):
    """The bottom level exceeds ``a_max``; no stationary wave exists."""


class WaveFamily(enum.Enum):
    R1 = "R1"
    R2 = "R2"
    S1 = "S1"
    S2 = "S2"
    S0 = "S0"

    @property
    def index(self) -> int:
        return {"R1": 1, "S1": 1, "R2": 2, "S2": 2, "S0": 3}[self.value]

    @property
    def is_shock(self) -> bool:
        return self in (WaveFamily.S1, WaveFamily.S2)

    @property
    def is_rarefaction(self) -> bool:
        return self in (WaveFamily.R1, WaveFamily.R2)


class RootVerdict(enum.Enum):
    NoSolution = "NoSolution"
    DoubleRoot = "DoubleRoot"
    TwoRoots = "TwoRoots"
    # zero discharge: (2.14) degenerates to a single subcritical root
    SingleRoot = "SingleRoot"


@dataclass(frozen=True)
class StationaryRoots:
    verdict: RootVerdict
    supercritical: Optional[State] = None
    subcritical: Optional[State] = None
    h_critical: float = 0.0


@dataclass(frozen=True)
class Intercept:
    """Where a 2-rarefaction curve meets an axis: ``axis`` is 'h', 'u' or 'origin'."""

    axis: str
    value: float


def _family(family: int) -> int:
    if family not in (1, 2):
        raise ValueError(f"family must be 1 or 2, got {family!r}")
    return family


# --------------------------------------------------------------------------
# rarefaction curves

def rarefaction_u(family: int, U0: State, h: float, g: float = G_DEFAULT) -> float:
    """Velocity on the 1- or 2-rarefaction curve through ``U0`` at depth ``h``.

    Evaluation on the non-physical side of ``h0`` is allowed (curve
    extension); ``h = 0`` is allowed as a formal limit.
    """
    _family(family)
    g = check_gravity(g)
    if h < 0.0:
        raise DomainError(f"negative depth {h!r}")
    sign = -1.0 if family == 1 else 1.0
    return U0.u + sign * 2.0 * math.sqrt(g) * (math.sqrt(h) - math.sqrt(U0.h))


def rarefaction_state(family: int, U0: State, h: float, g: float = G_DEFAULT) -> State:
    return State(rarefaction_u(family, U0, h, g), h, U0.a)


def rarefaction_axis_intercept(U0: State, g: float = G_DEFAULT) -> Intercept:
    """Axis intercept of the 2-rarefaction curve through ``U0`` continued to low depth."""
    g = check_gravity(g)
    s = U0.u - 2.0 * math.sqrt(g * U0.h)
    if abs(s) <= BOUNDARY_TOL * max(1.0, abs(U0.u)):
        return Intercept("origin", 0.0)
    if s < 0.0:
        return Intercept("h", (math.sqrt(U0.h) - U0.u / (2.0 * math.sqrt(g))) ** 2)
    return Intercept("u", s)


def sonic_depth_on_r1(U0: State, g: float = G_DEFAULT) -> float:
    """Depth where the 1-rarefaction curve through ``U0`` crosses ``u = c``."""
    g = check_gravity(g)
    J = U0.u + 2.0 * math.sqrt(g * U0.h)
    if J <= 0.0:
        raise DomainError("1-rarefaction curve does not reach u = c")
    return (J / 3.0) ** 2 / g


# --------------------------------------------------------------------------
# shocks

def _hugoniot_jump(h0: float, h: float, g: float) -> float:
    return math.sqrt(0.5 * g * (h - h0) ** 2 * (1.0 / h + 1.0 / h0))


def shock_u(family: int, U0: State, h: float, g: float = G_DEFAULT) -> float:
    """Velocity on the admissible 1- or 2-shock curve leaving ``U0``."""
    _family(family)
    g = check_gravity(g)
    if not h > 0.0:
        raise DomainError(f"shock curve needs h > 0, got {h!r}")
    if family == 1 and h < U0.h:
        raise BranchError(f"1-shock needs h >= h0 ({h} < {U0.h})")
    if family == 2 and h > U0.h:
        raise BranchError(f"2-shock needs h <= h0 ({h} > {U0.h})")
    return U0.u - _hugoniot_jump(U0.h, h, g)


def shock_state(family: int, U0: State, h: float, g: float = G_DEFAULT) -> State:
    return State(shock_u(family, U0, h, g), h, U0.a)


def hugoniot_residual(U0: State, U: State, g: float = G_DEFAULT) -> float:
    """Relative residual of ``(u-u0)^2 = g/2 (h-h0)^2 (1/h + 1/h0)``."""
    lhs = (U.u - U0.u) ** 2
    rhs = 0.5 * g * (U.h - U0.h) ** 2 * (1.0 / U.h + 1.0 / U0.h)
    return abs(lhs - rhs) / max(lhs, rhs, 1e-300) if max(lhs, rhs) > 0 else 0.0


def shock_speed(family: int, U0: State, U: State, g: float = G_DEFAULT) -> float:
    """Speed of the shock with left state ``U0`` and right state ``U``."""
    _family(family)
    g = check_gravity(g)
    root = math.sqrt(0.5 * g * (U.h + U0.h) * U.h / U0.h)
    return U0.u - root if family == 1 else U0.u + root


def zero_speed_depth(U0: State, g: float = G_DEFAULT) -> float:
    """Depth ``h > h0`` with ``u0 = sqrt(g/2 (h+h0) h/h0)``."""
    g = check_gravity(g)
    return 0.5 * (-U0.h + math.sqrt(U0.h ** 2 + 8.0 * U0.h * U0.u ** 2 / g))


def zero_speed_state(family: int, U0: State, g: float = G_DEFAULT) -> Optional[State]:
    """State across a zero-speed shock of ``family`` attached to ``U0``.

    Family 1 (``U0`` in D3): right state of the stationary 1-shock leaving
    ``U0``. Family 2 (``U0`` in D1): mirror image, i.e. the left state of
    the stationary 2-shock whose right state is ``U0``. For other domains the
    shock speed keeps one sign and ``None`` is returned.
    """
    _family(family)
    dom = classify_domain(U0, g)
    if family == 1:
        if dom is not DomainLabel.D3:
            return None
        h = zero_speed_depth(U0, g)
        return State(shock_u(1, U0, h, g), h, U0.a)
    if dom is not DomainLabel.D1:
        return None
    h = zero_speed_depth(U0, g)
    return State(U0.u + _hugoniot_jump(U0.h, h, g), h, U0.a)


def lax_admissible(family: int, U0: State, U: State, g: float = G_DEFAULT, tol: float = 1e-12) -> bool:
    """Lax conditions ``lambda_i(U) < sigma_i < lambda_i(U0)`` (``tol`` absolute slack)."""
    _family(family)
    if family == 1 and U.h < U0.h * (1.0 - 1e-14):
        return False
    if family == 2 and U.h > U0.h * (1.0 + 1e-14):
        return False
    sigma = shock_speed(family, U0, U, g)
    k = 0 if family == 1 else 1
    lam_r = eigenstructure(U, g).speeds[k]
    lam_l = eigenstructure(U0, g).speeds[k]
    return (lam_r - tol < sigma) and (sigma < lam_l + tol)


# --------------------------------------------------------------------------
# composite curves

def wave_curve(kind: str, U0: State, h: float, g: float = G_DEFAULT) -> float:
    """``W1`` (backward) or ``W2`` (forward) wave curve through ``U0``."""
    if kind == "W1":
        return rarefaction_u(1, U0, h, g) if h <= U0.h else shock_u(1, U0, h, g)
    if kind == "W2":
        return rarefaction_u(2, U0, h, g) if h >= U0.h else shock_u(2, U0, h, g)
    raise ValueError(f"kind must be 'W1' or 'W2', got {kind!r}")


def w1_state(U0: State, h: float, g: float = G_DEFAULT) -> State:
    return State(wave_curve("W1", U0, h, g), h, U0.a)


def w2_backward_u(UR: State, h: float, g: float = G_DEFAULT) -> float:
    """Velocity of the left state at depth ``h`` that reaches ``UR`` by a 2-wave."""
    g = check_gravity(g)
    if h <= UR.h:
        return UR.u - 2.0 * math.sqrt(g) * (math.sqrt(UR.h) - math.sqrt(h))
    return UR.u + _hugoniot_jump(UR.h, h, g)


# --------------------------------------------------------------------------
# stationary contact

def critical_depth(q: float, g: float = G_DEFAULT) -> float:
    return (q * q / check_gravity(g)) ** (1.0 / 3.0)


def a_max(U0: State, g: float = G_DEFAULT) -> float:
    """Largest bottom level reachable from ``U0`` by a stationary contact."""
    g = check_gravity(g)
    q = abs(U0.h * U0.u)
    return U0.a + U0.h + U0.u ** 2 / (2.0 * g) - 1.5 / g ** (1.0 / 3.0) * q ** (2.0 / 3.0)


def stationary_curve(U0: State, h: float, g: float = G_DEFAULT) -> tuple[float, float]:
    """``(u, a)`` on the stationary contact curve through ``U0`` at depth ``h``."""
    g = check_gravity(g)
    u = U0.h * U0.u / h
    a = U0.a + (U0.u ** 2 - u ** 2) / (2.0 * g) + U0.h - h
    return u, a


def stationary_residual(U0: State, U: State, g: float = G_DEFAULT) -> float:
    """Max relative mismatch of ``hu`` and ``u^2/2 + g(h+a)`` across a jump."""
    q0, q1 = U0.h * U0.u, U.h * U.u
    b0 = 0.5 * U0.u ** 2 + g * (U0.h + U0.a)
    b1 = 0.5 * U.u ** 2 + g * (U.h + U.a)
    rq = abs(q0 - q1) / max(abs(q0), abs(q1), 1e-300) if max(abs(q0), abs(q1)) > 0 else 0.0
    rb = abs(b0 - b1) / max(abs(b0), abs(b1), 1e-300)
    return max(rq, rb)


def _polish(f, df, h, lo, hi):
    # Newton polish inside the bracket found by brentq
    for _ in range(4):
        d = df(h)
        if d == 0.0:
            break
        step = f(h) / d
        h_new = h - step
        if not lo <= h_new <= hi:
            break
        if abs(step) <= 1e-14 * abs(h):
            h = h_new
            break
        h = h_new
    return h


def stationary_roots(U0: State, a1: float, g: float = G_DEFAULT) -> StationaryRoots:
    """Solve the stationary jump from ``U0`` to bottom level ``a1``.

    Returns both roots of ``q^2/(2 g h^2) + h = H`` where ``H`` is the head
    above ``a1``; the supercritical one lies below the critical depth and the
    subcritical one above it.
    """
    g = check_gravity(g)
    q = U0.h * U0.u
    H = U0.u ** 2 / (2.0 * g) + U0.h + U0.a - a1
    if q == 0.0:
        if H <= 0.0:
            return StationaryRoots(RootVerdict.NoSolution)
        return StationaryRoots(RootVerdict.SingleRoot, None, State(0.0, H, a1), 0.0)

    hc = critical_depth(q, g)
    amax = a_max(U0, g)
    if abs(a1 - amax) <= DOUBLE_ROOT_TOL * max(1.0, abs(amax)):
        Uc = State(q / hc, hc, a1)
        return StationaryRoots(RootVerdict.DoubleRoot, Uc, Uc, hc)
    if a1 > amax:
        return StationaryRoots(RootVerdict.NoSolution, h_critical=hc)

    k = q * q / (2.0 * g)

    def f(h):
        return k / (h * h) + h - H

    def df(h):
        return 1.0 - 2.0 * k / h ** 3

    # half the depth where the kinetic term alone equals H: f(lo) = 3H + lo > 0
    lo = 0.5 * abs(q) / math.sqrt(2.0 * g * H)
    h_sup = brentq(f, lo, hc, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    h_sup = _polish(f, df, h_sup, lo, hc)
    h_sub = brentq(f, hc, H, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    h_sub = _polish(f, df, h_sub, hc, H)
    # identity jump: a1 == a0 returns U0 on its own branch exactly
    if a1 == U0.a:
        if U0.h < hc:
            h_sup = U0.h
        elif U0.h > hc:
            h_sub = U0.h
    return StationaryRoots(
        RootVerdict.TwoRoots,
        State(q / h_sup, h_sup, a1),
        State(q / h_sub, h_sub, a1),
        hc,
    )


def stationary_select(U0: State, a1: float, g: float = G_DEFAULT, branch: Optional[str] = None) -> State:
    """Entropy-selected stationary image of ``U0`` at bottom level ``a1``.

    D1/D3 states keep the supercritical root and D2 states the subcritical
    one. A sonic ``U0`` sits on the boundary of both; it defaults to the
    supercritical root unless ``branch`` ('super' or 'sub') says otherwise.
    """
    if a1 == U0.a:
        return U0
    roots = stationary_roots(U0, a1, g)
    if roots.verdict is RootVerdict.NoSolution:
        raise NoStationaryContact(f"a1={a1} exceeds a_max={a_max(U0, g)} for {U0}")
    if roots.verdict is RootVerdict.SingleRoot:
        return roots.subcritical
    if branch is None:
        dom = classify_domain(U0, g)
        if dom.subcritical:
            branch = "sub"
        else:
            branch = "super"
    if branch == "super":
        return roots.supercritical
    if branch == "sub":
        return roots.subcritical
    raise ValueError(f"branch must be 'super' or 'sub', got {branch!r}")


def stationary_curve_derivatives(U: State, g: float = G_DEFAULT) -> tuple[float, float, float]:
    """``(dh/du, da/dh, da/du)`` along the stationary curve at ``U``."""
    g = check_gravity(g)
    if U.u == 0.0:
        raise DomainError("derivatives in u are undefined at u = 0")
    u, h = U.u, U.h
    return (-h / u, (u * u - g * h) / (g * h), -(u * u - g * h) / (g * u))


# --------------------------------------------------------------------------
# samplers

def sample_curves(U0: State, g: float = G_DEFAULT, n: int = 101, h_max: Optional[float] = None):
    """Rows ``(param, u, h, a, branch)`` on W1, W2 and the stationary curve."""
    g = check_gravity(g)
    h_max = h_max if h_max is not None else 4.0 * U0.h
    hs = np.linspace(h_max / n, h_max, n)
    # make sure the knots h0/4 and h0 appear exactly
    hs = np.unique(np.concatenate([hs, [0.25 * U0.h, U0.h]]))
    rows = []
    for kind in ("W1", "W2"):
        for h in hs:
            u = wave_curve(kind, U0, float(h), g)
            rows.append((float(h), u, float(h), U0.a, kind))
    for h in hs:
        u, a = stationary_curve(U0, float(h), g)
        rows.append((float(h), u, float(h), a, "S0"))
    return rows
