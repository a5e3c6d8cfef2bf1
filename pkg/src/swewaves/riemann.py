"""Riemann problems with a single bottom step located at the origin of ``xi``.

Three wave constructions connect a left state ``UL`` (bottom ``a0``) to a
right state ``UR`` (bottom ``a1``):

``sub``
    ``W1`` with non-positive speed ending subcritical, a subcritical stationary
    jump, then ``W2``.
``super``
    supercritical stationary jump first, then ``W1`` with non-negative speed
    and ``W2``.
``resonant``
    a 1-rarefaction that ends on ``u = c``, a jump to the supercritical root,
    then ``W1`` with non-negative speed and ``W2``.

With a flat bottom the classical two-wave solver is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from . import curves
from .curves import WaveFamily
from .states import (
    G_DEFAULT,
    DomainLabel,
    NumericalFailure,
    State,
    UnsupportedConfiguration,
    celerity,
    classify_domain,
    eigenstructure,
    is_subcritical,
    is_supercritical_right,
    riemann_invariants,
)

CONSTRUCTIONS = ("sub", "super", "resonant")
# gap values this close to zero at a bracket end count as a root there
ENDPOINT_SLACK = 1e-13


class ConstructionFailed(ValueError):
    """The requested wave construction has no admissible solution."""


@dataclass(frozen=True)
class Wave:
    family: WaveFamily
    left: State
    right: State
    speed_lo: float
    speed_hi: float

    @property
    def strength(self) -> float:
        return abs(self.right.h - self.left.h) + abs(self.right.u - self.left.u)

    def to_row(self) -> dict:
        return {
            "family": self.family.value,
            "uL": self.left.u, "hL": self.left.h, "aL": self.left.a,
            "uR": self.right.u, "hR": self.right.h, "aR": self.right.a,
            "speed_lo": self.speed_lo, "speed_hi": self.speed_hi,
        }


@dataclass
class WaveFan:
    """Ordered waves from ``left`` to ``right``; the step sits at ``xi = 0``."""

    waves: list[Wave]
    construction: str = ""
    g: float = G_DEFAULT
    tags: dict = field(default_factory=dict)

    @property
    def left(self) -> State:
        return self.waves[0].left

    @property
    def right(self) -> State:
        return self.waves[-1].right

    @property
    def families(self) -> list[str]:
        return [w.family.value for w in self.waves]

    def nontrivial(self, tol: float = 1e-12) -> "WaveFan":
        """Same fan without zero-strength nonlinear waves."""
        keep = [w for w in self.waves if w.family is WaveFamily.S0 or w.strength > tol]
        return WaveFan(keep or self.waves[:1], self.construction, self.g, dict(self.tags))

    def intermediate_states(self) -> list[State]:
        return [w.right for w in self.waves[:-1]]

    def sample(self, xi: np.ndarray):
        """Self-similar solution at ``xi = (x - x_step)/t``; returns ``(u, h, a)`` arrays."""
        xi = np.asarray(xi, dtype=float)
        g = self.g
        first = self.waves[0].left
        u = np.full(xi.shape, first.u, dtype=float)
        h = np.full(xi.shape, first.h, dtype=float)
        a = np.full(xi.shape, first.a, dtype=float)
        for w in self.waves:
            if w.family is WaveFamily.S0:
                past = xi >= 0.0
                u[past], h[past], a[past] = w.right.u, w.right.h, w.right.a
                continue
            if w.family.is_rarefaction and w.speed_hi > w.speed_lo:
                inside = (xi > w.speed_lo) & (xi < w.speed_hi)
                if w.family is WaveFamily.R1:
                    J = w.left.u + 2.0 * math.sqrt(g * w.left.h)
                    c = (J - xi[inside]) / 3.0
                    u[inside] = J - 2.0 * c
                else:
                    K = w.left.u - 2.0 * math.sqrt(g * w.left.h)
                    c = (xi[inside] - K) / 3.0
                    u[inside] = K + 2.0 * c
                h[inside] = c * c / g
                a[inside] = w.left.a
                past = xi >= w.speed_hi
            else:
                past = xi >= w.speed_hi
            u[past], h[past], a[past] = w.right.u, w.right.h, w.right.a
        return u, h, a

    def to_rows(self) -> list[dict]:
        return [dict(index=i, **w.to_row()) for i, w in enumerate(self.waves)]


# --------------------------------------------------------------------------
# wave builders

def w1_wave(UL: State, U1: State, g: float) -> Wave:
    if U1.h < UL.h:
        return Wave(WaveFamily.R1, UL, U1, eigenstructure(UL, g).lambda1, eigenstructure(U1, g).lambda1)
    s = curves.shock_speed(1, UL, U1, g)
    return Wave(WaveFamily.S1, UL, U1, s, s)


def w2_wave(U2: State, UR: State, g: float) -> Wave:
    if UR.h > U2.h:
        return Wave(WaveFamily.R2, U2, UR, eigenstructure(U2, g).lambda2, eigenstructure(UR, g).lambda2)
    s = curves.shock_speed(2, U2, UR, g)
    return Wave(WaveFamily.S2, U2, UR, s, s)


def s0_wave(U0: State, U1: State) -> Wave:
    return Wave(WaveFamily.S0, U0, U1, 0.0, 0.0)


def _bracket_decreasing(f, lo: float, hi: float, grow: float = 2.0, limit: int = 200):
    """Expand ``hi`` until ``f(hi) <= 0`` for a decreasing ``f``."""
    f_hi = f(hi)
    n = 0
    while f_hi > 0.0:
        lo, hi = hi, hi * grow
        f_hi = f(hi)
        n += 1
        if n > limit:
            raise ConstructionFailed("could not bracket the intersection")
    return lo, hi


def _root(f, lo: float, hi: float) -> float:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise ConstructionFailed(f"no sign change on [{lo}, {hi}]: f=({f_lo}, {f_hi})")
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=300)


def _on_w2_backward(U: State, UR: State, g: float) -> State:
    return State(curves.w2_backward_u(UR, U.h, g), U.h, UR.a)


# --------------------------------------------------------------------------
# flat bottom

def flat_riemann(UL: State, UR: State, g: float = G_DEFAULT) -> WaveFan:
    """Classical two-wave solution for equal bottom levels."""
    if UL.a != UR.a:
        raise ValueError("flat_riemann needs equal bottom levels")
    if UL.u + 2 * math.sqrt(g * UL.h) <= UR.u - 2 * math.sqrt(g * UR.h):
        raise UnsupportedConfiguration("data generates a dry region")

    def phi(h):
        return curves.wave_curve("W1", UL, h, g) - curves.w2_backward_u(UR, h, g)

    lo, hi = _bracket_decreasing(phi, 1e-14 * max(UL.h, UR.h), max(UL.h, UR.h))
    hs = _root(phi, lo, hi)
    Us = State(curves.wave_curve("W1", UL, hs, g), hs, UL.a)
    return WaveFan([w1_wave(UL, Us, g), w2_wave(Us, UR, g)], "flat", g)


# --------------------------------------------------------------------------
# step constructions

def _w1_positive_then_w2(Ustart: State, UR: State, g: float):
    """``W1`` from a supercritical ``Ustart`` with non-negative speed meeting the backward ``W2`` of ``UR``."""
    # every 1-rarefaction state below a supercritical start keeps lambda1 > 0
    h_lo = 1e-12 * Ustart.h
    if classify_domain(Ustart, g) is DomainLabel.D3:
        h_hi = curves.zero_speed_depth(Ustart, g)
    else:
        h_hi = Ustart.h

    def G(h):
        return curves.wave_curve("W1", Ustart, h, g) - curves.w2_backward_u(UR, h, g)

    g_lo, g_hi = G(h_lo), G(h_hi)
    slack = ENDPOINT_SLACK * max(1.0, abs(UR.u), abs(Ustart.u))
    if 0.0 < g_hi <= slack:
        # zero-speed shock lands on the 2-curve up to rounding
        return curves.w1_state(Ustart, h_hi, g)
    if g_lo < 0.0 or g_hi > 0.0:
        raise ConstructionFailed(
            f"W1 from {Ustart} with non-negative speed misses the 2-curve of {UR}: "
            f"gap at sonic end {g_lo:.3e}, at zero-speed end {g_hi:.3e}"
        )
    h2 = _root(G, h_lo, h_hi)
    return curves.w1_state(Ustart, h2, g)


def construct_super(UL: State, UR: State, g: float = G_DEFAULT) -> WaveFan:
    if not is_supercritical_right(UL, g):
        raise ConstructionFailed("supercritical construction needs UL in the closure of D3")
    ULs = curves.stationary_select(UL, UR.a, g, branch="super")
    U2 = _w1_positive_then_w2(ULs, UR, g)
    waves = [s0_wave(UL, ULs), w1_wave(ULs, U2, g), w2_wave(U2, UR, g)]
    return WaveFan(waves, "super", g)


def construct_resonant(UL: State, UR: State, g: float = G_DEFAULT) -> WaveFan:
    if not is_subcritical(UL, g) or UL.u < 0.0:
        raise ConstructionFailed("resonant construction needs UL in the closure of D2 with u >= 0")
    hc = min(curves.sonic_depth_on_r1(UL, g), UL.h)
    Uc = curves.rarefaction_state(1, UL, hc, g) if hc < UL.h else UL
    Ucs = curves.stationary_select(Uc, UR.a, g, branch="super")
    U3 = _w1_positive_then_w2(Ucs, UR, g)
    r1 = Wave(WaveFamily.R1, UL, Uc, eigenstructure(UL, g).lambda1, 0.0)
    waves = [r1, s0_wave(Uc, Ucs), w1_wave(Ucs, U3, g), w2_wave(U3, UR, g)]
    return WaveFan(waves, "resonant", g)


def sub_w1_range(UL: State, g: float = G_DEFAULT) -> float:
    """Smallest depth reachable by ``W1`` from ``UL`` with non-positive speed, ending subcritical."""
    dom = classify_domain(UL, g)
    if dom is DomainLabel.D3:
        return curves.zero_speed_depth(UL, g)
    return min(curves.sonic_depth_on_r1(UL, g), UL.h)


def sub_image(UL: State, h1: float, a1: float, g: float) -> tuple[State, State]:
    U1 = curves.w1_state(UL, h1, g)
    return U1, curves.stationary_select(U1, a1, g, branch="sub")


def construct_sub(UL: State, UR: State, g: float = G_DEFAULT) -> WaveFan:
    if UL.u < 0.0:
        raise UnsupportedConfiguration("step constructions assume u >= 0 on the left")
    h_lo = sub_w1_range(UL, g)

    def F(h1):
        _, U1s = sub_image(UL, h1, UR.a, g)
        return U1s.u - curves.w2_backward_u(UR, U1s.h, g)

    f_lo = F(h_lo)
    if -ENDPOINT_SLACK * max(1.0, abs(UR.u), abs(UL.u)) <= f_lo < 0.0:
        h1 = h_lo
    elif f_lo < 0.0:
        raise ConstructionFailed(f"subcritical construction: gap at the end of the W1 range is {f_lo:.3e} < 0")
    else:
        lo, hi = _bracket_decreasing(F, h_lo, max(2.0 * h_lo, UL.h, UR.h))
        h1 = _root(F, lo, hi)
    U1, U1s = sub_image(UL, h1, UR.a, g)
    waves = [w1_wave(UL, U1, g), s0_wave(U1, U1s), w2_wave(U1s, UR, g)]
    return WaveFan(waves, "sub", g)


_BUILDERS = {"sub": construct_sub, "super": construct_super, "resonant": construct_resonant}


def step_riemann(UL: State, UR: State, g: float = G_DEFAULT, construction: Optional[str] = None) -> WaveFan:
    """Solve the step Riemann problem, optionally forcing one construction.

    Without ``construction`` the flat solver is used for equal levels; a
    supercritical ``UL`` tries ``super`` then ``sub``; a subcritical one tries
    ``sub`` then ``resonant``.
    """
    if UL.a < UR.a:
        raise UnsupportedConfiguration("only descending steps (a0 >= a1) are handled")
    if UL.u < 0.0 or UR.u < 0.0:
        raise UnsupportedConfiguration("only first-quadrant data (u >= 0) are handled")
    if construction is not None:
        if construction == "flat":
            return flat_riemann(UL, UR, g)
        return _BUILDERS[construction](UL, UR, g)
    if UL.a == UR.a:
        return flat_riemann(UL, UR, g)
    order = ("super", "sub") if not is_subcritical(UL, g) else ("sub", "resonant")
    errors = []
    for name in order:
        try:
            return _BUILDERS[name](UL, UR, g)
        except ConstructionFailed as exc:
            errors.append(f"{name}: {exc}")
    raise NumericalFailure("no admissible step construction; " + "; ".join(errors))


# --------------------------------------------------------------------------
# admissibility

def check_fan(fan: WaveFan, UL: Optional[State] = None, UR: Optional[State] = None,
              tol: float = 1e-10) -> list[str]:
    """List of violated admissibility conditions (empty when the fan is valid)."""
    g = fan.g
    problems = []
    waves = fan.waves
    if UL is not None and _dist(waves[0].left, UL) > tol:
        problems.append(f"left endpoint mismatch {_dist(waves[0].left, UL):.3e}")
    if UR is not None and _dist(waves[-1].right, UR) > tol:
        problems.append(f"right endpoint mismatch {_dist(waves[-1].right, UR):.3e}")
    for i in range(len(waves) - 1):
        if _dist(waves[i].right, waves[i + 1].left) > tol:
            problems.append(f"waves {i} and {i + 1} do not share a state")
        if waves[i].speed_hi > waves[i + 1].speed_lo + 1e-9:
            problems.append(f"speeds not ordered between waves {i} and {i + 1}")
    for i, w in enumerate(waves):
        if w.family is WaveFamily.S0:
            if curves.stationary_residual(w.left, w.right, g) > 1e-12:
                problems.append(f"wave {i}: stationary invariants not conserved")
            if w.left.a != w.right.a and not _same_closure(w.left, w.right, g):
                problems.append(f"wave {i}: stationary jump crosses the sonic curve")
        else:
            if w.left.a != w.right.a:
                problems.append(f"wave {i}: bottom changes across a moving wave")
            if w.family.is_shock and w.strength > 1e-12:
                if not curves.lax_admissible(w.family.index, w.left, w.right, g, tol=1e-10):
                    problems.append(f"wave {i}: Lax conditions violated")
                if curves.hugoniot_residual(w.left, w.right, g) > 1e-10:
                    problems.append(f"wave {i}: Hugoniot residual too large")
            if w.family.is_rarefaction:
                k = w.family.index
                inv_l = riemann_invariants(k, w.left, g)[1]
                inv_r = riemann_invariants(k, w.right, g)[1]
                if abs(inv_l - inv_r) > 1e-10 * max(1.0, abs(inv_l)):
                    problems.append(f"wave {i}: rarefaction invariant not constant")
                if w.speed_lo > w.speed_hi + 1e-12:
                    problems.append(f"wave {i}: rarefaction fan folds")
    return problems


def _dist(A: State, B: State) -> float:
    return max(abs(A.u - B.u), abs(A.h - B.h), abs(A.a - B.a))


def _same_closure(A: State, B: State, g: float) -> bool:
    sa = A.u - celerity(A.h, g)
    sb = B.u - celerity(B.h, g)
    tol = 1e-9 * max(1.0, abs(A.u), abs(B.u))
    return sa * sb >= 0.0 or abs(sa) <= tol or abs(sb) <= tol


def states_close(A: Sequence[State], B: Sequence[State], tol: float) -> bool:
    return len(A) == len(B) and all(_dist(x, y) <= tol for x, y in zip(A, B))


def fan_from_rows(rows: Iterable[dict], g: float) -> WaveFan:
    waves = []
    for r in rows:
        waves.append(Wave(WaveFamily(r["family"]), State(r["uL"], r["hL"], r["aL"]),
                          State(r["uR"], r["hR"], r["aR"]), r["speed_lo"], r["speed_hi"]))
    return WaveFan(waves, g=g)
