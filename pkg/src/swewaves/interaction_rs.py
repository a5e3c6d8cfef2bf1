"""A forward rarefaction reaching a descending bottom step.

Initially ``U_minus`` (left) and ``U_mid`` are joined by a 2-rarefaction
centred at ``x1`` on the upper level ``a0``; ``U_mid`` and ``U_plus`` are
joined by the stationary jump at the step ``x2`` down to level ``a1``. The
rarefaction reaches the step, and the large-time solution is the step
Riemann problem between ``U_minus`` and ``U_plus``.

While the fan crosses the step, every state ``U0`` on the incoming
rarefaction is mapped to its stationary image ``U1`` at level ``a1``. The
locus of these images (the image curve) is compared with the 2-rarefaction
curve through ``U_plus`` by the gap functions ``gap_f`` and ``gap_q``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import curves
from .riemann import ConstructionFailed, WaveFan, flat_riemann, step_riemann
from .states import (
    G_DEFAULT,
    DomainError,
    QuadrantLabel,
    State,
    UnsupportedConfiguration,
    check_gravity,
    classify_quadrant,
    is_subcritical,
)

CURVE_TOL = 1e-10
SLOPE_SINGULAR_TOL = 1e-12
COINCIDE_TOL = 1e-9


class RsCaseLabel(enum.Enum):
    Case1 = "Case1"
    Case2_1 = "Case2_1"
    Case2_2 = "Case2_2"
    Case3_1 = "Case3_1"
    Case3_2 = "Case3_2"
    Case3_3 = "Case3_3"
    Case3_4 = "Case3_4"
    Case4 = "Case4"


# construction used for the large-time fan of each case
RS_CONSTRUCTION = {
    RsCaseLabel.Case1: "super",
    RsCaseLabel.Case2_1: "super",
    RsCaseLabel.Case3_1: "super",
    RsCaseLabel.Case2_2: "resonant",
    RsCaseLabel.Case3_2: "resonant",
    RsCaseLabel.Case3_3: "sub",
    RsCaseLabel.Case3_4: "sub",
    RsCaseLabel.Case4: "sub",
}


def _region(U: State, g: float) -> str:
    """Quadrant region with the boundary curves folded into II."""
    lab = classify_quadrant(U, g)
    if lab in (QuadrantLabel.GammaPlus, QuadrantLabel.Gamma1):
        return "II"
    return lab.value


@dataclass(frozen=True)
class ScenarioRS:
    """Rarefaction/step interaction data.

    Attributes:
        U_minus: state left of the rarefaction, on level ``a0``.
        U_mid: state between rarefaction and step, on level ``a0``.
        U_plus: state right of the step, on level ``a1``.
        x1: centre of the rarefaction.
        x2: step position, ``x2 >= x1``.
        g: gravity.
    """

    U_minus: State
    U_mid: State
    U_plus: State
    x1: float = 0.0
    x2: float = 1.0
    g: float = G_DEFAULT

    def __post_init__(self):
        g = check_gravity(self.g)
        Um, Ul, Up = self.U_mid, self.U_minus, self.U_plus
        if Ul.a != Um.a:
            raise DomainError("U_minus and U_mid must share the upper bottom level")
        if Up.a > Um.a:
            raise UnsupportedConfiguration(f"need a0 >= a1, got a0={Um.a}, a1={Up.a}")
        if not self.x2 >= self.x1:
            raise DomainError("the step must lie to the right of the rarefaction centre")
        if Ul.h > Um.h * (1.0 + 1e-14):
            raise DomainError("a forward rarefaction needs h_minus <= h_mid")
        res = abs(curves.rarefaction_u(2, Um, Ul.h, g) - Ul.u)
        if res > CURVE_TOL * max(1.0, abs(Ul.u)):
            raise DomainError(f"U_minus is off the 2-rarefaction of U_mid (residual {res:.3e})")
        for U in (Ul, Um, Up):
            if U.u < 0.0:
                raise UnsupportedConfiguration("interaction analysis assumes u >= 0 throughout")
        # a stationary image must exist for every state of the incoming fan
        if Um.a != Up.a:
            hs = np.linspace(Ul.h, Um.h, 65)
            worst = min(curves.a_max(curves.rarefaction_state(2, Um, float(h), g), g) for h in hs)
            if not Up.a < worst:
                raise DomainError(f"a1={Up.a} is not below a_max={worst} along the incoming fan")
        img = curves.stationary_select(Um, Up.a, g)
        if max(abs(img.u - Up.u), abs(img.h - Up.h)) > CURVE_TOL * max(1.0, Up.h, abs(Up.u)):
            raise DomainError("U_plus is not the entropy-selected stationary image of U_mid")

    @classmethod
    def build(cls, U_mid: State, h_minus: float, a1: float, x1: float = 0.0, x2: float = 1.0,
              g: float = G_DEFAULT) -> "ScenarioRS":
        """Scenario from ``U_mid``, the depth ``h_minus`` and the lower level ``a1``."""
        U_minus = curves.rarefaction_state(2, U_mid, h_minus, g)
        U_plus = curves.stationary_select(U_mid, a1, g)
        return cls(U_minus, U_mid, U_plus, x1, x2, g)

    @property
    def a0(self) -> float:
        return self.U_mid.a

    @property
    def a1(self) -> float:
        return self.U_plus.a

    def incoming(self, h0: float) -> State:
        """State at depth ``h0`` on the 2-rarefaction curve through ``U_mid``."""
        return curves.rarefaction_state(2, self.U_mid, h0, self.g)

    def regions(self) -> tuple[str, str, str]:
        """Quadrant regions of ``(U_minus, U_mid, U_plus)``."""
        g = self.g
        return _region(self.U_minus, g), _region(self.U_mid, g), _region(self.U_plus, g)


# --------------------------------------------------------------------------
# image curve

def s0_image_point(U0: State, a1: float, g: float = G_DEFAULT) -> State:
    """Entropy-selected stationary image of ``U0`` at level ``a1``."""
    return curves.stationary_select(U0, a1, g)


def image_curve_slope(U1: State, U0: State, g: float = G_DEFAULT) -> tuple[float, float]:
    """``(du1/dh1, dh1/du1)`` of the image curve at ``U1``, the image of ``U0``.

    Raises:
        DomainError: at the sonic singularity ``u1 sqrt(h0) = sqrt(g) h1``.
    """
    g = check_gravity(g)
    sg, sh0 = math.sqrt(g), math.sqrt(U0.h)
    num = sg * U1.u - g * sh0
    den = sh0 * U1.u - sg * U1.h
    scale = max(abs(sh0 * U1.u), abs(sg * U1.h), 1e-300)
    if abs(den) <= SLOPE_SINGULAR_TOL * scale:
        raise DomainError("image curve slope is singular (sonic denominator)")
    if abs(num) <= SLOPE_SINGULAR_TOL * max(abs(sg * U1.u), abs(g * sh0), 1e-300):
        return 0.0, math.inf
    return num / den, den / num


def _sonic_depth_incoming(scn: ScenarioRS) -> Optional[float]:
    """Depth where the incoming 2-rarefaction crosses ``u = c``, if it does below ``U_mid``."""
    g = scn.g
    K = scn.U_mid.u - 2.0 * math.sqrt(g * scn.U_mid.h)
    if K >= 0.0:
        return None
    hc = K * K / g
    return hc if hc <= scn.U_mid.h else None


def _zero_u_depth_incoming(scn: ScenarioRS) -> Optional[float]:
    """Depth where the incoming 2-rarefaction reaches ``u = 0``."""
    g = scn.g
    K = scn.U_mid.u - 2.0 * math.sqrt(g * scn.U_mid.h)
    if K >= 0.0:
        return None
    return K * K / (4.0 * g)


def _image(scn: ScenarioRS, h0: float, branch: str) -> State:
    U0 = scn.incoming(h0)
    return curves.stationary_select(U0, scn.a1, scn.g, branch=branch)


def _invert_image(scn: ScenarioRS, target: float, coord: str, branch: str, lo: float, hi: float) -> State:
    """Image state whose ``coord`` equals ``target``, preimage depth in ``[lo, hi]``."""

    def F(h0):
        U1 = _image(scn, h0, branch)
        return getattr(U1, coord) - target

    f_lo, f_hi = F(lo), F(hi)
    if f_lo == 0.0:
        return _image(scn, lo, branch)
    if f_hi == 0.0:
        return _image(scn, hi, branch)
    if f_lo * f_hi > 0.0:
        raise DomainError(f"{coord}={target} lies outside the sampled image curve")
    h0 = brentq(F, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=300)
    return _image(scn, h0, branch)


def _r2_plus_u(scn: ScenarioRS, h: float) -> float:
    """Velocity on the 2-rarefaction integral curve through ``U_plus``."""
    Up = scn.U_plus
    return Up.u - 2.0 * math.sqrt(scn.g) * (math.sqrt(Up.h) - math.sqrt(h))


def _r2_plus_h(scn: ScenarioRS, u: float) -> float:
    """Depth on the 2-rarefaction integral curve through ``U_plus`` at velocity ``u``."""
    Up = scn.U_plus
    s = math.sqrt(Up.h) + (u - Up.u) / (2.0 * math.sqrt(scn.g))
    if s < 0.0:
        # the curve has left the state space; treat it as lying on h = 0
        return 0.0
    return s * s


def supercritical_image_range(scn: ScenarioRS) -> tuple[float, float]:
    """``(h1_min, h_plus)``: depths covered by supercritical images."""
    hc = _sonic_depth_incoming(scn)
    if is_subcritical(scn.U_mid, scn.g) and hc is None:
        raise DomainError("the image curve has no supercritical part")
    if hc is None:
        return 0.0, scn.U_plus.h
    Ucs = curves.stationary_select(scn.incoming(hc), scn.a1, scn.g, branch="super")
    return Ucs.h, scn.U_plus.h


def subcritical_image_range(scn: ScenarioRS) -> tuple[float, float]:
    """``(0, u1_max)``: velocities covered by subcritical images."""
    hbar = _zero_u_depth_incoming(scn)
    if hbar is None:
        raise DomainError("the image curve has no subcritical part")
    if is_subcritical(scn.U_mid, scn.g):
        return 0.0, scn.U_plus.u
    hc = _sonic_depth_incoming(scn)
    Ucs = curves.stationary_select(scn.incoming(hc), scn.a1, scn.g, branch="sub")
    return 0.0, Ucs.u


def gap_f(h1: float, scn: ScenarioRS) -> float:
    """``u1(h1) - u(h1)`` on the supercritical part of the image curve.

    ``u1`` is read off the image curve and ``u`` off the 2-rarefaction curve
    through ``U_plus``. Vanishes at ``h1 = h_plus``.
    """
    g = scn.g
    h_lo, h_hi = supercritical_image_range(scn)
    if not (h_lo * (1 - 1e-14) <= h1 <= h_hi * (1 + 1e-14)):
        raise DomainError(f"h1={h1} outside [{h_lo}, {h_hi}]")
    if h1 >= h_hi:
        return 0.0
    if h1 == 0.0:
        pts = special_points(scn)
        return pts.u_tilde - pts.u_bar_p
    hc = _sonic_depth_incoming(scn)
    lo = hc if hc is not None else 1e-14 * scn.U_mid.h
    U1 = _invert_image(scn, h1, "h", "super", lo, scn.U_mid.h)
    return U1.u - _r2_plus_u(scn, h1)


def gap_q(u1: float, scn: ScenarioRS) -> float:
    """``h1(u1) - h(u1)`` on the subcritical part of the image curve.

    ``h1`` is read off the image curve and ``h`` off the 2-rarefaction curve
    through ``U_plus``. Vanishes at ``u1 = u_plus`` when ``U_plus`` is subcritical.
    """
    u_lo, u_hi = subcritical_image_range(scn)
    if not (u_lo <= u1 <= u_hi * (1 + 1e-14)):
        raise DomainError(f"u1={u1} outside [{u_lo}, {u_hi}]")
    if is_subcritical(scn.U_mid, scn.g) and u1 >= scn.U_plus.u:
        return 0.0
    hbar = _zero_u_depth_incoming(scn)
    hc = _sonic_depth_incoming(scn)
    hi = hc if hc is not None else scn.U_mid.h
    # u1 = 0 is the image of the zero-velocity depth itself, up to round-off
    U1 = _image(scn, hbar, "sub") if u1 == 0.0 else _invert_image(scn, u1, "u", "sub", hbar, hi)
    return U1.h - _r2_plus_h(scn, u1)


# --------------------------------------------------------------------------
# special points

@dataclass(frozen=True)
class RsSpecialPoints:
    """Named points of the interaction geometry; ``None`` when absent.

    ``Uc_star``/``Uc_upper_star`` are the supercritical and subcritical
    images of the sonic point ``Uc``. ``U2`` is the sonic state whose
    supercritical image ``U2_star`` sends a zero-speed 1-shock onto the
    2-curve through ``U_plus``; ``Up`` is where the 1-rarefaction through
    ``U2`` meets the incoming curve.
    """

    Uc: Optional[State] = None
    Uc_star: Optional[State] = None
    Uc_upper_star: Optional[State] = None
    u_tilde: Optional[float] = None
    h_tilde: Optional[float] = None
    u_bar_m: Optional[float] = None
    u_bar_p: Optional[float] = None
    h_bar_m: Optional[float] = None
    h_bar_p: Optional[float] = None
    Up: Optional[State] = None
    U2: Optional[State] = None
    U2_star: Optional[State] = None


def _bar_h(U: State, g: float) -> Optional[float]:
    """Depth where the 2-rarefaction through ``U`` reaches ``u = 0``."""
    K = U.u - 2.0 * math.sqrt(g * U.h)
    return K * K / (4.0 * g) if K < 0.0 else None


def _bar_u(U: State, g: float) -> Optional[float]:
    """Velocity where the 2-rarefaction through ``U`` reaches ``h = 0``."""
    K = U.u - 2.0 * math.sqrt(g * U.h)
    return K if K >= 0.0 else None


def resonance_gap(scn: ScenarioRS, h2: float) -> float:
    """Zero-speed 1-shock state from the image of the sonic state ``(sqrt(g h2), h2)``
    minus the 2-curve of ``U_plus`` (velocity difference at equal depth)."""
    g = scn.g
    U2 = State(math.sqrt(g * h2), h2, scn.a0)
    U2s = curves.stationary_select(U2, scn.a1, g, branch="super")
    if U2s.u <= math.sqrt(g * U2s.h):
        raise DomainError("image of the sonic state is not supercritical")
    Ut = curves.zero_speed_state(1, U2s, g)
    return Ut.u - curves.w2_backward_u(scn.U_plus, Ut.h, g)


def _find_up(scn: ScenarioRS, hc: float):
    g = scn.g
    K = scn.U_mid.u - 2.0 * math.sqrt(g * scn.U_mid.h)
    lo, hi = hc / 9.0, hc
    # keep away from the end where the preimage sits on u = 0
    lo *= 1.0 + 1e-12
    try:
        f_lo, f_hi = resonance_gap(scn, lo), resonance_gap(scn, hi)
    except DomainError:
        return None, None, None
    if f_lo * f_hi > 0.0:
        return None, None, None
    h2 = brentq(lambda h: resonance_gap(scn, h), lo, hi, xtol=1e-15 * hi,
                rtol=4 * np.finfo(float).eps, maxiter=300)
    U2 = State(math.sqrt(g * h2), h2, scn.a0)
    U2s = curves.stationary_select(U2, scn.a1, g, branch="super")
    cp = (3.0 * math.sqrt(g * h2) - K) / 4.0
    Up = State(K + 2.0 * cp, cp * cp / g, scn.a0)
    return Up, U2, U2s


def special_points(scn: ScenarioRS) -> RsSpecialPoints:
    g = scn.g
    Um, Upl = scn.U_mid, scn.U_plus
    u_bar_m, u_bar_p = _bar_u(Um, g), _bar_u(Upl, g)
    h_bar_m, h_bar_p = _bar_h(Um, g), _bar_h(Upl, g)
    u_tilde = h_tilde = None
    if u_bar_m is not None:
        u_tilde = math.sqrt(u_bar_m ** 2 + 2.0 * g * (scn.a0 - scn.a1))
    if h_bar_m is not None:
        h_tilde = h_bar_m + scn.a0 - scn.a1
    Uc = Uc_star = Uc_upper_star = Up = U2 = U2s = None
    hc = _sonic_depth_incoming(scn)
    if hc is not None:
        K = Um.u - 2.0 * math.sqrt(g * Um.h)
        Uc = State(-K, hc, scn.a0)
        if scn.a1 != scn.a0:
            roots = curves.stationary_roots(Uc, scn.a1, g)
            Uc_star, Uc_upper_star = roots.supercritical, roots.subcritical
            Up, U2, U2s = _find_up(scn, hc)
        else:
            Uc_star = Uc_upper_star = Uc
    return RsSpecialPoints(Uc, Uc_star, Uc_upper_star, u_tilde, h_tilde, u_bar_m, u_bar_p,
                           h_bar_m, h_bar_p, Up, U2, U2s)


# --------------------------------------------------------------------------
# classification and large-time fan

def _sub_label(scn: ScenarioRS, pts: RsSpecialPoints) -> RsCaseLabel:
    """Case3_4 when the zero-speed shock state on the 2-curve of ``U_plus``
    coincides with the subcritical image behind the step, Case3_3 otherwise."""
    if pts.U2_star is None:
        return RsCaseLabel.Case3_3
    try:
        fan = step_riemann(scn.U_minus, scn.U_plus, scn.g, "sub")
    except ConstructionFailed:
        return RsCaseLabel.Case3_3
    U6 = curves.zero_speed_state(1, pts.U2_star, scn.g)
    U5s = fan.waves[1].right
    scale = max(1.0, scn.U_plus.h, abs(scn.U_plus.u))
    if max(abs(U6.u - U5s.u), abs(U6.h - U5s.h)) < COINCIDE_TOL * scale:
        return RsCaseLabel.Case3_4
    return RsCaseLabel.Case3_3


def classify_rs_case(scn: ScenarioRS) -> RsCaseLabel:
    g = scn.g
    r_minus, r_mid, r_plus = scn.regions()
    if (r_mid, r_plus) == ("I", "I"):
        return RsCaseLabel.Case1
    if (r_mid, r_plus) == ("III", "III"):
        return RsCaseLabel.Case4
    if (r_mid, r_plus) == ("II", "I"):
        if is_subcritical(scn.U_minus, g):
            return RsCaseLabel.Case2_2
        return RsCaseLabel.Case2_1
    if (r_mid, r_plus) == ("II", "II"):
        if not is_subcritical(scn.U_minus, g):
            return RsCaseLabel.Case3_1
        if scn.a0 == scn.a1:
            return RsCaseLabel.Case3_2
        pts = special_points(scn)
        if pts.Up is not None:
            # U_minus = Up still takes the resonant fan, with a zero-speed 1-shock
            if scn.U_minus.h >= pts.Up.h * (1.0 - 1e-12):
                return RsCaseLabel.Case3_2
            return _sub_label(scn, pts)
        try:
            step_riemann(scn.U_minus, scn.U_plus, g, "resonant")
            return RsCaseLabel.Case3_2
        except ConstructionFailed:
            return _sub_label(scn, pts)
    raise UnsupportedConfiguration(f"region pattern U_mid in {r_mid}, U_plus in {r_plus} is not covered")


def rs_large_time(scn: ScenarioRS, case: Optional[RsCaseLabel] = None) -> WaveFan:
    """Large-time wave fan joining ``U_minus`` to ``U_plus`` across the step.

    Raises:
        ConstructionFailed: the construction for the case has no admissible
            intermediate states; the message carries the bracket data.
    """
    case = case or classify_rs_case(scn)
    if scn.a0 == scn.a1:
        fan = flat_riemann(scn.U_minus, scn.U_plus, scn.g)
    else:
        name = RS_CONSTRUCTION[case]
        try:
            fan = step_riemann(scn.U_minus, scn.U_plus, scn.g, name)
        except ConstructionFailed as exc:
            raise ConstructionFailed(f"{case.value} ({name} construction): {exc}") from exc
    fan.tags["case"] = case.value
    return fan
