"""A forward shock overtaking a descending bottom step.

Initially ``U_minus`` and ``U_mid`` are joined by a 2-shock at ``x1`` and
``U_mid``, ``U_plus`` by the stationary jump at ``x2``. Once the shock
reaches the step the solution is the step Riemann problem between
``U_minus`` and ``U_plus``. The subcase is read off the side of a test
state relative to the backward 2-curve through ``U_plus``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from . import curves
from .riemann import ConstructionFailed, WaveFan, flat_riemann, step_riemann
from .states import (
    G_DEFAULT,
    DomainError,
    State,
    UnsupportedConfiguration,
    check_gravity,
    is_subcritical,
    is_supercritical_right,
)

CURVE_TOL = 1e-10


class SsCaseLabel(enum.Enum):
    Case1_1 = "Case1_1"
    Case1_2 = "Case1_2"
    Case2_1 = "Case2_1"
    Case2_2 = "Case2_2"
    Case2_3 = "Case2_3"
    Case3_1 = "Case3_1"
    Case3_2 = "Case3_2"


SS_CONSTRUCTION = {
    SsCaseLabel.Case1_1: "super",
    SsCaseLabel.Case1_2: "super",
    SsCaseLabel.Case2_1: "sub",
    SsCaseLabel.Case2_2: "sub",
    SsCaseLabel.Case2_3: "resonant",
    SsCaseLabel.Case3_1: "sub",
    SsCaseLabel.Case3_2: "super",
}


class NoOvertake(DomainError):
    """The incident shock never reaches the step."""


@dataclass(frozen=True)
class ScenarioSS:
    """Shock/step interaction data.

    Attributes:
        U_minus: state behind the incident 2-shock (left), level ``a0``.
        U_mid: state ahead of the shock, level ``a0``.
        U_plus: state right of the step, level ``a1``.
        x1: initial shock position.
        x2: step position.
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
        Ul, Um, Up = self.U_minus, self.U_mid, self.U_plus
        if Ul.a != Um.a:
            raise DomainError("U_minus and U_mid must share the upper bottom level")
        if Up.a > Um.a:
            raise UnsupportedConfiguration(f"need a0 >= a1, got a0={Um.a}, a1={Up.a}")
        if not self.x2 >= self.x1:
            raise DomainError("the step must lie to the right of the shock")
        for U in (Ul, Um, Up):
            if U.u < 0.0:
                raise UnsupportedConfiguration("interaction analysis assumes u >= 0 throughout")
        if not Um.h < Ul.h:
            raise DomainError("a 2-shock needs h_mid < h_minus")
        res = abs(curves.shock_u(2, Ul, Um.h, g) - Um.u)
        if res > CURVE_TOL * max(1.0, abs(Um.u)):
            raise DomainError(f"U_mid is off the 2-shock curve of U_minus (residual {res:.3e})")
        if not curves.lax_admissible(2, Ul, Um, g):
            raise DomainError("incident 2-shock violates the Lax conditions")
        if not curves.shock_speed(2, Ul, Um, g) > 0.0:
            raise NoOvertake("the incident shock does not move towards the step")
        img = curves.stationary_select(Um, Up.a, g)
        if max(abs(img.u - Up.u), abs(img.h - Up.h)) > CURVE_TOL * max(1.0, Up.h, abs(Up.u)):
            raise DomainError("U_plus is not the entropy-selected stationary image of U_mid")

    @classmethod
    def build(cls, U_minus: State, h_mid: float, a1: float, x1: float = 0.0, x2: float = 1.0,
              g: float = G_DEFAULT) -> "ScenarioSS":
        """Scenario from ``U_minus``, the depth ahead of the shock and the lower level."""
        U_mid = curves.shock_state(2, U_minus, h_mid, g)
        U_plus = curves.stationary_select(U_mid, a1, g)
        return cls(U_minus, U_mid, U_plus, x1, x2, g)

    @property
    def a0(self) -> float:
        return self.U_mid.a

    @property
    def a1(self) -> float:
        return self.U_plus.a

    @property
    def sigma2(self) -> float:
        return curves.shock_speed(2, self.U_minus, self.U_mid, self.g)


def overtake_time(scn: ScenarioSS) -> tuple[float, float]:
    """``(t, x)`` where the incident shock meets the step."""
    s = scn.sigma2
    if not s > 0.0:
        raise NoOvertake(f"shock speed {s} is not positive")
    return (scn.x2 - scn.x1) / s, scn.x2


def side_of_s2_curve(U: State, scn: ScenarioSS) -> float:
    """``u - u_W2(h)``: positive right of (below) the backward 2-curve of ``U_plus``, negative left of (above) it."""
    return U.u - curves.w2_backward_u(scn.U_plus, U.h, scn.g)


@dataclass(frozen=True)
class SsClassificationStates:
    """States used by the classification; ``None`` when not defined for the case."""

    U_minus_star: Optional[State] = None
    Uc: Optional[State] = None
    Uc_upper_star: Optional[State] = None
    U_tilde_minus: Optional[State] = None
    U_tilde_minus_upper_star: Optional[State] = None
    U_tilde_minus_star: Optional[State] = None


def classification_states(scn: ScenarioSS) -> SsClassificationStates:
    g, a1 = scn.g, scn.a1
    Ul = scn.U_minus
    if is_subcritical(Ul, g):
        Ums = curves.stationary_select(Ul, a1, g, branch="sub")
        hc = min(curves.sonic_depth_on_r1(Ul, g), Ul.h)
        Uc = curves.rarefaction_state(1, Ul, hc, g) if hc < Ul.h else Ul
        Ucs = curves.stationary_select(Uc, a1, g, branch="sub")
        return SsClassificationStates(Ums, Uc, Ucs)
    Ums = curves.stationary_select(Ul, a1, g, branch="super")
    Ut = curves.zero_speed_state(1, Ul, g)
    Uts = Utms = None
    if Ut is not None:
        Uts = curves.stationary_select(Ut, a1, g, branch="sub")
    Zt = curves.zero_speed_state(1, Ums, g)
    if Zt is not None:
        Utms = Zt
    return SsClassificationStates(Ums, None, None, Ut, Uts, Utms)


def classify_ss_case(scn: ScenarioSS) -> SsCaseLabel:
    g = scn.g
    Ul, Um = scn.U_minus, scn.U_mid
    mid_super = is_supercritical_right(Um, g) and not is_subcritical(Um, g)
    minus_sub = is_subcritical(Ul, g)
    ts = classification_states(scn)
    if mid_super:
        if minus_sub:
            raise UnsupportedConfiguration("supercritical U_mid behind a subcritical U_minus is not covered")
        if side_of_s2_curve(ts.U_minus_star, scn) < 0.0:
            return SsCaseLabel.Case1_1
        return SsCaseLabel.Case1_2
    if minus_sub:
        if side_of_s2_curve(ts.U_minus_star, scn) >= 0.0:
            return SsCaseLabel.Case2_1
        if side_of_s2_curve(ts.Uc_upper_star, scn) >= 0.0:
            return SsCaseLabel.Case2_2
        return SsCaseLabel.Case2_3
    if ts.U_tilde_minus_upper_star is not None and side_of_s2_curve(ts.U_tilde_minus_upper_star, scn) >= 0.0:
        return SsCaseLabel.Case3_1
    return SsCaseLabel.Case3_2


def ss_large_time(scn: ScenarioSS, case: Optional[SsCaseLabel] = None) -> WaveFan:
    """Large-time fan after the overtake.

    Raises:
        ConstructionFailed: no admissible intermediate states for the case.
    """
    case = case or classify_ss_case(scn)
    if scn.a0 == scn.a1:
        fan = flat_riemann(scn.U_minus, scn.U_plus, scn.g)
    else:
        name = SS_CONSTRUCTION[case]
        try:
            fan = step_riemann(scn.U_minus, scn.U_plus, scn.g, name)
        except ConstructionFailed as exc:
            raise ConstructionFailed(f"{case.value} ({name} construction): {exc}") from exc
    fan.tags["case"] = case.value
    return fan


def timing_diagram(scn: ScenarioSS, fan: WaveFan, t_after: float = 1.0) -> list[dict]:
    """x-t polylines of every wave before and after the overtake.

    Each entry has ``wave`` (a label), ``family`` and ``points`` (a list of
    ``(t, x)`` pairs). Rarefactions contribute their head and tail rays.
    """
    t_hit, x_hit = overtake_time(scn)
    t_end = t_hit + t_after
    out = [
        {"wave": "incident", "family": "S2", "points": [(0.0, scn.x1), (t_hit, x_hit)]},
        {"wave": "step_before", "family": "S0", "points": [(0.0, scn.x2), (t_hit, scn.x2)]},
    ]
    for i, w in enumerate(fan.waves):
        speeds = [w.speed_lo] if w.speed_lo == w.speed_hi else [w.speed_lo, w.speed_hi]
        for j, s in enumerate(speeds):
            label = f"out{i}" if len(speeds) == 1 else f"out{i}_{'lo' if j == 0 else 'hi'}"
            out.append({"wave": label, "family": w.family.value,
                        "points": [(t_hit, x_hit), (t_end, x_hit + s * t_after)]})
    return out
