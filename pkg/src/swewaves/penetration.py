"""Shocks travelling through rarefaction fans (free-boundary problems).

Two settings are covered.

* A shock entering a centred rarefaction fan with a fixed state behind it
  (``BackwardS1inR1``: a 1-shock moving left into a 1-fan; ``ForwardS2inR2``:
  a 2-shock moving right into a 2-fan). Eliminating the characteristic
  relation gives the scalar ODE ``dh/dt = -2/(3 (t - t_c)) (h - sqrt((h + h5) h5 / 2))``
  for the fan depth seen by the shock, which integrates in closed form up to
  a quadrature. The shock crosses the fan iff the depth ``h5`` behind it
  exceeds the depth at the far edge of the fan.
* The 1-shock born from the compressive 1-characteristics that a forward
  rarefaction emits while crossing a supercritical step
  (``S1inTransmittedR2``). The characteristic field right of the step is
  built on a mesh, the envelope gives the birth point, and the shock path is
  integrated with its right state on the transmitted 2-rarefaction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from . import curves
from .states import (
    G_DEFAULT,
    DomainError,
    NumericalFailure,
    State,
    UnsupportedConfiguration,
    check_gravity,
    eigenstructure,
    is_subcritical,
)

INVARIANT_TOL = 1e-12
TIE_TOL = 1e-11
ODE_RTOL = 1e-8
ODE_ATOL = 1e-10


class Side(enum.Enum):
    BackwardS1inR1 = "BackwardS1inR1"
    ForwardS2inR2 = "ForwardS2inR2"
    S1inTransmittedR2 = "S1inTransmittedR2"


@dataclass(frozen=True)
class CrossedAt:
    t5: float


@dataclass(frozen=True)
class Asymptote:
    slope: float


Verdict = Union[CrossedAt, Asymptote]


@dataclass
class OdeTrajectory:
    """Shock path samples ``(t, x, h, u)``; ``h, u`` is the fan-side state."""

    samples: np.ndarray
    verdict: Verdict
    info: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.samples[:, 1]


@dataclass(frozen=True)
class FreeBoundarySetup:
    """A shock entering a centred rarefaction fan.

    Attributes:
        side: which shock/fan pair.
        anchor: ``(x_start, t_start)`` where the shock meets the fan edge.
        center: ``(x_c, t_c)`` centre of the fan.
        behind_state: constant state on the far side of the shock (depth ``h5``).
        fan_head: fan state met first, at the anchor.
        fan_tail: state at the far edge of the fan.
        g: gravity.
    """

    side: Side
    anchor: tuple[float, float]
    center: tuple[float, float]
    behind_state: State
    fan_head: State
    fan_tail: State
    g: float = G_DEFAULT

    def __post_init__(self):
        g = check_gravity(self.g)
        if self.side is Side.S1inTransmittedR2:
            raise UnsupportedConfiguration("use solve_transmitted_shock for the transmitted case")
        if not self.anchor[1] > self.center[1]:
            raise DomainError("the anchor must lie after the fan centre")
        if not self.anchor[1] > 0.0 and self.anchor[1] != 0.0:
            raise DomainError("anchor time must be non-negative")
        inv_head, inv_tail = self.invariant_of(self.fan_head), self.invariant_of(self.fan_tail)
        if abs(inv_head - inv_tail) > INVARIANT_TOL * max(1.0, abs(inv_head)):
            raise DomainError(f"fan edges are not on one rarefaction curve ({inv_head} vs {inv_tail})")
        xi = (self.anchor[0] - self.center[0]) / (self.anchor[1] - self.center[1])
        lam = self.char_speed(self.fan_head)
        if abs(xi - lam) > 1e-9 * max(1.0, abs(lam)):
            raise DomainError("the anchor is not on the fan characteristic of fan_head")
        del g

    @property
    def sign(self) -> float:
        """-1 for 1-characteristics (``u - c``), +1 for 2-characteristics."""
        return -1.0 if self.side is Side.BackwardS1inR1 else 1.0

    @property
    def h5(self) -> float:
        return self.behind_state.h

    @property
    def h_start(self) -> float:
        return self.fan_head.h

    @property
    def h_end(self) -> float:
        return self.fan_tail.h

    def invariant_of(self, U: State) -> float:
        """Invariant constant across the fan: ``u + 2c`` for 1-fans, ``u - 2c`` for 2-fans."""
        return U.u - self.sign * 2.0 * math.sqrt(self.g * U.h)

    @property
    def invariant(self) -> float:
        return self.invariant_of(self.fan_head)

    def char_speed(self, U: State) -> float:
        return U.u + self.sign * math.sqrt(self.g * U.h)

    def fan_state(self, h: float) -> State:
        return State(self.invariant + self.sign * 2.0 * math.sqrt(self.g * h), h, self.fan_head.a)

    def fan_state_at(self, x: float, t: float) -> State:
        """Fan state on the characteristic through ``(x, t)``."""
        xi = (x - self.center[0]) / (t - self.center[1])
        c = self.sign * (xi - self.invariant) / 3.0
        if c <= 0.0:
            raise DomainError("characteristic speed outside the fan")
        return State(self.invariant + self.sign * 2.0 * c, c * c / self.g, self.fan_head.a)

    def shock_speed(self, U: State) -> float:
        """Speed of the shock between fan state ``U`` and ``behind_state``."""
        h5 = self.h5
        return U.u + self.sign * math.sqrt(0.5 * self.g * (U.h + h5) * h5 / U.h)

    def crosses(self) -> bool:
        """True when the shock runs through the whole fan in finite time."""
        h5, h_end = self.h5, self.h_end
        if abs(h5 - h_end) <= TIE_TOL * max(1.0, h_end):
            return False
        if self.h_start <= h_end:
            return h5 > h_end
        return h5 < h_end

    def asymptote_slope(self) -> float:
        return self.behind_state.u + self.sign * math.sqrt(self.g * self.h5)


def reduce_to_h_ode(setup: FreeBoundarySetup):
    """Right-hand side ``f(t, h)`` of the depth equation along the shock."""
    tc, h5 = setup.center[1], setup.h5

    def rhs(t, h):
        if not t > tc:
            raise DomainError(f"t={t} is not after the fan centre time {tc}")
        return -2.0 / (3.0 * (t - tc)) * (h - math.sqrt(0.5 * (h + h5) * h5))

    return rhs


def _integrand(h: float, h5: float) -> float:
    return 3.0 / (math.sqrt(2.0 * h5 * (h + h5)) - 2.0 * h)


def log_time_integral(setup: FreeBoundarySetup, h: float) -> float:
    """``ln((t - t_c) / (t_start - t_c))`` when the fan depth at the shock is ``h``.

    Integrated in ``s = ln|h' - h5|`` so the approach to ``h5`` stays smooth.
    """
    h5, hA = setup.h5, setup.h_start
    if h == hA:
        return 0.0
    if (hA - h5) * (h - h5) <= 0.0:
        raise DomainError(f"depth {h} is not reachable from {hA} (limit {h5})")
    side = 1.0 if hA > h5 else -1.0

    def f(s):
        e = math.exp(s)
        return _integrand(h5 + side * e, h5) * e * side

    sa, sb = math.log(abs(hA - h5)), math.log(abs(h - h5))
    val, _ = quad(f, sa, sb, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def penetration_time(setup: FreeBoundarySetup) -> Verdict:
    """Finite crossing time of the whole fan, or the asymptote of the shock."""
    if not setup.crosses():
        return Asymptote(setup.asymptote_slope())
    t4, tc = setup.anchor[1], setup.center[1]
    if setup.h_start == setup.h_end:
        return CrossedAt(t4)
    return CrossedAt(tc + (t4 - tc) * math.exp(log_time_integral(setup, setup.h_end)))


def trace_penetration(setup: FreeBoundarySetup, n: int = 200, approach: float = 1e-6) -> OdeTrajectory:
    """Shock path sampled on ``n`` depths between the fan head and the tail (or ``h5``)."""
    verdict = penetration_time(setup)
    hA = setup.h_start
    if isinstance(verdict, CrossedAt):
        h_last = setup.h_end
    else:
        h_last = setup.h5 + (hA - setup.h5) * approach
        if (hA - setup.h_end) * (h_last - setup.h_end) < 0.0:
            h_last = setup.h_end
    hs = np.linspace(hA, h_last, n)
    xc, tc = setup.center
    t4 = setup.anchor[1]
    rows = []
    for h in hs:
        U = setup.fan_state(float(h))
        t = tc + (t4 - tc) * math.exp(log_time_integral(setup, float(h)))
        x = xc + setup.char_speed(U) * (t - tc)
        rows.append((t, x, U.h, U.u))
    return OdeTrajectory(np.array(rows), verdict, {"h5": setup.h5})


def integrate_free_boundary(setup: FreeBoundarySetup, t_max: Optional[float] = None,
                            rtol: float = 1e-10, atol: float = 1e-12):
    """Integrate ``dx/dt = sigma(fan state at (x, t), behind_state)`` directly.

    Returns ``(t_cross, solution)``; ``t_cross`` is ``None`` when the far
    edge of the fan is not reached before ``t_max``.
    """
    x4, t4 = setup.anchor
    tc = setup.center[1]
    if t_max is None:
        t_max = tc + (t4 - tc) * math.exp(60.0)
    c_end = math.sqrt(setup.g * setup.h_end)
    sgn = setup.sign
    J = setup.invariant

    def fan_c(t, x):
        xi = (x - setup.center[0]) / (t - tc)
        return sgn * (xi - J) / 3.0

    def rhs(t, y):
        c = fan_c(t, y[0])
        U = State(J + sgn * 2.0 * c, c * c / setup.g, 0.0)
        return [setup.shock_speed(U)]

    def reach_tail(t, y):
        return fan_c(t, y[0]) - c_end

    reach_tail.terminal = True
    if setup.h_start == setup.h_end:
        return t4, None
    sol = solve_ivp(rhs, (t4, t_max), [x4], method="RK45", rtol=rtol, atol=atol,
                    events=reach_tail, dense_output=True)
    if sol.status == -1:
        raise NumericalFailure(f"free-boundary integration failed: {sol.message}")
    if sol.t_events[0].size:
        return float(sol.t_events[0][0]), sol
    return None, sol


# --------------------------------------------------------------------------
# transmitted 1-shock behind a supercritical step

@dataclass(frozen=True)
class EnvelopePoint:
    x_e: float
    t_e: float
    inside: bool
    pair: int = -1


def line_crossing(p1: tuple[float, float], s1: float, p2: tuple[float, float], s2: float):
    """Crossing ``(t, x)`` of ``x = x_i + s_i (t - t_i)`` through ``p_i = (t_i, x_i)``; ``None`` if parallel."""
    if s1 == s2:
        return None
    t = (p2[1] - p1[1] + s1 * p1[0] - s2 * p2[0]) / (s1 - s2)
    return t, p1[1] + s1 * (t - p1[0])


def _lam1(K, J):
    return 0.25 * J + 0.75 * K


def _lam2(K, J):
    return 0.75 * J + 0.25 * K


@dataclass
class CharacteristicMesh:
    """1- and 2-characteristics issued from the step while the fan crosses it.

    Node ``(i, j)`` (``j >= i``) is where the 1-characteristic leaving the
    step at ``tau[i]`` meets the 2-characteristic leaving at ``tau[j]``.
    ``K[i] = u - 2c`` is carried by 1-characteristics and ``J[j] = u + 2c`` by
    2-characteristics; node positions follow from averaged speeds.
    """

    tau: np.ndarray
    K: np.ndarray
    J: np.ndarray
    t: np.ndarray
    x: np.ndarray
    x_step: float
    g: float

    @property
    def n(self) -> int:
        return self.tau.size

    def tail_speed(self) -> np.ndarray:
        """Speed of each 1-characteristic beyond the last 2-characteristic."""
        return _lam1(self.K, self.J[-1])

    def state(self, K: float, J: float, a: float) -> State:
        c = 0.25 * (J - K)
        return State(0.5 * (J + K), c * c / self.g, a)


def _boundary_history(scn, taus: np.ndarray) -> list[State]:
    """Image states right of the step while the incoming fan crosses it."""
    g = scn.g
    Um = scn.U_mid
    Kin = Um.u - 2.0 * math.sqrt(g * Um.h)
    out = []
    for tau in taus:
        xi = (scn.x2 - scn.x1) / tau
        c = (xi - Kin) / 3.0
        U0 = State(Kin + 2.0 * c, c * c / g, scn.a0)
        out.append(curves.stationary_select(U0, scn.a1, g, branch="super"))
    return out


def crossing_window(scn) -> tuple[float, float]:
    """``(t1, t2)``: arrival times of the fan head and tail at the step."""
    g = scn.g
    lam_head = scn.U_mid.u + math.sqrt(g * scn.U_mid.h)
    lam_tail = scn.U_minus.u + math.sqrt(g * scn.U_minus.h)
    d = scn.x2 - scn.x1
    return d / lam_head, d / lam_tail


def _check_transmitted(scn) -> None:
    g = scn.g
    if is_subcritical(scn.U_minus, g) or is_subcritical(scn.U_mid, g):
        raise UnsupportedConfiguration("the transmitted 1-shock needs a supercritical incoming fan")
    if scn.a0 == scn.a1:
        raise UnsupportedConfiguration("no step: the incoming fan passes unchanged")
    if not scn.x2 > scn.x1:
        raise UnsupportedConfiguration("the fan must start left of the step")


def build_mesh(scn, n_chars: int = 400) -> CharacteristicMesh:
    """Characteristic mesh right of the step for a supercritical rarefaction scenario."""
    _check_transmitted(scn)
    g = scn.g
    t1, t2 = crossing_window(scn)
    tau = np.linspace(t1, t2, n_chars + 1)
    states = _boundary_history(scn, tau)
    # the ends are exactly the data states
    states[0] = scn.U_plus
    states[-1] = curves.stationary_select(scn.U_minus, scn.a1, g, branch="super")
    c = np.array([math.sqrt(g * U.h) for U in states])
    u = np.array([U.u for U in states])
    K, J = u - 2.0 * c, u + 2.0 * c
    n = tau.size
    T = np.full((n, n), np.nan)
    X = np.full((n, n), np.nan)
    idx = np.arange(n)
    T[idx, idx] = tau
    X[idx, idx] = scn.x2
    for d in range(1, n):
        i = np.arange(0, n - d)
        j = i + d
        tP, xP = T[i, j - 1], X[i, j - 1]
        tQ, xQ = T[i + 1, j], X[i + 1, j]
        a = 0.5 * (_lam1(K[i], J[j - 1]) + _lam1(K[i], J[j]))
        b = 0.5 * (_lam2(K[i + 1], J[j]) + _lam2(K[i], J[j]))
        tn = (xQ - xP + a * tP - b * tQ) / (a - b)
        T[i, j] = tn
        X[i, j] = xP + a * (tn - tP)
    return CharacteristicMesh(tau, K, J, T, X, scn.x2, g)


def _envelope_on_mesh(mesh: CharacteristicMesh) -> Optional[EnvelopePoint]:
    n = mesh.n
    best = None
    T, X = mesh.t, mesh.x
    # inside: adjacent 1-characteristics i, i+1 swap order along a 2-characteristic
    for i in range(n - 2):
        js = np.arange(i + 1, n)
        d = T[i, js] - T[i + 1, js]
        bad = np.nonzero(d <= 0.0)[0]
        if bad.size == 0:
            continue
        k = bad[0]
        j = js[k]
        if k == 0:
            te, xe = T[i, j], X[i, j]
        else:
            th = d[k - 1] / (d[k - 1] - d[k])
            te = T[i, j - 1] + th * (T[i, j] - T[i, j - 1])
            xe = X[i, j - 1] + th * (X[i, j] - X[i, j - 1])
        if best is None or te < best.t_e:
            best = EnvelopePoint(float(xe), float(te), True, i)
    # beyond the last 2-characteristic the 1-characteristics are straight
    lam = mesh.tail_speed()
    tN, xN = T[:, -1], X[:, -1]
    s1, s2 = lam[:-1], lam[1:]
    conv = s2 > s1
    with np.errstate(divide="ignore", invalid="ignore"):
        tc = (xN[:-1] - xN[1:] + s2 * tN[1:] - s1 * tN[:-1]) / (s2 - s1)
    ok = conv & (tc >= np.maximum(tN[:-1], tN[1:]))
    if np.any(ok):
        k = int(np.argmin(np.where(ok, tc, np.inf)))
        te = float(tc[k])
        if best is None or te < best.t_e:
            best = EnvelopePoint(float(xN[k] + s1[k] * (te - tN[k])), te, False, k)
    return best


def _boundary_K(scn, tau: float) -> float:
    U = _boundary_history(scn, np.array([tau]))[0]
    return U.u - 2.0 * math.sqrt(scn.g * U.h)


def tail_envelope(scn) -> Optional[EnvelopePoint]:
    """Envelope of the straight 1-characteristics at the tail of the crossing window.

    Near ``tau = t2`` the foot of each characteristic tends to ``(x2, t2)`` and
    the envelope time reduces to ``t2 + lambda1 / (3/4 dK/dtau)``.
    """
    g = scn.g
    t1, t2 = crossing_window(scn)
    Ums = curves.stationary_select(scn.U_minus, scn.a1, g, branch="super")
    lam = Ums.u - math.sqrt(g * Ums.h)
    d = 1e-4 * (t2 - t1)
    # one-sided fourth-order difference
    k = [_boundary_K(scn, t2 - m * d) for m in range(5)]
    dK = (25 * k[0] - 48 * k[1] + 36 * k[2] - 16 * k[3] + 3 * k[4]) / (12 * d)
    if not dK > 0.0 or not lam > 0.0:
        return None
    te = t2 + lam / (0.75 * dK)
    return EnvelopePoint(scn.x2 + lam * (te - t2), te, False, -1)


def find_envelope(scn, n_chars: int = 200, max_chars: int = 1600) -> Optional[EnvelopePoint]:
    """Birth point of the transmitted 1-shock: first crossing of neighbouring 1-characteristics.

    Pair crossings converge at first order with a second-order correction
    when the earliest crossing sits at an end of the window, so the last
    three doublings are combined by two Richardson steps of orders 1 and 2.
    A crossing at the tail uses the closed-form tail value.
    """
    levels = []
    n = n_chars
    while n <= max_chars:
        E = _envelope_on_mesh(build_mesh(scn, n))
        if E is None:
            return None
        if not E.inside and E.pair == n - 1:
            tail = tail_envelope(scn)
            return tail if tail is not None else E
        levels.append(E)
        n *= 2
    last = levels[-1]
    if len(levels) < 3 or len({(L.inside, L.pair) for L in levels[-3:]}) > 1:
        return last

    def extrapolate(a, b, c):
        r1, r2 = 2.0 * b - a, 2.0 * c - b
        return (4.0 * r2 - r1) / 3.0

    A, B, C = levels[-3:]
    return EnvelopePoint(extrapolate(A.x_e, B.x_e, C.x_e), extrapolate(A.t_e, B.t_e, C.t_e),
                         last.inside, last.pair)


def _char_positions(mesh: CharacteristicMesh, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Position and ``J`` of every 1-characteristic at time ``t`` (NaN before it leaves the step)."""
    n = mesh.n
    T, X = mesh.t, mesh.x
    with np.errstate(invalid="ignore"):
        count = np.sum(T <= t, axis=1)
    rows = np.arange(n)
    issued = count > 0
    k = np.clip(rows + count - 1, rows, n - 1)
    k1 = np.minimum(k + 1, n - 1)
    t0, t1 = T[rows, k], T[rows, k1]
    with np.errstate(invalid="ignore", divide="ignore"):
        th = np.where(k1 > k, (t - t0) / (t1 - t0), 0.0)
    th = np.clip(th, 0.0, 1.0)
    xs = X[rows, k] + th * (X[rows, k1] - X[rows, k])
    Js = mesh.J[k] + th * (mesh.J[k1] - mesh.J[k])
    beyond = count >= n - rows
    lam = mesh.tail_speed()
    xs = np.where(beyond, X[:, -1] + lam * (t - T[:, -1]), xs)
    Js = np.where(beyond, mesh.J[-1], Js)
    xs[~issued] = np.nan
    Js[~issued] = np.nan
    return xs, Js


def transmitted_right_state(Ul: State, K_right: float, g: float) -> State:
    """Right state of the 1-shock from ``Ul`` lying on ``u - 2c = K_right``."""

    def F(h):
        return curves.shock_u(1, Ul, h, g) - 2.0 * math.sqrt(g * h) - K_right

    f0 = F(Ul.h)
    if abs(f0) <= 1e-14 * max(1.0, abs(K_right)):
        return Ul
    if f0 < 0.0:
        raise DomainError("the right-hand characteristic is not compressive against the left state")
    hi = 2.0 * Ul.h
    while F(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12 * Ul.h:
            raise NumericalFailure("could not bracket the transmitted shock state")
    h = brentq(F, Ul.h, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps)
    return curves.shock_state(1, Ul, h, g)


def _interp(xs: np.ndarray, vals: np.ndarray, i: int, j: int, x: float) -> float:
    if xs[i] == xs[j]:
        return float(vals[i])
    th = (xs[i] - x) / (xs[i] - xs[j])
    th = min(max(th, 0.0), 1.0)
    return float(vals[i] + th * (vals[j] - vals[i]))


def shock_sides(mesh: CharacteristicMesh, t: float, x: float, a: float) -> tuple[State, float, float]:
    """Left state at a shock at ``(x, t)`` and the ``K`` carried into it from the right.

    1-characteristics are indexed by departure time, so later ones sit
    behind. Those still behind the shock (``x_i < x``, high index) give the
    left state; those still ahead (``x_i > x``, low index) give the right
    ``K``; the indices in between have been absorbed. Returns
    ``(U_left, K_right, remaining)`` where ``remaining`` measures the
    compression not yet absorbed (zero once both sides are uniform).
    """
    xs, Js = _char_positions(mesh, t)
    n = mesh.n
    xs = np.where(np.isnan(xs), mesh.x_step, xs)
    Js = np.where(np.isnan(Js), mesh.J[-1], Js)
    ahead = np.nonzero(xs > x)[0]
    if ahead.size == 0:
        il, ir = 0, 0
    else:
        il = min(int(ahead[-1]) + 1, n - 1)
        behind = np.nonzero(xs <= x)[0]
        ir = int(behind[0]) if behind.size else n - 1
    if il >= 1 and xs[il - 1] > x:
        K_l = _interp(xs, mesh.K, il - 1, il, x)
        J_l = _interp(xs, Js, il - 1, il, x)
    else:
        K_l, J_l = float(mesh.K[il]), float(Js[il])
    if ir >= 1:
        K_r = _interp(xs, mesh.K, ir - 1, ir, x)
    else:
        K_r = float(mesh.K[0])
    U_l = mesh.state(K_l, J_l, a)
    remaining = (mesh.K[-1] - K_l) + (K_r - mesh.K[0])
    return U_l, K_r, remaining


def solve_transmitted_shock(scn, n_chars: int = 400, n_samples: int = 200,
                            envelope: Optional[EnvelopePoint] = None) -> OdeTrajectory:
    """Path of the 1-shock formed behind a supercritical step.

    If the envelope forms outside the interaction region the shock runs
    straight at the final speed ``sigma1(U_minus*, U2)``. Otherwise its
    left state comes from the 1-characteristics still behind it and its
    right state is the Hugoniot point on the ``u - 2c`` value carried by the
    1-characteristic arriving from ahead; the path is integrated until the
    compression is used up, after which the speed is the final one.
    """
    _check_transmitted(scn)
    g, a1 = scn.g, scn.a1
    Ums = curves.stationary_select(scn.U_minus, a1, g, branch="super")
    K_plus = scn.U_plus.u - 2.0 * math.sqrt(g * scn.U_plus.h)
    U2 = transmitted_right_state(Ums, K_plus, g)
    s_final = curves.shock_speed(1, Ums, U2, g)
    if not s_final > 0.0:
        raise DomainError("the transmitted 1-shock does not move away from the step")
    E = envelope or find_envelope(scn)
    if E is None:
        raise DomainError("the 1-characteristics do not cross: no transmitted shock forms")
    info = {"envelope": E, "final_speed": s_final, "U2": U2, "U_minus_star": Ums}

    if not E.inside:
        t_end = E.t_e + max(1.0, E.t_e)
        ts = np.linspace(E.t_e, t_end, n_samples)
        xs = E.x_e + s_final * (ts - E.t_e)
        samples = np.column_stack([ts, xs, np.full_like(ts, U2.h), np.full_like(ts, U2.u)])
        info["straight"] = True
        return OdeTrajectory(samples, CrossedAt(float(E.t_e)), info)

    mesh = build_mesh(scn, n_chars)
    scale = max(1.0, abs(K_plus), abs(mesh.K[-1]))

    def pair(t, x):
        U_l, K_r, rem = shock_sides(mesh, t, x, a1)
        U_r = transmitted_right_state(U_l, min(K_r, U_l.u - 2.0 * math.sqrt(g * U_l.h)), g)
        if U_r is U_l:
            return eigenstructure(U_l, g).lambda1, U_l, U_r, rem
        return curves.shock_speed(1, U_l, U_r, g), U_l, U_r, rem

    def rhs(t, y):
        return [pair(t, y[0])[0]]

    def settled(t, y):
        return pair(t, y[0])[3] - 1e-12 * scale

    settled.terminal = True
    settled.direction = -1
    t2 = crossing_window(scn)[1]
    t_hi = E.t_e + 200.0 * max(t2, E.t_e)
    sol = solve_ivp(rhs, (E.t_e, t_hi), [E.x_e], method="RK45", rtol=ODE_RTOL, atol=ODE_ATOL,
                    events=settled, dense_output=True, max_step=0.02 * max(t2, E.t_e))
    if sol.status == -1:
        raise NumericalFailure(f"transmitted shock integration failed: {sol.message}")
    done = bool(sol.t_events[0].size)
    t_done = float(sol.t_events[0][0]) if done else float(sol.t[-1])
    ts = np.linspace(E.t_e, t_done, n_samples)
    rows = []
    for t in ts:
        x = float(sol.sol(t)[0])
        _, _, U_r, _ = pair(t, x)
        rows.append((t, x, U_r.h, U_r.u))
    info["straight"] = False
    verdict = CrossedAt(t_done) if done else Asymptote(pair(t_done, rows[-1][1])[0])
    return OdeTrajectory(np.array(rows), verdict, info)
