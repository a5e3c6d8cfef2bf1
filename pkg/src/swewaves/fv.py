"""Well-balanced finite-volume oracle.

First-order HLL fluxes with a reconstruction of the bottom source term.
The bottom step sits on a single cell interface at the step position. At
that interface the state on the upper side is brought down to the lower
level along its stationary (constant discharge, constant energy) curve,
which for still water is the hydrostatic reconstruction. Both the lake at
rest and moving steady jumps are then kept exactly. The scheme does not use
the exact wave curves and serves only as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .riemann import WaveFan
from .states import G_DEFAULT, DomainError, NumericalFailure, State, check_gravity

DRY_TOL = 1e-12


class PositivityFailure(NumericalFailure):
    """A cell depth went negative."""


@dataclass(frozen=True)
class FvConfig:
    """Run parameters.

    Attributes:
        cells: number of cells (at least 100).
        domain: ``(x_lo, x_hi)``.
        cfl: Courant number in ``(0, 1)``.
        end_time: final time.
        g: gravity.
        boundary: ``"transmissive"`` or ``"wall"``.
    """

    cells: int
    domain: tuple[float, float]
    cfl: float = 0.45
    end_time: float = 1.0
    g: float = G_DEFAULT
    boundary: str = "transmissive"

    def __post_init__(self):
        check_gravity(self.g)
        if int(self.cells) < 100:
            raise DomainError(f"need at least 100 cells, got {self.cells}")
        if not 0.0 < self.cfl < 1.0:
            raise DomainError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.domain[1] > self.domain[0]:
            raise DomainError("empty domain")
        if not self.end_time >= 0.0:
            raise DomainError("end_time must be non-negative")
        if self.boundary not in ("transmissive", "wall"):
            raise DomainError(f"unknown boundary {self.boundary!r}")

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.cells

    def centers(self) -> np.ndarray:
        return self.domain[0] + (np.arange(self.cells) + 0.5) * self.dx


@dataclass
class FvField:
    """Cell averages ``h``, ``hu`` and the (fixed) bottom ``a`` at time ``t``."""

    x: np.ndarray
    h: np.ndarray
    hu: np.ndarray
    a: np.ndarray
    dx: float
    t: float = 0.0

    @property
    def u(self) -> np.ndarray:
        wet = self.h > DRY_TOL
        out = np.zeros_like(self.h)
        out[wet] = self.hu[wet] / self.h[wet]
        return out

    def mass(self) -> float:
        return float(np.sum(self.h) * self.dx)

    def to_csv(self, path, scenario: str = "scenario") -> None:
        """Write ``x,h,u,a`` rows after a ``# scenario=..., t=...`` header line."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# scenario={scenario} t={self.t:.17g}\n")
            fh.write("x,h,u,a\n")
            for row in zip(self.x, self.h, self.u, self.a):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _velocity(h: np.ndarray, hu: np.ndarray) -> np.ndarray:
    out = np.zeros_like(h)
    wet = h > DRY_TOL
    out[wet] = hu[wet] / h[wet]
    return out


def hll_flux(hL, uL, hR, uR, g: float):
    """HLL flux for the flat-bottom system with Davis speed estimates."""
    cL, cR = np.sqrt(g * hL), np.sqrt(g * hR)
    sL = np.minimum(uL - cL, uR - cR)
    sR = np.maximum(uL + cL, uR + cR)
    FL0, FL1 = hL * uL, hL * uL * uL + 0.5 * g * hL * hL
    FR0, FR1 = hR * uR, hR * uR * uR + 0.5 * g * hR * hR
    qL, qR = hL * uL, hR * uR
    den = np.where(sR > sL, sR - sL, 1.0)
    F0 = (sR * FL0 - sL * FR0 + sL * sR * (hR - hL)) / den
    F1 = (sR * FL1 - sL * FR1 + sL * sR * (qR - qL)) / den
    F0 = np.where(sL >= 0.0, FL0, np.where(sR <= 0.0, FR0, F0))
    F1 = np.where(sL >= 0.0, FL1, np.where(sR <= 0.0, FR1, F1))
    both_dry = (hL <= DRY_TOL) & (hR <= DRY_TOL)
    F0 = np.where(both_dry, 0.0, F0)
    F1 = np.where(both_dry, 0.0, F1)
    return F0, F1


def _padded(field: FvField, boundary: str):
    h = np.concatenate(([field.h[0]], field.h, [field.h[-1]]))
    hu = np.concatenate(([field.hu[0]], field.hu, [field.hu[-1]]))
    a = np.concatenate(([field.a[0]], field.a, [field.a[-1]]))
    if boundary == "wall":
        hu[0], hu[-1] = -hu[1], -hu[-2]
    return h, hu, a


def stable_dt(field: FvField, config: FvConfig) -> float:
    u = field.u
    s = np.max(np.abs(u) + np.sqrt(config.g * np.maximum(field.h, 0.0)))
    if not s > 0.0:
        return math.inf
    return config.cfl * field.dx / s


def lower_to_level(h: float, u: float, a: float, a_low: float, g: float) -> float:
    """Depth at level ``a_low <= a`` with the same discharge and energy as ``(h, u)`` at ``a``.

    Lowering the bottom always has a solution on each branch; the flow regime
    of the input is kept and a critical input takes the fast branch.
    """
    if a_low == a or h <= DRY_TOL:
        return h
    q = h * u
    energy = 0.5 * u * u + g * (h + a)
    if q == 0.0:
        return energy / g - a_low
    hc = (q * q / g) ** (1.0 / 3.0)

    def phi(y):
        return 0.5 * q * q / (y * y) + g * (y + a_low) - energy

    if u * u >= g * h:
        lo = min(h, hc)
        while phi(lo) < 0.0:
            lo *= 0.5
        return brentq(phi, lo, hc, xtol=1e-15 * hc, rtol=1e-15)
    hi = max(h, hc)
    while phi(hi) < 0.0:
        hi *= 2.0
    return brentq(phi, hc, hi, xtol=1e-15 * hi, rtol=1e-15)


def _momentum_flux(h, u, g):
    return h * u * u + 0.5 * g * h * h


def fv_step(field: FvField, config: FvConfig, dt: Optional[float] = None) -> FvField:
    """One conservative update; returns a new field.

    Raises:
        PositivityFailure: a depth became negative.
    """
    g = config.g
    if dt is None:
        dt = stable_dt(field, config)
    h, hu, a = _padded(field, config.boundary)
    u = _velocity(h, hu)
    hL, hR = h[:-1], h[1:]
    uL, uR = u[:-1], u[1:]
    aL, aR = a[:-1], a[1:]
    hLs, hRs = hL.copy(), hR.copy()
    uLs, uRs = uL.copy(), uR.copy()
    F1L_corr = np.zeros_like(hL)
    F1R_corr = np.zeros_like(hR)
    # step interfaces: bring the upper side down along its stationary curve
    for k in np.nonzero(aL != aR)[0]:
        if aL[k] > aR[k]:
            hs = lower_to_level(hL[k], uL[k], aL[k], aR[k], g)
            hLs[k] = hs
            uLs[k] = hL[k] * uL[k] / hs if hs > DRY_TOL else 0.0
            F1L_corr[k] = _momentum_flux(hL[k], uL[k], g) - _momentum_flux(hs, uLs[k], g)
        else:
            hs = lower_to_level(hR[k], uR[k], aR[k], aL[k], g)
            hRs[k] = hs
            uRs[k] = hR[k] * uR[k] / hs if hs > DRY_TOL else 0.0
            F1R_corr[k] = _momentum_flux(hR[k], uR[k], g) - _momentum_flux(hs, uRs[k], g)
    F0, F1 = hll_flux(hLs, uLs, hRs, uRs, g)
    F1L = F1 + F1L_corr
    F1R = F1 + F1R_corr
    lam = dt / field.dx
    h_new = field.h - lam * (F0[1:] - F0[:-1])
    hu_new = field.hu - lam * (F1L[1:] - F1R[:-1])
    if np.any(h_new < 0.0):
        neg = h_new < -1e-14 * max(1.0, float(np.max(field.h)))
        if np.any(neg):
            i = int(np.argmax(neg))
            raise PositivityFailure(f"negative depth {h_new[i]:.3e} at x={field.x[i]:.6g}; reduce dt")
        h_new = np.maximum(h_new, 0.0)
    hu_new = np.where(h_new > DRY_TOL, hu_new, 0.0)
    return replace(field, h=h_new, hu=hu_new, t=field.t + dt)


def evolve(field: FvField, config: FvConfig, end_time: Optional[float] = None) -> FvField:
    """Advance to ``end_time`` with CFL-limited steps."""
    t_end = config.end_time if end_time is None else end_time
    f = field
    while f.t < t_end:
        dt = min(stable_dt(f, config), t_end - f.t)
        if not dt > 0.0 or not math.isfinite(dt):
            if math.isinf(dt):
                return replace(f, t=t_end)
            raise NumericalFailure(f"time step collapsed at t={f.t}")
        f = fv_step(f, config, dt)
        if t_end - f.t < 1e-14 * max(1.0, t_end):
            f = replace(f, t=t_end)
    return f


def piecewise_field(breaks: list[float], states: list[State], config: FvConfig) -> FvField:
    """Cell averages of piecewise-constant data; ``states[k]`` holds between ``breaks[k-1]`` and ``breaks[k]``.

    Bottom jumps must fall on cell interfaces so ``a`` stays piecewise constant.
    """
    if len(states) != len(breaks) + 1:
        raise DomainError("need one more state than break points")
    x_lo, x_hi = config.domain
    n, dx = config.cells, config.dx
    edges = x_lo + np.arange(n + 1) * dx
    h = np.zeros(n)
    hu = np.zeros(n)
    bounds = [-math.inf] + list(breaks) + [math.inf]
    for k, U in enumerate(states):
        lo = np.clip(bounds[k], edges[:-1], edges[1:])
        hi = np.clip(bounds[k + 1], edges[:-1], edges[1:])
        w = np.maximum(hi - lo, 0.0) / dx
        h += w * U.h
        hu += w * U.h * U.u
    # the bottom is sampled at centres so it stays exactly piecewise constant
    xc = config.centers()
    a = np.select([xc < b for b in breaks], [U.a for U in states[:-1]], states[-1].a)
    return FvField(xc, h, hu, a, dx, 0.0)


def align_domain(x_step: float, domain: tuple[float, float], cells: int) -> tuple[float, float]:
    """Shift ``domain`` (keeping its length) so ``x_step`` is a cell interface."""
    L = domain[1] - domain[0]
    dx = L / cells
    k = round((x_step - domain[0]) / dx)
    x_lo = x_step - k * dx
    return (x_lo, x_lo + L)


def scenario_field(scn, config: FvConfig) -> FvField:
    """Initial cell averages for a three-state interaction scenario."""
    lo, hi = config.domain
    if not lo < scn.x1 <= scn.x2 < hi:
        raise DomainError("both discontinuities must lie inside the domain")
    k = (scn.x2 - lo) / config.dx
    if abs(k - round(k)) > 1e-9:
        raise DomainError("the step must fall on a cell interface; see align_domain")
    return piecewise_field([scn.x1, scn.x2], [scn.U_minus, scn.U_mid, scn.U_plus], config)


def fv_run(scn, config: FvConfig) -> FvField:
    """Evolve the three-state data of ``scn`` to ``config.end_time``."""
    if config.g != scn.g:
        config = replace(config, g=scn.g)
    return evolve(scenario_field(scn, config), config)


def fan_field(fan: WaveFan, x: np.ndarray, t: float, x_center: float):
    """Exact ``(h, hu, a)`` of the self-similar fan centred at ``(x_center, 0)``."""
    if t <= 0.0:
        raise DomainError("need t > 0 to sample a fan")
    u, h, a = fan.sample((x - x_center) / t)
    return h, h * u, a


def fan_compare(fan: WaveFan, field: FvField, t: Optional[float] = None,
                x_center: float = 0.0) -> dict:
    """L1 distances between ``field`` and the fan sampled on the same cells.

    ``relative`` is the larger of the two norms divided by the L1 norm of
    the exact depth and discharge respectively.
    """
    t = field.t if t is None else t
    h_ex, hu_ex, _ = fan_field(fan, field.x, t, x_center)
    dx = field.dx
    l1_h = float(np.sum(np.abs(field.h - h_ex)) * dx)
    l1_hu = float(np.sum(np.abs(field.hu - hu_ex)) * dx)
    nh = float(np.sum(np.abs(h_ex)) * dx)
    nq = float(np.sum(np.abs(hu_ex)) * dx)
    rel_h = l1_h / nh if nh > 0 else l1_h
    rel_hu = l1_hu / nq if nq > 0 else l1_hu
    return {"l1_h": l1_h, "l1_hu": l1_hu, "rel_h": rel_h, "rel_hu": rel_hu,
            "relative": max(rel_h, rel_hu), "t": t, "cells": field.x.size}


def comparison_setup(fan: WaveFan, x_step: float, cells: int, end_time: float = 1.0,
                     cfl: float = 0.45, margin: float = 1.15) -> FvConfig:
    """Domain and time for a fan comparison.

    The domain holds every wave at ``end_time`` with ``margin`` to spare, and
    extends at least a quarter of the fastest speed to each side so slow
    waves still travel a visible fraction of it.
    """
    lo = min(w.speed_lo for w in fan.waves)
    hi = max(w.speed_hi for w in fan.waves)
    s = max(abs(lo), abs(hi), 1e-3)
    lo = min(lo, -0.25 * s)
    hi = max(hi, 0.25 * s)
    dom = (x_step + margin * lo * end_time, x_step + margin * hi * end_time)
    dom = align_domain(x_step, dom, cells)
    return FvConfig(cells, dom, cfl, end_time, fan.g)


def fv_check(scn, fan: WaveFan, cells: int = 2000, end_time: float = 1.0) -> tuple[FvField, dict]:
    """Run the scenario and compare with ``fan`` centred at the step."""
    config = comparison_setup(fan, scn.x2, cells, end_time)
    field = fv_run(scn, config)
    return field, fan_compare(fan, field, end_time, scn.x2)

