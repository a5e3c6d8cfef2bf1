"""State space of the shallow water system with a step bottom.

A state is ``U = (u, h, a)``: velocity, depth and bottom elevation. The
phase plane is split by the sonic curves ``u = +-c`` into the domains
D1 (``u < -c``), D2 (``|u| < c``) and D3 (``u > c``); the first quadrant is
further split by ``u = 2c`` into regions I, II and III.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

G_DEFAULT = 9.81
BOUNDARY_TOL = 1e-10


class DomainError(ValueError):
    """Raised for states or parameters outside the admissible set."""


class UnsupportedConfiguration(ValueError):
    """Raised when data violates the sign/quadrant assumptions of the analysis."""


class NumericalFailure(RuntimeError):
    """Raised when a root finder or integrator cannot deliver a result."""


def check_gravity(g: float) -> float:
    g = float(g)
    if not g > 0.0 or not math.isfinite(g):
        raise DomainError(f"gravity must be positive and finite, got {g!r}")
    return g


@dataclass(frozen=True)
class State:
    """A wet state ``(u, h, a)``."""

    u: float
    h: float
    a: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.h) and math.isfinite(self.a)):
            raise DomainError(f"non-finite state {self}")
        if not self.h > 0.0:
            raise DomainError(f"dry or negative depth h={self.h!r}")

    def c(self, g: float = G_DEFAULT) -> float:
        return celerity(self.h, g)

    @property
    def q(self) -> float:
        """Discharge ``h*u``."""
        return self.h * self.u

    def with_a(self, a: float) -> State:
        return State(self.u, self.h, a)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.u, self.h, self.a)


class DomainLabel(enum.Enum):
    D1 = "D1"
    D2minus = "D2minus"
    D2plus = "D2plus"
    D3 = "D3"
    GammaPlus = "GammaPlus"
    GammaMinus = "GammaMinus"

    @property
    def supercritical(self) -> bool:
        return self in (DomainLabel.D1, DomainLabel.D3)

    @property
    def subcritical(self) -> bool:
        return self in (DomainLabel.D2minus, DomainLabel.D2plus)


class QuadrantLabel(enum.Enum):
    RegionI = "I"
    RegionII = "II"
    RegionIII = "III"
    GammaPlus = "GammaPlus"
    Gamma1 = "Gamma1"


@dataclass(frozen=True)
class Eigenstructure:
    lambda1: float
    lambda2: float
    lambda3: float
    r1: tuple[float, float, float]
    r2: tuple[float, float, float]
    r3: tuple[float, float, float]

    @property
    def speeds(self) -> tuple[float, float, float]:
        return (self.lambda1, self.lambda2, self.lambda3)


def celerity(h: float, g: float = G_DEFAULT) -> float:
    """Gravity wave speed ``sqrt(g*h)``."""
    g = check_gravity(g)
    if not h > 0.0:
        raise DomainError(f"celerity needs h > 0, got {h!r}")
    return math.sqrt(g * h)


def eigenstructure(U: State, g: float = G_DEFAULT) -> Eigenstructure:
    c = celerity(U.h, g)
    return Eigenstructure(
        lambda1=U.u - c,
        lambda2=U.u + c,
        lambda3=0.0,
        r1=(U.h, -c, 0.0),
        r2=(U.h, c, 0.0),
        r3=(c * c, -g * U.u, U.u * U.u - c * c),
    )


def _band(c: float, tol: float) -> float:
    return tol * max(c, 1.0)


def classify_domain(U: State, g: float = G_DEFAULT, tol: float = BOUNDARY_TOL) -> DomainLabel:
    c = celerity(U.h, g)
    band = _band(c, tol)
    if abs(U.u - c) <= band:
        return DomainLabel.GammaPlus
    if abs(U.u + c) <= band:
        return DomainLabel.GammaMinus
    if U.u > c:
        return DomainLabel.D3
    if U.u < -c:
        return DomainLabel.D1
    # u == 0 belongs to D2plus
    return DomainLabel.D2plus if U.u >= 0.0 else DomainLabel.D2minus


def classify_quadrant(U: State, g: float = G_DEFAULT, tol: float = BOUNDARY_TOL) -> QuadrantLabel:
    if U.u < 0.0:
        raise DomainError(f"quadrant classification needs u >= 0, got u={U.u!r}")
    c = celerity(U.h, g)
    band = _band(c, tol)
    if abs(U.u - c) <= band:
        return QuadrantLabel.GammaPlus
    if abs(U.u - 2.0 * c) <= band:
        return QuadrantLabel.Gamma1
    if U.u > 2.0 * c:
        return QuadrantLabel.RegionI
    if U.u > c:
        return QuadrantLabel.RegionII
    return QuadrantLabel.RegionIII


def riemann_invariants(family: int, U: State, g: float = G_DEFAULT) -> tuple[float, float]:
    """The two Riemann invariants of characteristic ``family`` (1, 2 or 3)."""
    if family == 1:
        return (U.a, U.u + 2.0 * celerity(U.h, g))
    if family == 2:
        return (U.a, U.u - 2.0 * celerity(U.h, g))
    if family == 3:
        g = check_gravity(g)
        return (U.h * U.u, 0.5 * U.u * U.u + g * (U.h + U.a))
    raise ValueError(f"family must be 1, 2 or 3, got {family!r}")


def lambda_fields(U: State, g: float = G_DEFAULT) -> np.ndarray:
    """``(lambda1, lambda2)`` as an array, handy for finite differences."""
    c = celerity(U.h, g)
    return np.array([U.u - c, U.u + c])


def is_subcritical(U: State, g: float = G_DEFAULT) -> bool:
    """True for states in the closure of D2."""
    return abs(U.u) <= celerity(U.h, g) * (1.0 + BOUNDARY_TOL)


def is_supercritical_right(U: State, g: float = G_DEFAULT) -> bool:
    """True for states in the closure of D3."""
    return U.u >= celerity(U.h, g) * (1.0 - BOUNDARY_TOL)
