"""Primitive states, Riemann invariants and regime classification.

The gas is isothermal with unit sound speed, so the invariants are
``y1 = u - ln(rho)`` and ``y2 = u + ln(rho)`` with speeds ``u -+ 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidState, NonPositiveVelocity

TOL_SONIC = 1e-6


class Regime(enum.Enum):
    SUPERSONIC = "supersonic"
    SONIC = "sonic"
    SUBSONIC = "subsonic"


@dataclass(frozen=True)
class GasState:
    """Density and velocity at one point."""

    rho: float
    u: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and math.isfinite(self.u)):
            raise InvalidState(f"non-finite state rho={self.rho}, u={self.u}")
        if self.rho <= 0.0:
            raise InvalidState(f"density must be positive, got {self.rho}")


@dataclass(frozen=True)
class RiemannPair:
    y1: float
    y2: float

    def __post_init__(self):
        if not (math.isfinite(self.y1) and math.isfinite(self.y2)):
            raise InvalidState(f"non-finite invariants ({self.y1}, {self.y2})")


def to_riemann(s: GasState) -> RiemannPair:
    lr = math.log(s.rho)
    return RiemannPair(s.u - lr, s.u + lr)


def from_riemann(r: RiemannPair) -> GasState:
    return GasState(math.exp(0.5 * (r.y2 - r.y1)), 0.5 * (r.y1 + r.y2))


def eigenvalues(s: GasState) -> tuple[float, float]:
    """Characteristic speeds ``(u - 1, u + 1)``."""
    return s.u - 1.0, s.u + 1.0


def classify(s: GasState, tol_sonic: float = TOL_SONIC) -> Regime:
    if tol_sonic <= 0.0:
        raise ValueError("tol_sonic must be positive")
    if s.u <= 0.0:
        raise NonPositiveVelocity(f"velocity must be positive, got {s.u}")
    if s.u > 1.0 + tol_sonic:
        return Regime.SUPERSONIC
    if s.u < 1.0 - tol_sonic:
        return Regime.SUBSONIC
    return Regime.SONIC
