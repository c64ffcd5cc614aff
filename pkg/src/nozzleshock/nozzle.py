"""Divergent nozzle geometry and the structural assumption checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AssumptionViolation, OutOfDomain
from .gas import GasState

INLET_U_MAX = 2.0 + math.sqrt(3.0)


@dataclass(frozen=True)
class Exponential:
    """a(x) = exp(kappa x)."""

    kappa: float


@dataclass(frozen=True)
class PolynomialDivergent:
    """a(x) = sum_i c_i x**i."""

    coefficients: tuple[float, ...]


@dataclass(frozen=True)
class NozzleProfile:
    """Cross-section area on [0, L] with closed-form derivatives.

    Parameters
    ----------
    length : float
        Nozzle length L.
    shape : Exponential or PolynomialDivergent
        Analytic family of the area.
    allow_degenerate : bool
        Skip the divergence check (used by tests for a constant area).
    """

    length: float
    shape: Exponential | PolynomialDivergent
    allow_degenerate: bool = False
    _coeffs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.length > 0.0:
            raise AssumptionViolation(f"nozzle length must be positive, got {self.length}")
        if isinstance(self.shape, Exponential):
            c = np.array([float(self.shape.kappa)])
        elif isinstance(self.shape, PolynomialDivergent):
            c = np.array([float(v) for v in self.shape.coefficients])
            if c.size == 0:
                raise AssumptionViolation("polynomial area needs at least one coefficient")
        else:
            raise TypeError(f"unknown shape {self.shape!r}")
        object.__setattr__(self, "_coeffs", c)
        if not self.allow_degenerate:
            xs = np.linspace(0.0, self.length, 257)
            if np.any(self.area(xs) <= 0.0):
                raise AssumptionViolation("area a(x) must be positive on [0, L]")
            if np.any(self.darea(xs) <= 0.0):
                raise AssumptionViolation("nozzle must be divergent: a'(x) > 0 on [0, L]")

    @property
    def shape_code(self) -> int:
        return 0 if isinstance(self.shape, Exponential) else 1

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    def _check(self, x, slack=0.0):
        xa = np.asarray(x, dtype=float)
        if np.any(xa < -slack) or np.any(xa > self.length + slack):
            raise OutOfDomain(f"x outside [0, {self.length}]")
        return xa

    def area(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape_code == 0:
            return np.exp(self._coeffs[0] * x)
        return np.polynomial.polynomial.polyval(x, self._coeffs)

    def darea(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape_code == 0:
            return self._coeffs[0] * np.exp(self._coeffs[0] * x)
        return np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(self._coeffs))

    def slope(self, x):
        """Relative slope a'/a without the domain check."""
        x = np.asarray(x, dtype=float)
        if self.shape_code == 0:
            return np.full_like(x, self._coeffs[0], dtype=float)
        return self.darea(x) / self.area(x)

    def slope_derivative(self, x):
        """(a'/a)' evaluated analytically."""
        x = np.asarray(x, dtype=float)
        if self.shape_code == 0:
            return np.zeros_like(x, dtype=float)
        p = self._coeffs
        d1 = np.polynomial.polynomial.polyder(p)
        d2 = np.polynomial.polynomial.polyder(d1)
        a = np.polynomial.polynomial.polyval(x, p)
        a1 = np.polynomial.polynomial.polyval(x, d1)
        a2 = np.polynomial.polynomial.polyval(x, d2)
        return a2 / a - (a1 / a) ** 2


def relative_slope(p: NozzleProfile, x, extension: float = 0.0):
    """a'(x)/a(x) on [0, L] (optionally widened by ``extension``)."""
    xa = p._check(x, extension)
    out = p.slope(xa)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class AssumptionReport:
    kappa: float
    theta: float
    slope_derivative_bound: float
    inlet_velocity_ok: bool
    inlet_u: float
    passed: bool
    failures: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "theta": self.theta,
            "slope_derivative_bound": self.slope_derivative_bound,
            "inlet_velocity_ok": self.inlet_velocity_ok,
            "inlet_u": self.inlet_u,
            "passed": self.passed,
            "failures": list(self.failures),
        }


def validate_assumptions(p: NozzleProfile, inlet: GasState, grid_n: int = 1001) -> AssumptionReport:
    """Check the slope bounds and the admissible inlet velocity range.

    Failures are collected into the report; nothing is raised.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    xs = np.linspace(0.0, p.length, grid_n)
    k = p.slope(xs)
    kappa = float(np.max(k))
    theta = float(np.min(k) / kappa) if kappa > 0.0 else 0.0
    dk = float(np.max(np.abs(p.slope_derivative(xs))))
    failures = []
    if not np.all(p.area(xs) > 0.0):
        failures.append("area positivity a(x) > 0 fails on the grid")
    if not kappa > 0.0 or not np.all(k > 0.0):
        failures.append(f"divergence a'(x)/a(x) > 0 fails: min a'/a = {float(np.min(k)):.6g}")
    if not (0.0 < theta <= 1.0):
        failures.append(f"slope ratio theta = {theta:.6g} not in (0, 1]")
    u_ok = 1.0 < inlet.u < INLET_U_MAX
    if not u_ok:
        failures.append(f"inlet velocity u = {inlet.u:.6g} violates 1 < u < 2+sqrt(3) = {INLET_U_MAX:.6f}")
    return AssumptionReport(kappa, theta, dk, u_ok, float(inlet.u), not failures, tuple(failures))
