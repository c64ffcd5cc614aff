"""Steady branches, transonic shock fitting and branch extension."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (ExitDensityUnattainable, NonMonotoneResidual, OutOfDomain,
                     SonicApproach, StepCountTooSmall)
from .gas import TOL_SONIC, GasState, Regime, classify
from .nozzle import NozzleProfile


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class SteadyBranch:
    """RK4 samples of one steady branch, stored with ascending x."""

    x_grid: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    regime: Regime

    @property
    def states(self) -> list[GasState]:
        return [GasState(float(r), float(v)) for r, v in zip(self.rho, self.u)]

    def at(self, x):
        """Piecewise-linear (rho, u) at ``x`` (arrays allowed)."""
        xa = np.asarray(x, dtype=float)
        lo, hi = self.x_grid[0], self.x_grid[-1]
        span = hi - lo
        if np.any(xa < lo - 1e-12 * span) or np.any(xa > hi + 1e-12 * span):
            raise OutOfDomain(f"x outside branch domain [{lo}, {hi}]")
        return np.interp(xa, self.x_grid, self.rho), np.interp(xa, self.x_grid, self.u)


def _n_steps(length, steps_per_unit):
    return max(4, int(math.ceil(steps_per_unit * abs(length) - 1e-9)))


def integrate_branch(p: NozzleProfile, start: GasState, x0: float, x1: float, n_steps: int,
                     tol_sonic: float = TOL_SONIC) -> SteadyBranch:
    """Integrate the steady ODE pair with fixed-step RK4 from x0 to x1.

    Parameters
    ----------
    p : NozzleProfile
    start : GasState
        State at ``x0``.
    x0, x1 : float
        Endpoints; ``x1 < x0`` integrates backward.
    n_steps : int
        Number of RK4 steps.

    Returns
    -------
    SteadyBranch
        Samples on the uniform grid, reordered to ascending x.
    """
    if n_steps < 1:
        raise StepCountTooSmall(f"n_steps must be >= 1, got {n_steps}")
    for x in (x0, x1):
        if x < 0.0 or x > 1.5 * p.length:
            raise OutOfDomain(f"integration endpoint {x} outside [0, 1.5 L]")
    regime = classify(start, tol_sonic)
    if regime is Regime.SONIC:
        raise SonicApproach(f"start state u={start.u} is within tol_sonic of sonic")
    xs, rs, us, status = kernels.rk4_branch(p.shape_code, p.coeffs, float(x0), float(x1),
                                            int(n_steps), float(start.rho), float(start.u),
                                            float(tol_sonic))
    if status >= 0:
        raise SonicApproach(f"branch reached |u-1| < {tol_sonic} at x={xs[status]:.6g}")
    if x1 < x0:
        xs, rs, us = xs[::-1].copy(), rs[::-1].copy(), us[::-1].copy()
    return SteadyBranch(xs, rs, us, regime)


def _join(a: SteadyBranch, b: SteadyBranch) -> SteadyBranch:
    # b starts where a ends; drop the duplicated node
    return SteadyBranch(np.concatenate((a.x_grid, b.x_grid[1:])),
                        np.concatenate((a.rho, b.rho[1:])),
                        np.concatenate((a.u, b.u[1:])), a.regime)


def steady_jump(left: GasState) -> GasState:
    """Right state of a standing shock."""
    return GasState(left.rho * left.u ** 2, 1.0 / left.u)


def shock_branches(p: NozzleProfile, inlet: GasState, s: float, steps_per_unit: float = 2000.0,
                   tol_sonic: float = TOL_SONIC):
    """Supersonic branch on [0, s] and subsonic branch on [s, L] for a shock at s."""
    sup = integrate_branch(p, inlet, 0.0, s, _n_steps(s, steps_per_unit), tol_sonic)
    left = GasState(float(sup.rho[-1]), float(sup.u[-1]))
    sub = integrate_branch(p, steady_jump(left), s, p.length,
                           _n_steps(p.length - s, steps_per_unit), tol_sonic)
    return sup, sub


def exit_density_for_shock(p: NozzleProfile, inlet: GasState, s: float,
                           steps_per_unit: float = 2000.0, tol_sonic: float = TOL_SONIC) -> float:
    """Forward evaluation: exit density produced by a standing shock at s."""
    return float(shock_branches(p, inlet, s, steps_per_unit, tol_sonic)[1].rho[-1])


@dataclass(frozen=True)
class FitOptions:
    fit_tol: float = 1e-10
    max_iter: int = 200
    steps_per_unit: float = 2000.0
    eps: float = 1e-3
    delta: float | None = None
    xtol: float = 1e-13
    tol_sonic: float = TOL_SONIC


@dataclass(frozen=True)
class SteadyTransonicSolution:
    """Fitted steady transonic shock with both branches extended past x*."""

    profile: NozzleProfile
    inlet: GasState
    x_star: float
    supersonic: SteadyBranch
    subsonic: SteadyBranch
    delta: float
    exit_density_target: float
    fit_residual: float = 0.0
    iterations: int = 0
    attainable: tuple[float, float] = (math.nan, math.nan)
    direction: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def rho_l(self) -> float:
        return float(self.supersonic.at(self.x_star)[0])

    @property
    def u_l(self) -> float:
        return float(self.supersonic.at(self.x_star)[1])

    def arrays(self, x, side: Side):
        branch = self.supersonic if side is Side.LEFT else self.subsonic
        return branch.at(x)


def default_delta(x_star: float, length: float, eps: float) -> float:
    cap = 0.5 * min(x_star, length - x_star)
    if eps <= 0.0:
        return cap
    return min(2.0 * math.sqrt(eps), cap)


def fit_transonic(p: NozzleProfile, inlet: GasState, exit_density: float,
                  opts: FitOptions | None = None) -> SteadyTransonicSolution:
    """Bisect on the shock position until the exit density matches.

    Raises
    ------
    ExitDensityUnattainable
        Target outside the exit densities reachable with 0 < s < L.
    NonMonotoneResidual
        Residual has the same sign at both ends of a bracket.
    """
    opts = opts or FitOptions()
    L = p.length
    spu, tol = opts.steps_per_unit, opts.tol_sonic

    def f(s):
        return exit_density_for_shock(p, inlet, s, spu, tol)

    lo, hi = 1e-4 * L, (1.0 - 1e-4) * L
    f_lo, f_hi = f(lo), f(hi)
    interval = (min(f_lo, f_hi), max(f_lo, f_hi))
    if not (interval[0] <= exit_density <= interval[1]):
        raise ExitDensityUnattainable(
            f"exit density {exit_density:.12g} outside attainable interval "
            f"[{interval[0]:.12g}, {interval[1]:.12g}]", interval)
    r_lo, r_hi = f_lo - exit_density, f_hi - exit_density
    if r_lo * r_hi > 0.0:
        raise NonMonotoneResidual("bisection bracket has residuals of equal sign")
    increasing = f_hi > f_lo
    mid, r_mid, it = lo, r_lo, 0
    for it in range(1, opts.max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if not (min(f_lo, f_hi) <= f_mid <= max(f_lo, f_hi)):
            raise NonMonotoneResidual(f"exit density {f_mid} at s={mid} leaves the bracket values")
        r_mid = f_mid - exit_density
        if r_mid == 0.0:
            break
        if (r_mid > 0.0) == increasing:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
        if abs(r_mid) < opts.fit_tol and hi - lo < opts.xtol * L:
            break
    if not abs(r_mid) < opts.fit_tol:
        raise NonMonotoneResidual(f"bisection stalled with residual {r_mid:.3e}")
    x_star = mid
    delta = opts.delta if opts.delta is not None else default_delta(x_star, L, opts.eps)
    sup, sub = shock_branches(p, inlet, x_star, spu, tol)
    left_end = GasState(float(sup.rho[-1]), float(sup.u[-1]))
    sup_ext = integrate_branch(p, left_end, x_star, x_star + delta, _n_steps(delta, spu), tol)
    right_start = GasState(float(sub.rho[0]), float(sub.u[0]))
    sub_ext = integrate_branch(p, right_start, x_star, x_star - delta, _n_steps(delta, spu), tol)
    return SteadyTransonicSolution(
        profile=p, inlet=inlet, x_star=x_star,
        supersonic=_join(sup, sup_ext), subsonic=_join(sub_ext, sub),
        delta=delta, exit_density_target=float(exit_density), fit_residual=float(r_mid),
        iterations=it, attainable=interval,
        direction="increasing" if increasing else "decreasing")


def background_at(sol: SteadyTransonicSolution, x: float, side: Side) -> GasState:
    r, u = sol.arrays(x, side)
    return GasState(float(r), float(u))
