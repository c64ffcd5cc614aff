"""Time-periodic supersonic flow upstream of the shock.

Both characteristic speeds are positive, so the perturbation invariants
are marched in x from the inlet.  Inlet data start at t = 0 from the
steady state; after every characteristic has crossed the domain the
last period is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import OutOfDomain, SonicBreakdown
from .forcing import BoundaryForcing
from .gas import TOL_SONIC
from .steady import SteadyTransonicSolution


@dataclass(frozen=True)
class SupersonicGrids:
    n_t: int = 512
    n_x: int = 512
    n_iter: int = 3


@dataclass
class SupersonicPeriodicField:
    """Perturbations of the supersonic flow over one period.

    Arrays have shape ``(n_t + 1, n_x + 1)``; row ``n_t`` is t = T.
    ``phi1``, ``phi2`` are perturbations of the Riemann invariants.
    """

    period: float
    t_grid: np.ndarray
    x_grid: np.ndarray
    rho_bar: np.ndarray
    u_bar: np.ndarray
    dt_rho_bar: np.ndarray
    dx_rho_bar: np.ndarray
    dt_u_bar: np.ndarray
    dx_u_bar: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    periodicity_defect: float = 0.0
    sup_over_eps: float = math.nan
    window_periods: int = 0

    @property
    def n_t(self) -> int:
        return self.t_grid.size - 1

    @property
    def hx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    def sample(self, name: str, t, x):
        """Bicubic sample (periodic in t) of one stored array."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xa < self.x_grid[0] - 1e-12) or np.any(xa > self.x_grid[-1] + 1e-12):
            raise OutOfDomain(f"x outside supersonic field [0, {self.x_grid[-1]}]")
        ta = np.broadcast_to(np.asarray(t, dtype=float), xa.shape).astype(float)
        arr = getattr(self, name)
        out = kernels.bicubic(arr, self.n_t, self.period, float(self.x_grid[0]), self.hx,
                              np.ascontiguousarray(ta), np.ascontiguousarray(xa))
        return float(out[0]) if np.ndim(x) == 0 else out


def _inlet_invariants(background, forcing, t):
    rho0 = background.inlet.rho
    rho = rho0 + forcing.rho_bar_l(t)
    if np.any(rho <= 0.0):
        raise SonicBreakdown("inlet density perturbation produces vacuum")
    lr = np.log(rho / rho0)
    du = forcing.u_bar_l(t)
    return du - lr, du + lr


def solve_supersonic_periodic(p, background: SteadyTransonicSolution, forcing: BoundaryForcing,
                              grids: SupersonicGrids | None = None,
                              tol_sonic: float = TOL_SONIC) -> SupersonicPeriodicField:
    """March the supersonic perturbation field over the flush window.

    Parameters
    ----------
    p : NozzleProfile
    background : SteadyTransonicSolution
    forcing : BoundaryForcing
    grids : SupersonicGrids, optional
    """
    grids = grids or SupersonicGrids()
    n_t, n_x = grids.n_t, grids.n_x
    T = forcing.period
    sup = background.supersonic
    xs = np.linspace(0.0, float(sup.x_grid[-1]), n_x + 1)
    hx = float(xs[1] - xs[0])
    rho_s, u_s = sup.at(xs)
    slope = np.asarray(p.slope(xs), dtype=float)
    t_cross = float(xs[-1] * np.max(1.0 / (u_s - 1.0)))
    n_per = int(math.ceil(t_cross / T)) + 1
    nw = n_per * n_t
    dt = T / n_t
    tw = np.arange(nw + 1) * dt
    in1, in2 = _inlet_invariants(background, forcing, tw)
    p1, p2, status = kernels.march_supersonic(np.ascontiguousarray(in1), np.ascontiguousarray(in2),
                                              dt, u_s, slope, hx, tol_sonic, grids.n_iter)
    if status:
        raise SonicBreakdown("a supersonic characteristic reached the sonic tolerance")
    u_pert = 0.5 * (p1 + p2)
    r_pert = rho_s[None, :] * np.expm1(0.5 * (p2 - p1))
    dt_r = np.gradient(r_pert, dt, axis=0)
    dt_u = np.gradient(u_pert, dt, axis=0)
    keep = slice(nw - n_t, nw + 1)

    def last(a):
        return np.ascontiguousarray(a[keep])

    rb, ub = last(r_pert), last(u_pert)
    defect = float(max(np.max(np.abs(rb[0] - rb[-1])), np.max(np.abs(ub[0] - ub[-1]))))
    dx_r = np.gradient(rb, hx, axis=1, edge_order=2)
    dx_u = np.gradient(ub, hx, axis=1, edge_order=2)
    arrays = (rb, ub, last(dt_r), dx_r, last(dt_u), dx_u)
    sup_norm = max(float(np.max(np.abs(a))) for a in arrays)
    return SupersonicPeriodicField(
        period=T, t_grid=np.linspace(0.0, T, n_t + 1), x_grid=xs,
        rho_bar=rb, u_bar=ub, dt_rho_bar=arrays[2], dx_rho_bar=dx_r,
        dt_u_bar=arrays[4], dx_u_bar=dx_u, phi1=last(p1), phi2=last(p2),
        periodicity_defect=defect,
        sup_over_eps=sup_norm / forcing.eps if forcing.eps > 0 else math.nan,
        window_periods=n_per)


def sample_forcing_at_shock(field: SupersonicPeriodicField, t, x) -> dict:
    """Perturbation values and first derivatives at ``(t mod T, x)``."""
    names = ("rho_bar", "u_bar", "dt_rho_bar", "dx_rho_bar", "dt_u_bar", "dx_u_bar")
    return {n: field.sample(n, t, x) for n in names}
