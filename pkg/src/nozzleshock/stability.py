"""Tracked-shock evolution from perturbed data and decay toward the periodic solution.

Both regions are advanced with a predictor-corrector semi-Lagrangian
scheme on the perturbation invariants about the steady branches.  The
supersonic region uses a fixed grid on which every characteristic moves
right, so it never needs the shock.  The subsonic region uses a grid
that moves with the shock, ``x = gamma + xi (L - gamma)``; the first
invariant arrives at the shock from the right and the jump conditions
then give the shock speed and the outgoing second invariant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (AdmissibilityLost, CharacteristicEscape, DomainViolation, ShockExitsDomain,
                     SonicBreakdown, WindowTooShort)
from .forcing import BoundaryForcing
from .gas import TOL_SONIC, GasState
from .shock import lax_admissible, linearization, rh_residuals, shock_speed_from_states
from .steady import SteadyTransonicSolution, integrate_branch, steady_jump
from .subsonic import TimePeriodicTransonicSolution, exit_forcing_phi
from .supersonic import _inlet_invariants


@dataclass(frozen=True)
class IbvpGrids:
    n_left: int = 128
    n_right: int = 128
    cfl: float = 0.5
    snapshot_dt: float = 0.02
    n_boundary: int = 4096
    tol_sonic: float = TOL_SONIC

    def refined(self, factor: int = 2) -> "IbvpGrids":
        return IbvpGrids(self.n_left * factor, self.n_right * factor, self.cfl, self.snapshot_dt,
                         self.n_boundary, self.tol_sonic)


@dataclass
class PiecewiseInitialData:
    """Initial data with a single shock at ``x_tilde``.

    The supersonic arrays live on the uniform grid ``x_left`` over
    ``[0, X]`` with ``X > x_tilde`` (the data beyond the shock is an
    extension that the supersonic update needs); the subsonic arrays
    live on a uniform grid over ``[x_tilde, L]``.
    """

    x_tilde: float
    x_left: np.ndarray
    rho_left: np.ndarray
    u_left: np.ndarray
    x_right: np.ndarray
    rho_right: np.ndarray
    u_right: np.ndarray
    perturbation_size: float = math.nan

    def __post_init__(self):
        if not self.x_left[0] < self.x_tilde < self.x_left[-1]:
            raise DomainViolation("shock position must lie inside the supersonic grid")
        if abs(self.x_right[0] - self.x_tilde) > 1e-12:
            raise DomainViolation("subsonic grid must start at the shock")
        if np.any(self.u_left <= 1.0) or np.any(self.rho_left <= 0.0):
            raise AdmissibilityLost("left initial data must be supersonic")
        if np.any(self.u_right >= 1.0) or np.any(self.u_right <= 0.0) or np.any(self.rho_right <= 0.0):
            raise AdmissibilityLost("right initial data must be subsonic")
        left, right = self.shock_traces()
        v = shock_speed_from_states(left, right)
        if not lax_admissible(left, right, v):
            raise AdmissibilityLost("initial shock is not admissible")

    def shock_traces(self) -> tuple[GasState, GasState]:
        h = self.x_left[1] - self.x_left[0]
        r = kernels.uniform_cubic(self.rho_left, float(self.x_left[0]), h, np.array([self.x_tilde]))
        u = kernels.uniform_cubic(self.u_left, float(self.x_left[0]), h, np.array([self.x_tilde]))
        return (GasState(float(r[0]), float(u[0])),
                GasState(float(self.rho_right[0]), float(self.u_right[0])))

    @property
    def left_states(self) -> list[GasState]:
        m = self.x_left < self.x_tilde
        return [GasState(float(r), float(u)) for r, u in zip(self.rho_left[m], self.u_left[m])]

    @property
    def right_states(self) -> list[GasState]:
        return [GasState(float(r), float(u)) for r, u in zip(self.rho_right, self.u_right)]


def _left_grid(background, n_left, x_end=None):
    x_end = float(background.supersonic.x_grid[-1]) if x_end is None else x_end
    return np.linspace(0.0, x_end, n_left + 1)


def _right_grid(x_tilde, length, n_right):
    x = np.linspace(x_tilde, length, n_right + 1)
    x[-1] = length
    return x


def _measure(init: PiecewiseInitialData, background: SteadyTransonicSolution) -> float:
    ml = init.x_left < init.x_tilde
    rl, ul = background.supersonic.at(init.x_left[ml])
    rr, ur = background.subsonic.at(init.x_right)
    return float(abs(init.x_tilde - background.x_star)
                 + max(np.max(np.abs(init.rho_left[ml] - rl)), np.max(np.abs(init.u_left[ml] - ul)))
                 + max(np.max(np.abs(init.rho_right - rr)), np.max(np.abs(init.u_right - ur))))


def initial_from_background(background: SteadyTransonicSolution, grids: IbvpGrids | None = None,
                            shift: float = 0.0) -> PiecewiseInitialData:
    """Steady supersonic data with a standing shock moved to ``x* + shift``.

    The subsonic side is the steady branch behind the displaced shock, so
    the data satisfy the jump conditions with zero speed; its exit density
    differs from the prescribed one.
    """
    grids = grids or IbvpGrids()
    xt = background.x_star + shift
    xl = _left_grid(background, grids.n_left)
    if not xl[0] < xt < xl[-1]:
        raise DomainViolation(f"shifted shock {xt} is outside the supersonic branch")
    rl, ul = background.supersonic.at(xl)
    left = GasState(*[float(a) for a in background.supersonic.at(xt)])
    xr = _right_grid(xt, background.profile.length, grids.n_right)
    sub = integrate_branch(background.profile, steady_jump(left), xt, background.profile.length,
                           8 * grids.n_right, grids.tol_sonic)
    init = PiecewiseInitialData(xt, xl, rl, ul, xr, sub.rho[::8].copy(), sub.u[::8].copy())
    init.perturbation_size = _measure(init, background)
    return init


def _bump(x, a, b):
    s = np.clip((x - a) / (b - a), 0.0, 1.0)
    return np.sin(np.pi * s) ** 4


def initial_from_periodic(periodic: TimePeriodicTransonicSolution, grids: IbvpGrids | None = None,
                          t0: float = 0.0, bump: float = 0.0) -> PiecewiseInitialData:
    """Snapshot of the periodic solution, optionally plus a smooth bump.

    ``bump`` adds ``bump * b(x)`` to both perturbation invariants on each
    side, where ``b`` is a C3 bump supported strictly inside that side.
    """
    grids = grids or IbvpGrids()
    bg = periodic.background
    sup = periodic.supersonic
    xt = float(periodic.shock.at(t0))
    xl = _left_grid(bg, grids.n_left, min(float(sup.x_grid[-1]), float(bg.supersonic.x_grid[-1])))
    p1 = sup.sample("phi1", t0, xl)
    p2 = sup.sample("phi2", t0, xl)
    xr = _right_grid(xt, bg.profile.length, grids.n_right)
    q1 = periodic.subsonic.sample("phi1_hat", t0, xr)
    q2 = periodic.alpha * periodic.subsonic.sample("phi2_hat", t0, xr)
    if bump:
        bl = bump * _bump(xl, 0.2 * xt, 0.8 * xt)
        p1, p2 = p1 + bl, p2 + bl
        br = bump * _bump(xr, xt + 0.2 * (bg.profile.length - xt), xt + 0.8 * (bg.profile.length - xt))
        q1, q2 = q1 + br, q2 + br
    rsl, usl = bg.supersonic.at(xl)
    rsr, usr = bg.subsonic.at(xr)
    init = PiecewiseInitialData(xt, xl, rsl * np.exp(0.5 * (p2 - p1)), usl + 0.5 * (p1 + p2),
                                xr, rsr * np.exp(0.5 * (q2 - q1)), usr + 0.5 * (q1 + q2))
    init.perturbation_size = _measure(init, bg)
    return init


@dataclass
class TrackedTrajectory:
    """Snapshots of a tracked-shock evolution.

    Fields in each region are perturbation invariants about the steady
    branches: ``left_phi*`` on the fixed grid ``x_left``, ``right_phi*``
    on the moving grid ``gamma + xi (L - gamma)``.
    """

    background: SteadyTransonicSolution
    forcing: BoundaryForcing
    t: np.ndarray
    gamma: np.ndarray
    gamma_dot: np.ndarray
    x_left: np.ndarray
    xi: np.ndarray
    left_phi1: np.ndarray
    left_phi2: np.ndarray
    right_phi1: np.ndarray
    right_phi2: np.ndarray
    dt: float
    n_steps: int
    initial_speed: float
    mass: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mass_defect: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def length(self) -> float:
        return self.background.profile.length

    def x_right(self, i: int) -> np.ndarray:
        x = self.gamma[i] + self.xi * (self.length - self.gamma[i])
        x[-1] = self.length
        return x

    def left_primitive(self, i: int):
        rs, us = self.background.supersonic.at(self.x_left)
        p1, p2 = self.left_phi1[i], self.left_phi2[i]
        return rs * np.exp(0.5 * (p2 - p1)), us + 0.5 * (p1 + p2)

    def right_primitive(self, i: int):
        rs, us = self.background.subsonic.at(self.x_right(i))
        p1, p2 = self.right_phi1[i], self.right_phi2[i]
        return rs * np.exp(0.5 * (p2 - p1)), us + 0.5 * (p1 + p2)

    def left_trace(self, i: int):
        x0, h = float(self.x_left[0]), float(self.x_left[1] - self.x_left[0])
        g = np.array([self.gamma[i]])
        p1 = float(kernels.uniform_cubic(self.left_phi1[i], x0, h, g)[0])
        p2 = float(kernels.uniform_cubic(self.left_phi2[i], x0, h, g)[0])
        rs, us = self.background.supersonic.at(self.gamma[i])
        return float(rs) * math.exp(0.5 * (p2 - p1)), float(us) + 0.5 * (p1 + p2)

    def shock_states(self):
        n = self.t.size
        out = np.empty((4, n))
        for i in range(n):
            out[0, i], out[1, i] = self.left_trace(i)
            r, u = self.right_primitive(i)
            out[2, i], out[3, i] = r[0], u[0]
        return out

    def rh_residuals(self):
        rl, ul, rr, ur = self.shock_states()
        return rh_residuals(rl, ul, rr, ur, self.gamma_dot)

    def lax_all(self) -> bool:
        rl, ul, rr, ur = self.shock_states()
        return all(lax_admissible(GasState(a, b), GasState(c, d), v)
                   for a, b, c, d, v in zip(rl, ul, rr, ur, self.gamma_dot))


def background_table(profile, branch, n: int):
    """Rows ``u*, rho*, -k/(2u*-2), -k/(2u*+2)`` on a uniform grid over the branch."""
    x = np.linspace(branch.x_grid[0], branch.x_grid[-1], n + 1)
    rho, u = branch.at(x)
    k = profile.slope(x)
    tab = np.ascontiguousarray(np.vstack((u, rho, -k / (2.0 * u - 2.0), -k / (2.0 * u + 2.0))))
    return tab, float(x[0]), float(x[1] - x[0])


def _mass_and_flux(profile, x_left, lp, gamma, xr, rp):
    rl, ul = lp
    rr, ur = rp
    xa = x_left[x_left < gamma]
    h = x_left[1] - x_left[0]
    ra = rl[: xa.size] * profile.area(xa)
    # last partial cell up to the shock, cubic trace of the left density
    rg = float(kernels.uniform_cubic(np.ascontiguousarray(rl * profile.area(x_left)),
                                     float(x_left[0]), h, np.array([gamma]))[0])
    m_left = np.trapezoid(ra, xa) + 0.5 * (ra[-1] + rg) * (gamma - xa[-1])
    m_right = np.trapezoid(rr * profile.area(xr), xr)
    f_in = float(profile.area(0.0) * rl[0] * ul[0])
    f_out = float(profile.area(profile.length) * rr[-1] * ur[-1])
    return m_left + m_right, f_in - f_out


def solve_ibvp(background: SteadyTransonicSolution, forcing: BoundaryForcing,
               init: PiecewiseInitialData, t_end: float, grids: IbvpGrids | None = None
               ) -> TrackedTrajectory:
    """Evolve ``init`` to ``t_end`` with the shock tracked as an interface.

    Raises
    ------
    ShockExitsDomain
        The shock leaves the part of (0, L) covered by both steady branches.
    SonicBreakdown
        A characteristic speed approaches zero.
    AdmissibilityLost
        The jump conditions lose their admissible root.
    """
    grids = grids or IbvpGrids()
    p = background.profile
    L = p.length
    xl = init.x_left
    lh = float(xl[1] - xl[0])
    nr = init.x_right.size - 1
    xi = np.linspace(0.0, 1.0, nr + 1)
    rs, us = background.supersonic.at(xl)
    l1 = (init.u_left - np.log(init.rho_left)) - (us - np.log(rs))
    l2 = (init.u_left + np.log(init.rho_left)) - (us + np.log(rs))
    rsr, usr = background.subsonic.at(init.x_right)
    r1 = (init.u_right - np.log(init.rho_right)) - (usr - np.log(rsr))
    r2 = (init.u_right + np.log(init.rho_right)) - (usr + np.log(rsr))
    left, right = init.shock_traces()
    v = shock_speed_from_states(left, right)

    T = forcing.period
    nb = grids.n_boundary
    tb = np.linspace(0.0, T, nb + 1)[:nb]
    in1, in2 = _inlet_invariants(background, forcing, tb)
    in1 = np.ascontiguousarray(np.broadcast_to(in1, tb.shape), dtype=float)
    in2 = np.ascontiguousarray(np.broadcast_to(in2, tb.shape), dtype=float)
    ex = np.ascontiguousarray(np.broadcast_to(exit_forcing_phi(forcing, background)(tb), tb.shape),
                              dtype=float)
    sup, sub = background.supersonic, background.subsonic
    g_lo = float(sub.x_grid[0]) + 4.0 * lh
    g_hi = float(xl[-1]) - 4.0 * lh
    if not g_lo < init.x_tilde < g_hi:
        raise DomainViolation(f"initial shock {init.x_tilde:.4f} outside the tracked band ({g_lo:.4f}, {g_hi:.4f});"
                              " refine the grids or shrink the displacement")

    lam_max = max(float(np.max(init.u_left)) + 1.0, float(np.max(init.u_right)) + 1.0)
    dx = min(lh, (L - init.x_tilde) / nr)
    n_steps = max(1, int(math.ceil(t_end * lam_max / (grids.cfl * dx) - 1e-9)))
    dt = t_end / n_steps
    every = max(1, int(round(grids.snapshot_dt / dt)))

    g = init.x_tilde
    ts, gs, vs, L1, L2, R1, R2 = [0.0], [g], [v], [l1.copy()], [l2.copy()], [r1.copy()], [r2.copy()]
    n_tab = 8 * max(grids.n_left, grids.n_right)
    args = (*background_table(p, sup, n_tab), *background_table(p, sub, n_tab),
            in1, in2, ex, nb, T, g_lo, g_hi, grids.tol_sonic)
    for n in range(n_steps):
        t = n * dt
        l1, l2, g, v, r1, r2, st = kernels.ibvp_step(t, dt, l1, l2, float(xl[0]), lh, g, v, r1, r2,
                                                     L, *args)
        if st:
            tn = t + dt
            if st == 1:
                raise SonicBreakdown(f"characteristic speed near zero at t = {tn:.4f}")
            if st == 2:
                raise ShockExitsDomain(f"shock at {g:.5f} left ({g_lo:.4f}, {g_hi:.4f}) at t = {tn:.4f}")
            if st == 3:
                raise AdmissibilityLost(f"no admissible shock state at t = {tn:.4f}")
            raise CharacteristicEscape(f"characteristic foot outside the domain at t = {tn:.4f}")
        if (n + 1) % every == 0 or n + 1 == n_steps:
            ts.append((n + 1) * dt)
            gs.append(g)
            vs.append(v)
            L1.append(l1)
            L2.append(l2)
            R1.append(r1)
            R2.append(r2)
    traj = TrackedTrajectory(background, forcing, np.array(ts), np.array(gs), np.array(vs), xl, xi,
                             np.array(L1), np.array(L2), np.array(R1), np.array(R2), dt, n_steps, vs[0])
    _mass_balance(traj)
    return traj


def _mass_balance(traj: TrackedTrajectory):
    p = traj.background.profile
    m = np.empty(traj.t.size)
    f = np.empty(traj.t.size)
    for i in range(traj.t.size):
        m[i], f[i] = _mass_and_flux(p, traj.x_left, traj.left_primitive(i),
                                    traj.gamma[i], traj.x_right(i), traj.right_primitive(i))
    net = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(traj.t))))
    traj.mass = m
    traj.mass_defect = (m - m[0]) - net


def compute_T0(periodic, tol_sonic: float = TOL_SONIC) -> float:
    """Decay window ``L * max sup |1/lambda_i|`` over the subsonic region.

    Accepts a periodic solution (its stored subsonic velocity to the right
    of the shock at each time) or a steady solution (the subsonic branch
    on ``[x*, L]``).
    """
    if isinstance(periodic, TimePeriodicTransonicSolution):
        xg = periodic.subsonic.x_grid
        mask = xg[None, :] >= periodic.shock.gamma[:, None]
        u = periodic.u_r[mask]
        length = periodic.background.profile.length
    else:
        xs = periodic.x_star
        sub = periodic.subsonic
        u = sub.u[sub.x_grid >= xs]
        length = periodic.profile.length
    return velocity_T0(u, length, tol_sonic)


def velocity_T0(u, length: float, tol_sonic: float = TOL_SONIC) -> float:
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u - 1.0) < tol_sonic):
        raise SonicBreakdown("subsonic velocity approaches the sound speed")
    return float(length * max(np.max(1.0 / np.abs(u - 1.0)), np.max(1.0 / np.abs(u + 1.0))))


@dataclass
class StabilityReport:
    T0: float
    t: np.ndarray
    theta: np.ndarray
    supersonic_gap: np.ndarray
    primitive_gap: np.ndarray
    shock_gap: np.ndarray
    shock_speed_gap: np.ndarray
    window_sup: np.ndarray
    window_factors: np.ndarray
    xi_fit: float
    xi_fit_defined: bool
    xi_theory: float
    xi_theory_terms: dict
    n_windows: int

    @property
    def decaying(self) -> bool:
        f = self.window_factors[1:]
        return bool(f.size > 0 and np.all(f < 1.0))

    def as_dict(self) -> dict:
        return {"T0": self.T0, "xi_fit": self.xi_fit, "xi_fit_defined": self.xi_fit_defined,
                "xi_theory": self.xi_theory, "xi_theory_terms": self.xi_theory_terms,
                "n_windows": self.n_windows, "window_sup": self.window_sup.tolist(),
                "window_factors": self.window_factors.tolist(), "decaying": self.decaying,
                "max_shock_gap": float(np.max(self.shock_gap)),
                "final_theta": float(self.theta[-1])}


def trajectory_distance(traj: TrackedTrajectory, periodic: TimePeriodicTransonicSolution) -> dict:
    """Per-snapshot distances to the periodic solution on the common domains.

    ``theta`` uses the scaled subsonic invariants on
    ``[max(gamma, gamma_T), L]``; ``supersonic_gap`` the supersonic
    invariants on ``[0, min(gamma, gamma_T)]``; ``primitive_gap`` the sum
    of density and velocity errors over both.
    """
    a = periodic.alpha
    n = traj.t.size
    theta = np.empty(n)
    sgap = np.empty(n)
    pgap = np.empty(n)
    gT = periodic.shock.at(traj.t)
    vT = periodic.shock.at(traj.t, "gamma_dot")
    for i in range(n):
        t = float(traj.t[i])
        xr = traj.x_right(i)
        m = xr >= gT[i]
        xm = xr[m]
        q1 = periodic.subsonic.sample("phi1_hat", t, xm)
        q2 = periodic.subsonic.sample("phi2_hat", t, xm)
        theta[i] = max(np.max(np.abs(traj.right_phi1[i][m] - q1)),
                       np.max(np.abs(traj.right_phi2[i][m] / a - q2)))
        ml = traj.x_left <= min(traj.gamma[i], gT[i])
        xlm = traj.x_left[ml]
        s1 = periodic.supersonic.sample("phi1", t, xlm)
        s2 = periodic.supersonic.sample("phi2", t, xlm)
        sgap[i] = max(np.max(np.abs(traj.left_phi1[i][ml] - s1)),
                      np.max(np.abs(traj.left_phi2[i][ml] - s2)))
        rl, ul = traj.left_primitive(i)
        rr, ur = traj.right_primitive(i)
        rTl, uTl = periodic.left_state(t, xlm)
        rTr, uTr = periodic.right_state(t, xm)
        pgap[i] = max(np.max(np.abs(rl[ml] - rTl) + np.abs(ul[ml] - uTl)),
                      np.max(np.abs(rr[m] - rTr) + np.abs(ur[m] - uTr)))
    return {"theta": theta, "supersonic_gap": sgap, "primitive_gap": pgap,
            "shock_gap": np.abs(traj.gamma - gT), "shock_speed_gap": np.abs(traj.gamma_dot - vT)}


def measure_decay(traj: TrackedTrajectory, periodic: TimePeriodicTransonicSolution,
                  T0: float | None = None, noise_floor: float = 1e-8) -> StabilityReport:
    """Distances of ``traj`` to ``periodic`` and per-window decay factors.

    The fit is flagged undefined when every window after the first is
    below ``noise_floor``.
    """
    T0 = compute_T0(periodic) if T0 is None else T0
    if traj.t[-1] < 3.0 * T0 - 1e-12:
        raise WindowTooShort(f"t_end = {traj.t[-1]:.3f} is shorter than 3 T0 = {3 * T0:.3f}")
    dist = trajectory_distance(traj, periodic)
    theta = dist["theta"]
    nw = int(math.floor(traj.t[-1] / T0 + 1e-9))
    wsup = np.array([np.max(theta[(traj.t >= l * T0) & (traj.t <= (l + 1) * T0)]) for l in range(nw)])
    with np.errstate(divide="ignore", invalid="ignore"):
        factors = wsup[1:] / wsup[:-1]
    later = wsup[1:]
    defined = bool(later.size >= 2 and np.all(later > noise_floor))
    if defined:
        slope = np.polyfit(np.arange(1, nw), np.log(later), 1)[0]
        xi_fit = float(math.exp(slope))
    else:
        xi_fit = math.nan
    lin = linearization(periodic.background)
    sc = periodic.scaling
    t1 = math.exp(lin.dF_dx * T0)
    t2 = sc.M * (1.0 + sc.alpha) / (2.0 * sc.alpha)
    return StabilityReport(
        T0=T0, t=traj.t, theta=theta, supersonic_gap=dist["supersonic_gap"],
        primitive_gap=dist["primitive_gap"], shock_gap=dist["shock_gap"],
        shock_speed_gap=dist["shock_speed_gap"],
        window_sup=wsup, window_factors=factors, xi_fit=xi_fit, xi_fit_defined=defined,
        xi_theory=max(t1, t2),
        xi_theory_terms={"exp(dF_dx*T0)": t1, "M(1+alpha)/(2alpha)": t2,
                         "o(eps) correction": "dropped"},
        n_windows=nw)
