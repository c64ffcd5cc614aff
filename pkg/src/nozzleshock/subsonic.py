"""Free-boundary iteration for the time-periodic subsonic flow and shock.

Each iteration solves two frozen-coefficient transport problems for the
scaled perturbation invariants behind the shock (``transport_step``)
and then the periodic shock ODE driven by the new field
(``shock_step``).  Transport is marched across x columns on a periodic
t grid, which is natural because every characteristic in the subsonic
region is transversal to the lines x = const.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import (BracketEscape, CharacteristicEscape, NoContraction, NonConvergence,
                     OutOfDomain, ShockLeftDomain, SonicBreakdown, VacuumAtExit)
from .forcing import BoundaryForcing
from .gas import TOL_SONIC, GasState
from .periodic_ode import FindOptions, ForcedScalarODE, bracket_radius, find_periodic, stream
from .shock import ScalingConfig, eval_G, lax_admissible, linearization, rh_residuals
from .steady import SteadyTransonicSolution
from .supersonic import SupersonicPeriodicField


@dataclass(frozen=True)
class IterationOptions:
    """Grids and tolerances of the free-boundary iteration.

    ``conv_tol=None`` means ``1e-10 * max(eps, 1e-6)``; ``delta_ext=None``
    means ``sqrt(eps)`` capped by half the distance from x* to the
    nearer end of the nozzle.  ``freeze_speeds`` takes the characteristic
    speeds from the background instead of the previous iterate.
    """

    n_t: int = 512
    n_x: int = 512
    conv_tol: float | None = None
    max_iter: int = 60
    ode_substeps: int = 8
    fp_tol: float = 1e-15
    crossing_tol: float = 1e-14
    delta_ext: float | None = None
    exact_trace: bool = True
    freeze_speeds: bool = False
    tol_sonic: float = TOL_SONIC
    moduli_deltas: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025, 0.0125)


@dataclass
class PeriodicField:
    """Scaled perturbation invariants on the extended subsonic domain.

    Arrays have shape ``(n_t + 1, n_x + 1)``; row ``n_t`` is t = T.
    """

    period: float
    t_grid: np.ndarray
    x_grid: np.ndarray
    phi1_hat: np.ndarray
    phi2_hat: np.ndarray
    dt_phi1: np.ndarray
    dx_phi1: np.ndarray
    dt_phi2: np.ndarray
    dx_phi2: np.ndarray
    alpha: float

    @property
    def n_t(self) -> int:
        return self.t_grid.size - 1

    @property
    def hx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    def U(self) -> np.ndarray:
        return 0.5 * (self.alpha * self.phi2_hat - self.phi1_hat)

    def sample(self, name: str, t, x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xa < self.x_grid[0] - 1e-12) or np.any(xa > self.x_grid[-1] + 1e-12):
            raise OutOfDomain("x outside the subsonic field")
        ta = np.broadcast_to(np.asarray(t, dtype=float), xa.shape).astype(float)
        arr = self.U() if name == "U" else getattr(self, name)
        out = kernels.bicubic(np.ascontiguousarray(arr), self.n_t, self.period,
                              float(self.x_grid[0]), self.hx,
                              np.ascontiguousarray(ta), np.ascontiguousarray(xa))
        return float(out[0]) if np.ndim(x) == 0 else out

    def sup_distance(self, other: "PeriodicField") -> float:
        return float(max(np.max(np.abs(self.phi1_hat - other.phi1_hat)),
                         np.max(np.abs(self.phi2_hat - other.phi2_hat))))

    def c1_norm(self) -> float:
        return float(max(np.max(np.abs(a)) for a in (
            self.phi1_hat, self.phi2_hat, self.dt_phi1, self.dx_phi1, self.dt_phi2, self.dx_phi2)))


@dataclass
class ShockCurve:
    period: float
    t_grid: np.ndarray
    gamma: np.ndarray
    gamma_dot: np.ndarray
    gamma_ddot: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def n_t(self) -> int:
        return self.t_grid.size - 1

    def at(self, t, name: str = "gamma"):
        arr = np.ascontiguousarray(getattr(self, name)[:-1])
        ta = np.atleast_1d(np.asarray(t, dtype=float))
        out = kernels.periodic_cubic(arr, self.n_t, self.period, np.ascontiguousarray(ta))
        return float(out[0]) if np.ndim(t) == 0 else out

    def c2_norm(self, x_star: float) -> float:
        return float(np.max(np.abs(self.gamma - x_star)) + np.max(np.abs(self.gamma_dot))
                     + np.max(np.abs(self.gamma_ddot)))


def default_delta_ext(x_star, length, eps, available):
    cap = 0.5 * min(x_star, length - x_star)
    d = math.sqrt(eps) if eps > 0.0 else cap
    return min(d, cap, available)


def exit_forcing_phi(forcing: BoundaryForcing, background: SteadyTransonicSolution):
    """Evaluator of the exit boundary data 2 ln(rho*(L) / (rho*(L) + rho_bar_r(t)))."""
    rho_L = float(background.subsonic.rho[-1])
    ts = np.linspace(0.0, forcing.period, 4097)
    if np.min(rho_L + forcing.rho_bar_r(ts)) <= 0.0:
        raise VacuumAtExit("exit density perturbation reaches vacuum")

    def phi(t):
        r = rho_L + forcing.rho_bar_r(t)
        if np.any(r <= 0.0):
            raise VacuumAtExit("exit density perturbation reaches vacuum")
        out = -2.0 * np.log1p(forcing.rho_bar_r(t) / rho_L)
        return float(out) if np.ndim(out) == 0 else out

    return phi


def _half_nodes(a):
    """Values at nodes and midpoints along axis 1 (4-point midpoint rule)."""
    n, m1 = a.shape
    out = np.empty((n, 2 * m1 - 1))
    out[:, ::2] = a
    mid = np.empty((n, m1 - 1))
    mid[:, 1:-1] = (-a[:, :-3] + 9.0 * a[:, 1:-2] + 9.0 * a[:, 2:-1] - a[:, 3:]) / 16.0
    mid[:, 0] = (5.0 * a[:, 0] + 15.0 * a[:, 1] - 5.0 * a[:, 2] + a[:, 3]) / 16.0
    mid[:, -1] = (5.0 * a[:, -1] + 15.0 * a[:, -2] - 5.0 * a[:, -3] + a[:, -4]) / 16.0
    out[:, 1::2] = mid
    return out


def _periodic_dt(a, dt):
    n = a.shape[0] - 1
    core = a[:n]
    d = (np.roll(core, -1, axis=0) - np.roll(core, 1, axis=0)) / (2.0 * dt)
    return np.vstack((d, d[:1]))


def _make_field(T, t_grid, x_grid, f1, f2, alpha):
    dt = T / (t_grid.size - 1)
    hx = float(x_grid[1] - x_grid[0])
    return PeriodicField(T, t_grid, x_grid, f1, f2,
                         _periodic_dt(f1, dt), np.gradient(f1, hx, axis=1, edge_order=2),
                         _periodic_dt(f2, dt), np.gradient(f2, hx, axis=1, edge_order=2), alpha)


def zero_field(background: SteadyTransonicSolution, period: float, alpha: float,
               opts: IterationOptions, eps: float) -> PeriodicField:
    L = background.profile.length
    d = opts.delta_ext if opts.delta_ext is not None else default_delta_ext(
        background.x_star, L, eps, background.delta)
    x_grid = np.linspace(background.x_star - d, L, opts.n_x + 1)
    t_grid = np.linspace(0.0, period, opts.n_t + 1)
    z = np.zeros((opts.n_t + 1, opts.n_x + 1))
    return _make_field(period, t_grid, x_grid, z, z.copy(), alpha)


def steady_curve(background: SteadyTransonicSolution, period: float, n_t: int) -> ShockCurve:
    t = np.linspace(0.0, period, n_t + 1)
    return ShockCurve(period, t, np.full(n_t + 1, background.x_star), np.zeros(n_t + 1),
                      np.zeros(n_t + 1))


def _coefficients(prev: PeriodicField, background, scaling, tol_sonic, freeze=False):
    n = prev.n_t
    a = scaling.alpha
    xh = np.linspace(prev.x_grid[0], prev.x_grid[-1], 2 * prev.x_grid.size - 1)
    f1 = _half_nodes(prev.phi1_hat[:n])
    f2 = _half_nodes(prev.phi2_hat[:n])
    _, us = background.subsonic.at(xh)
    k = background.profile.slope(xh)
    s = f1 + a * f2
    shift = np.zeros_like(s) if freeze else 0.5 * s
    lam1 = us - 1.0 + shift
    lam2 = us + 1.0 + shift
    if np.max(lam1) >= -tol_sonic or np.min(lam2) <= tol_sonic:
        raise SonicBreakdown("subsonic characteristic speeds lost their signs")
    src1 = -k / (2.0 * us - 2.0) * s
    src2 = -k / (2.0 * us + 2.0) * s / a
    return (np.ascontiguousarray(1.0 / lam1), np.ascontiguousarray(src1 / lam1),
            np.ascontiguousarray(1.0 / lam2), np.ascontiguousarray(src2 / lam2))


def transport_step(prev: PeriodicField, prev_shock: ShockCurve, supersonic: SupersonicPeriodicField,
                   forcing: BoundaryForcing, background: SteadyTransonicSolution,
                   scaling: ScalingConfig, opts: IterationOptions | None = None) -> PeriodicField:
    """Solve the two linear transport problems with coefficients from ``prev``."""
    opts = opts or IterationOptions()
    n, T, a = prev.n_t, prev.period, scaling.alpha
    hx = prev.hx
    il1, r1, il2, r2 = _coefficients(prev, background, scaling, opts.tol_sonic,
                                       opts.freeze_speeds)
    tj = prev.t_grid
    start1 = exit_forcing_phi(forcing, background)(tj[:n]) + a * prev.phi2_hat[:n, -1]
    f1 = kernels.march_linear(il1, r1, n, T, np.ascontiguousarray(start1), hx, -1)

    if np.min(prev_shock.gamma) <= prev.x_grid[0] or np.max(prev_shock.gamma) >= prev.x_grid[-1]:
        raise CharacteristicEscape("shock curve left the extended subsonic domain")
    curve = np.ascontiguousarray(prev_shock.gamma[:n])
    t_hit, x_hit, integ, status = kernels.trace_to_curve(il2, r2, n, T, float(prev.x_grid[0]), hx,
                                                         curve, opts.crossing_tol)
    if status:
        raise CharacteristicEscape("a second-family characteristic missed the shock curve")
    v = prev_shock.at(t_hit, "gamma_dot")
    rb = supersonic.sample("rho_bar", t_hit, x_hit)
    ub = supersonic.sample("u_bar", t_hit, x_hit)
    trace = eval_G(background, x_hit, v, rb, ub, exact=opts.exact_trace) / a
    start2 = trace - integ
    f2 = kernels.march_linear(il2, r2, n, T, np.ascontiguousarray(start2[:n]), hx, 1)
    f2[n, 0] = start2[n]
    return _make_field(T, prev.t_grid, prev.x_grid, f1, f2, a)


def _shock_ode(field: PeriodicField, supersonic: SupersonicPeriodicField,
               background: SteadyTransonicSolution):
    if supersonic.n_t != field.n_t or supersonic.period != field.period:
        raise ValueError("supersonic and subsonic fields must share the t grid")
    lin = linearization(background)
    xs = background.x_star
    uf = np.ascontiguousarray(field.U())
    rf = np.ascontiguousarray(supersonic.rho_bar)
    vf = np.ascontiguousarray(supersonic.u_bar)
    sup, sub = background.supersonic, background.subsonic
    args = (uf, field.n_t, field.period, float(field.x_grid[0]), field.hx,
            rf, vf, float(supersonic.x_grid[0]), supersonic.hx,
            sup.x_grid, sup.u, sup.rho, sub.x_grid, sub.rho, xs)
    bs = kernels.bicubic_scalar

    def w1(t, p):
        return bs(uf, field.n_t, field.period, float(field.x_grid[0]), field.hx, t, xs + p)

    def w2(t, p):
        return bs(rf, supersonic.n_t, supersonic.period, float(supersonic.x_grid[0]), supersonic.hx, t, xs + p)

    def w3(t, p):
        return bs(vf, supersonic.n_t, supersonic.period, float(supersonic.x_grid[0]), supersonic.hx, t, xs + p)

    def xi(p, a1, a2, a3):
        # F at x* + psi; uses the branch interpolants like the fused kernel
        x = xs + p
        ulx = float(np.interp(x, sup.x_grid, sup.u))
        rlx = float(np.interp(x, sup.x_grid, sup.rho))
        rrx = float(np.interp(x, sub.x_grid, sub.rho))
        return ulx + a3 - math.sqrt(rrx / (rlx + a2)) * math.exp(0.5 * a1)

    def rhs(t, p):
        return kernels.shock_rhs(t, p, *args)

    def flow(t0, x0, tau, n_steps):
        return kernels.shock_flow(float(t0), float(x0), float(tau), int(n_steps), *args)

    return ForcedScalarODE(xi=xi, dxi_dpsi=lin.dF_dx, dxi_dw=(lin.dF_dU, lin.dF_drho, lin.dF_du),
                           forcings=(w1, w2, w3), period=field.period, rhs=rhs, flow=flow)


def _domain_radius(field, supersonic, background):
    xs = background.x_star
    lo = max(field.x_grid[0], background.subsonic.x_grid[0])
    hi = min(supersonic.x_grid[-1], background.supersonic.x_grid[-1])
    return 0.9 * min(xs - lo, hi - xs)


def shock_step(field: PeriodicField, supersonic: SupersonicPeriodicField,
               background: SteadyTransonicSolution, scaling: ScalingConfig | None = None,
               opts: IterationOptions | None = None) -> ShockCurve:
    """Periodic solution of the shock ODE driven by ``field``."""
    opts = opts or IterationOptions()
    ode = _shock_ode(field, supersonic, background)
    n_steps = opts.ode_substeps * field.n_t
    sigma = bracket_radius(ode, 1.5, n_steps, check=False)
    r_dom = _domain_radius(field, supersonic, background)
    clamped = sigma > r_dom
    sigma = min(sigma, r_dom)
    if sigma > 0.0:
        for x0 in (-sigma, sigma):
            xe = stream(ode, 0.0, x0, field.period, n_steps)
            if not -sigma <= xe <= sigma:
                raise BracketEscape(f"shock period map leaves [-{sigma:.3e}, {sigma:.3e}]")
    orbit = find_periodic(ode, FindOptions(fp_tol=opts.fp_tol, n_steps=n_steps), sigma_star=sigma)
    sl = slice(None, None, opts.ode_substeps)
    gamma = background.x_star + orbit.psi[sl]
    if np.min(gamma) <= 0.0 or np.max(gamma) >= background.profile.length:
        raise ShockLeftDomain("shock curve left (0, L)")
    if np.max(np.abs(orbit.psi)) > r_dom:
        raise ShockLeftDomain("shock curve left the extended domains of the background")
    return ShockCurve(field.period, field.t_grid.copy(), gamma, orbit.psi_dot[sl].copy(),
                      orbit.psi_ddot[sl].copy(),
                      info={"sigma_star": sigma, "sigma_clamped": clamped,
                            "map_derivative": orbit.map_derivative,
                            "fp_residual": orbit.residual, "method": orbit.method})


def modulus_of_continuity(field: PeriodicField, deltas) -> dict:
    """Grid-restricted moduli of continuity of the four derivative arrays."""
    dt = field.period / field.n_t
    hx = field.hx
    names = ("dt_phi1", "dx_phi1", "dt_phi2", "dx_phi2")
    table = {}
    for d in deltas:
        p = int(math.floor(d / dt + 1e-9))
        q = int(math.floor(d / hx + 1e-9))
        size = (p + 1, q + 1)
        row = {}
        for nm in names:
            a = getattr(field, nm)
            row[nm] = float(np.max(ndimage.maximum_filter(a, size=size, mode="nearest")
                                   - ndimage.minimum_filter(a, size=size, mode="nearest")))
        table[float(d)] = row
    return table


@dataclass
class IterationReport:
    d: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    c1_history: list = field(default_factory=list)
    shock_c2_history: list = field(default_factory=list)
    moduli: dict = field(default_factory=dict)
    rh_residual_max: float = math.nan
    lax_all: bool = True
    periodicity_defect: float = math.nan
    shock_periodicity_defect: float = math.nan
    exit_trace_error: float = math.nan
    iterations: int = 0
    converged: bool = False
    conv_tol: float = math.nan
    beta: float = math.nan
    beta_candidates: dict = field(default_factory=dict)
    ratios_below_beta: bool = True
    shock_info: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "d": self.d, "ratios": self.ratios, "c1_history": self.c1_history,
            "shock_c2_history": self.shock_c2_history,
            "moduli": {str(k): v for k, v in self.moduli.items()},
            "rh_residual_max": self.rh_residual_max, "lax_all": self.lax_all,
            "periodicity_defect": self.periodicity_defect,
            "shock_periodicity_defect": self.shock_periodicity_defect,
            "exit_trace_error": self.exit_trace_error, "iterations": self.iterations,
            "converged": self.converged, "conv_tol": self.conv_tol, "beta": self.beta,
            "beta_candidates": self.beta_candidates,
            "ratios_below_beta": self.ratios_below_beta,
            "shock_info": {k: (v if not isinstance(v, np.generic) else v.item())
                           for k, v in self.shock_info.items()},
        }


@dataclass
class TimePeriodicTransonicSolution:
    """Assembled periodic solution: supersonic field, subsonic field and shock."""

    background: SteadyTransonicSolution
    forcing: BoundaryForcing
    scaling: ScalingConfig
    supersonic: SupersonicPeriodicField
    subsonic: PeriodicField
    shock: ShockCurve
    rho_r: np.ndarray
    u_r: np.ndarray

    @property
    def period(self) -> float:
        return self.forcing.period

    def left_state(self, t, x):
        rs, us = self.background.supersonic.at(x)
        return (rs + self.supersonic.sample("rho_bar", t, x),
                us + self.supersonic.sample("u_bar", t, x))

    def right_state(self, t, x):
        rs, us = self.background.subsonic.at(x)
        f1 = self.subsonic.sample("phi1_hat", t, x)
        f2 = self.alpha * self.subsonic.sample("phi2_hat", t, x)
        return rs * np.exp(0.5 * (f2 - f1)), us + 0.5 * (f1 + f2)

    @property
    def alpha(self) -> float:
        return self.scaling.alpha

    def state(self, t, x):
        """Primitive (rho, u) at scalar t over an array of x."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        g = self.shock.at(t)
        left = xa < g
        rho = np.empty_like(xa)
        u = np.empty_like(xa)
        if left.any():
            rho[left], u[left] = self.left_state(t, xa[left])
        if (~left).any():
            rho[~left], u[~left] = self.right_state(t, xa[~left])
        return rho, u

    def shock_states(self):
        t = self.shock.t_grid
        g = self.shock.gamma
        rl, ul = self.left_state(t, g)
        rr, ur = self.right_state(t, g)
        return rl, ul, rr, ur

    def rh_residuals(self):
        rl, ul, rr, ur = self.shock_states()
        return rh_residuals(rl, ul, rr, ur, self.shock.gamma_dot)

    def lax_all(self) -> bool:
        rl, ul, rr, ur = self.shock_states()
        return all(lax_admissible(GasState(a, b), GasState(c, d), v)
                   for a, b, c, d, v in zip(rl, ul, rr, ur, self.shock.gamma_dot))

    def exit_trace_error(self) -> float:
        target = self.background.subsonic.rho[-1] + self.forcing.rho_bar_r(self.subsonic.t_grid)
        return float(np.max(np.abs(self.rho_r[:, -1] - target)))

    def periodicity_defect(self) -> float:
        f = self.subsonic
        return float(max(np.max(np.abs(f.phi1_hat[0] - f.phi1_hat[-1])),
                         np.max(np.abs(f.phi2_hat[0] - f.phi2_hat[-1]))))

    def shock_periodicity_defect(self) -> float:
        return float(abs(self.shock.gamma[0] - self.shock.gamma[-1]))

    def norms(self) -> dict:
        xs = self.background.x_star
        return {"phi_hat_sup": float(max(np.max(np.abs(self.subsonic.phi1_hat)),
                                         np.max(np.abs(self.subsonic.phi2_hat)))),
                "shock_sup": float(np.max(np.abs(self.shock.gamma - xs)))}


def assemble(background, forcing, scaling, supersonic, fld, shock) -> TimePeriodicTransonicSolution:
    rs, us = background.subsonic.at(fld.x_grid)
    f1 = fld.phi1_hat
    f2 = scaling.alpha * fld.phi2_hat
    rho = rs[None, :] * np.exp(0.5 * (f2 - f1))
    u = us[None, :] + 0.5 * (f1 + f2)
    return TimePeriodicTransonicSolution(background, forcing, scaling, supersonic, fld, shock, rho, u)


def _finish(sol, report, opts):
    r1, r2 = sol.rh_residuals()
    report.rh_residual_max = float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))
    report.lax_all = sol.lax_all()
    report.periodicity_defect = sol.periodicity_defect()
    report.shock_periodicity_defect = sol.shock_periodicity_defect()
    report.exit_trace_error = sol.exit_trace_error()
    report.moduli = modulus_of_continuity(sol.subsonic, opts.moduli_deltas)
    report.shock_info = dict(sol.shock.info)
    return sol, report


def run_iteration(background: SteadyTransonicSolution, supersonic: SupersonicPeriodicField,
                  forcing: BoundaryForcing, scaling: ScalingConfig,
                  opts: IterationOptions | None = None):
    """Alternate transport and shock steps from the steady seed.

    Returns
    -------
    (TimePeriodicTransonicSolution, IterationReport)

    Raises
    ------
    NoContraction
        A ratio of successive differences exceeds one from the third step on.
    NonConvergence
        ``conv_tol`` not reached within ``max_iter`` steps.
    """
    opts = opts or IterationOptions()
    eps = forcing.eps
    conv_tol = opts.conv_tol if opts.conv_tol is not None else 1e-10 * max(eps, 1e-6)
    b_lo = max((1.0 + scaling.alpha) / (2.0 * scaling.alpha) * scaling.M, scaling.alpha)
    report = IterationReport(conv_tol=conv_tol, beta=scaling.beta,
                             beta_candidates={"(1+alpha)M/(2alpha)":
                                              (1.0 + scaling.alpha) / (2.0 * scaling.alpha) * scaling.M,
                                              "alpha": scaling.alpha, "lower_bound": b_lo})
    T = forcing.period
    fld = zero_field(background, T, scaling.alpha, opts, eps)
    shock = steady_curve(background, T, opts.n_t)
    if forcing.is_zero:
        report.d = [0.0]
        report.iterations = 1
        report.converged = True
        report.c1_history = [0.0]
        report.shock_c2_history = [0.0]
        return _finish(assemble(background, forcing, scaling, supersonic, fld, shock), report, opts)
    for it in range(1, opts.max_iter + 1):
        new = transport_step(fld, shock, supersonic, forcing, background, scaling, opts)
        shock = shock_step(new, supersonic, background, scaling, opts)
        d = new.sup_distance(fld)
        fld = new
        report.d.append(d)
        report.c1_history.append(fld.c1_norm())
        report.shock_c2_history.append(shock.c2_norm(background.x_star))
        if len(report.d) >= 2 and report.d[-2] > 0.0:
            ratio = d / report.d[-2]
            report.ratios.append(ratio)
            if ratio > scaling.beta:
                report.ratios_below_beta = False
            if it >= 3 and ratio > 1.0:
                report.iterations = it
                raise NoContraction(f"iteration {it}: ratio d_n/d_(n-1) = {ratio:.4f} > 1")
        report.iterations = it
        if d < conv_tol:
            report.converged = True
            break
    if not report.converged:
        raise NonConvergence(f"no convergence to {conv_tol:.1e} in {opts.max_iter} iterations "
                             f"(last difference {report.d[-1]:.3e})")
    return _finish(assemble(background, forcing, scaling, supersonic, fld, shock), report, opts)
