"""Periodic orbits of dissipative forced scalar ODEs.

Solves psi' = Xi(psi, w1(t, psi), w2(t, psi), w3(t, psi)) for its unique
T-periodic solution via the period map of the flow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BracketEscape, NoConvergence


def _zero(t, psi):
    return 0.0


@dataclass
class ForcedScalarODE:
    """Forced scalar ODE with a dissipative equilibrium at the origin.

    Parameters
    ----------
    xi : callable
        ``xi(psi, w1, w2, w3)``.
    dxi_dpsi : float
        Analytic partial of ``xi`` in ``psi`` at the origin (negative).
    dxi_dw : sequence of 3 floats
        Analytic partials in the forcing slots at the origin.
    forcings : sequence of 3 callables
        ``w_i(t, psi)``, T-periodic in ``t``.
    period : float
    rhs : callable, optional
        Fused ``rhs(t, psi)`` evaluator; defaults to composing the above.
    flow : callable, optional
        ``flow(t0, x0, tau, n_steps)`` returning all RK4 samples; lets
        callers supply a compiled integrator for ``rhs``.
    """

    xi: Callable
    dxi_dpsi: float
    dxi_dw: Sequence[float]
    forcings: Sequence[Callable] = (_zero, _zero, _zero)
    period: float = 2.0 * math.pi
    rhs: Callable | None = None
    flow: Callable | None = None

    def __post_init__(self):
        if len(self.forcings) != 3 or len(self.dxi_dw) != 3:
            raise ValueError("need exactly three forcings and three forcing partials")
        if not self.dxi_dpsi < 0.0:
            raise ValueError(f"dXi/dpsi at the origin must be negative, got {self.dxi_dpsi}")
        if abs(self.xi(0.0, 0.0, 0.0, 0.0)) > 1e-12:
            raise ValueError("Xi(0, 0, 0, 0) must vanish")
        if self.rhs is None:
            w1, w2, w3 = self.forcings
            xi = self.xi
            self.rhs = lambda t, psi: xi(psi, w1(t, psi), w2(t, psi), w3(t, psi))
        if self.flow is None:
            rhs = self.rhs
            self.flow = lambda t0, x0, tau, n_steps: _rk4(rhs, t0, x0, tau, n_steps, keep=True)

    @property
    def xi_psi0(self) -> float:
        return abs(self.dxi_dpsi)

    @property
    def xi_w0(self) -> list[float]:
        return [1.0 + abs(d) for d in self.dxi_dw]


@dataclass(frozen=True)
class FindOptions:
    fp_tol: float = 1e-12
    max_iter: int = 100
    n_steps: int = 4096
    safety_factor: float = 1.5
    start: str = "left"
    n_psi_samples: int = 5
    bisect_threshold: float = 0.98


@dataclass
class PeriodicOrbit:
    t_grid: np.ndarray
    psi: np.ndarray
    psi_dot: np.ndarray
    psi_ddot: np.ndarray
    sigma_star: float
    x_star: float = 0.0
    residual: float = 0.0
    map_derivative: float = math.nan
    iterations: int = 0
    method: str = ""
    info: dict = field(default_factory=dict)


def _rk4(rhs, t0, x0, tau, n_steps, keep=False):
    h = tau / n_steps
    x = float(x0)
    out = [x] if keep else None
    for i in range(n_steps):
        t = t0 + i * h
        k1 = rhs(t, x)
        k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = rhs(t + h, x + h * k3)
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if keep:
            out.append(x)
    return np.array(out) if keep else x


def stream(ode: ForcedScalarODE, t0: float, x0: float, tau: float, n_steps: int = 4096) -> float:
    """RK4 value at ``t0 + tau`` of the solution through ``(t0, x0)``."""
    if n_steps < 16:
        raise ValueError("stream needs n_steps >= 16")
    if tau == 0.0:
        return float(x0)
    return float(ode.flow(t0, x0, tau, n_steps)[-1])


def _forcing_sup(ode, psis, n_t=512, fn=None):
    ts = np.linspace(0.0, ode.period, n_t, endpoint=False)
    sups = []
    for w in ode.forcings:
        m = 0.0
        for p in psis:
            for t in ts:
                m = max(m, abs(fn(w, t, p) if fn else w(t, p)))
        sups.append(m)
    return sups


def bracket_radius(ode: ForcedScalarODE, safety_factor: float = 1.5, n_steps: int = 4096,
                   check: bool = True) -> float:
    """Radius of an interval the period map sends into itself.

    Raises
    ------
    BracketEscape
        If the flow from an endpoint leaves the interval after one period.
    """
    sups = _forcing_sup(ode, [0.0])
    sigma = safety_factor / ode.xi_psi0 * sum(c * s for c, s in zip(ode.xi_w0, sups))
    if check and sigma > 0.0:
        lo = stream(ode, 0.0, -sigma, ode.period, n_steps)
        hi = stream(ode, 0.0, sigma, ode.period, n_steps)
        if not (-sigma <= lo <= sigma and -sigma <= hi <= sigma):
            raise BracketEscape(f"period map leaves [-{sigma:.3e}, {sigma:.3e}]: "
                                f"P(-s)={lo:.3e}, P(s)={hi:.3e}")
    return float(sigma)


def _poincare_fixed_point(P, sigma, x0, opts):
    """Aitken-accelerated fixed-point iteration of the period map."""
    x = x0
    hist = []
    for it in range(1, opts.max_iter + 1):
        p1 = P(x)
        r = abs(p1 - x)
        hist.append(r)
        if r < opts.fp_tol:
            return x, r, it
        p2 = P(p1)
        den = p2 - 2.0 * p1 + x
        x_new = x - (p1 - x) ** 2 / den if den != 0.0 else p2
        if not math.isfinite(x_new) or abs(x_new) > 2.0 * sigma + 1e-300:
            x_new = p2
        x = x_new
    raise NoConvergence(f"period map iteration did not reach {opts.fp_tol} "
                        f"(last residual {hist[-1]:.3e})")


def _bisect(P, sigma, opts):
    lo, hi = -sigma, sigma
    g_lo = P(lo) - lo
    for it in range(1, 200):
        mid = 0.5 * (lo + hi)
        g = P(mid) - mid
        if abs(g) < opts.fp_tol or hi - lo < 1e-16:
            return mid, abs(g), it
        if (g > 0.0) == (g_lo > 0.0):
            lo, g_lo = mid, g
        else:
            hi = mid
    raise NoConvergence("bisection on the period map failed")


def find_periodic(ode: ForcedScalarODE, opts: FindOptions | None = None,
                  sigma_star: float | None = None) -> PeriodicOrbit:
    """Unique T-periodic orbit of ``ode``.

    The fixed point is sought inside ``[-sigma*, sigma*]`` from the
    endpoint named by ``opts.start``.  Bisection takes over when the
    measured map derivative exceeds ``opts.bisect_threshold``.
    """
    opts = opts or FindOptions()
    T, n = ode.period, opts.n_steps
    sigma = bracket_radius(ode, opts.safety_factor, n) if sigma_star is None else sigma_star

    def P(x):
        return float(ode.flow(0.0, x, T, n)[-1])

    if sigma == 0.0 and abs(P(0.0)) < opts.fp_tol:
        x_fp, res, its, method = 0.0, abs(P(0.0)), 1, "equilibrium"
    else:
        x0 = -sigma if opts.start == "left" else sigma
        x_fp, res, its = _poincare_fixed_point(P, sigma, x0, opts)
        method = "aitken"
    h = max(1e-7, 1e-4 * sigma)
    deriv = (P(x_fp + h) - P(x_fp - h)) / (2.0 * h)
    if deriv > opts.bisect_threshold and sigma > 0.0:
        x_fp, res, its = _bisect(P, sigma, opts)
        method = "bisection"
    psi = np.asarray(ode.flow(0.0, x_fp, T, n), dtype=float)
    t_grid = np.linspace(0.0, T, n + 1)
    rhs = ode.rhs
    psi_dot = np.array([rhs(t, p) for t, p in zip(t_grid, psi)])
    dt = T / 4096.0
    # total derivative of the right-hand side along the orbit
    psi_ddot = np.array([(rhs(t + dt, p + dt * d) - rhs(t - dt, p - dt * d)) / (2.0 * dt)
                         for t, p, d in zip(t_grid, psi, psi_dot)])
    return PeriodicOrbit(t_grid, psi, psi_dot, psi_ddot, float(sigma), float(x_fp),
                         float(abs(psi[-1] - psi[0])), float(deriv), its, method)


def _psi_samples(sigma, k):
    return [0.0] if sigma == 0.0 or k <= 1 else list(np.linspace(-sigma, sigma, k))


def _forcing_norms(ode, sigma, k):
    psis = _psi_samples(sigma, k)
    w = _forcing_sup(ode, psis)
    h = ode.period / 4096.0
    wt = _forcing_sup(ode, psis, fn=lambda f, t, p: (f(t + h, p) - f(t - h, p)) / (2.0 * h))
    return w, wt


def verify_estimates(orbit: PeriodicOrbit, ode: ForcedScalarODE, slack: float = 0.25,
                     n_psi_samples: int = 5) -> dict:
    """Compare orbit norms with the three a-priori bounds."""
    a, c = ode.xi_psi0, ode.xi_w0
    w, wt = _forcing_norms(ode, orbit.sigma_star, n_psi_samples)
    sw = sum(ci * wi for ci, wi in zip(c, w))
    swt = sum(ci * wi for ci, wi in zip(c, wt))
    n0 = float(np.max(np.abs(orbit.psi)))
    n1 = float(np.max(np.abs(orbit.psi_dot)))
    n2 = float(np.max(np.abs(orbit.psi_ddot)))
    b0 = (1.0 + slack) / a * sw
    b1 = (1.0 + slack) * a * n0 + (1.0 + slack) * sw
    b2 = (2.0 + slack) * a * sw + (1.0 + slack) * swt
    checks = {
        "psi": {"measured": n0, "bound": b0, "pass": n0 <= b0},
        "psi_dot": {"measured": n1, "bound": b1, "pass": n1 <= b1},
        "psi_ddot": {"measured": n2, "bound": b2, "pass": n2 <= b2},
    }
    return {"slack": slack, "checks": checks, "pass": all(v["pass"] for v in checks.values())}


def compare_periodic(ode1: ForcedScalarODE, ode2: ForcedScalarODE, slack: float = 0.25,
                     opts: FindOptions | None = None, n_psi_samples: int = 5) -> dict:
    """Orbit difference of two forcings against the perturbation bounds."""
    if ode1.period != ode2.period:
        raise ValueError("both problems must share the period")
    o1, o2 = find_periodic(ode1, opts), find_periodic(ode2, opts)
    a, c, T = ode1.xi_psi0, ode1.xi_w0, ode1.period
    sigma = max(o1.sigma_star, o2.sigma_star)
    ts = np.linspace(0.0, T, 512, endpoint=False)
    dw = []
    for f1, f2 in zip(ode1.forcings, ode2.forcings):
        dw.append(max(abs(f1(t, p) - f2(t, p)) for t in ts for p in _psi_samples(sigma, n_psi_samples)))
    sdw = sum(ci * wi for ci, wi in zip(c, dw))
    d0 = float(np.max(np.abs(o1.psi - o2.psi)))
    d1 = float(np.max(np.abs(o1.psi_dot - o2.psi_dot)))
    g = math.exp(a * T)
    b0 = (1.0 + slack) * g / a * sdw
    b1 = (1.0 + slack) * g * sdw + (1.0 + slack) * sdw
    checks = {
        "diff": {"measured": d0, "bound": b0, "pass": d0 <= b0},
        "diff_dot": {"measured": d1, "bound": b1, "pass": d1 <= b1},
    }
    return {"slack": slack, "checks": checks, "pass": all(v["pass"] for v in checks.values()),
            "orbits": (o1, o2)}


def linear_oracle(eps: float, freq: float = 1.0, period: float = 2.0 * math.pi) -> ForcedScalarODE:
    """psi' = -psi + eps sin(freq t)."""
    return ForcedScalarODE(
        xi=lambda p, w1, w2, w3: -p + w1 + w2 + w3,
        dxi_dpsi=-1.0, dxi_dw=(1.0, 1.0, 1.0),
        forcings=(lambda t, p: eps * math.sin(freq * t), _zero, _zero),
        period=period)
