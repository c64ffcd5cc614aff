"""Rankine-Hugoniot algebra, the shock boundary functions and scaling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DissipationTooWeak, DomainViolation, InvalidRelativeVelocity, NotCompressive
from .gas import GasState
from .steady import Side, SteadyTransonicSolution

REL_TOL = 1e-12


def rh_jump_moving(left: GasState, v: float, tol: float = REL_TOL) -> GasState:
    """Right state behind a shock of speed ``v`` with the given left state."""
    w = left.u - v
    if w <= tol:
        raise InvalidRelativeVelocity(f"relative velocity u_l - v = {w} must be positive")
    return GasState(left.rho * w * w, 1.0 / w + v)


def shock_speed_from_states(left: GasState, right: GasState) -> float:
    if not right.rho > left.rho:
        raise NotCompressive(f"need rho_r > rho_l, got {right.rho} <= {left.rho}")
    return left.u - math.sqrt(right.rho / left.rho)


def lax_admissible(left: GasState, right: GasState, v: float) -> bool:
    return bool(left.u - v > 1.0 and 0.0 < right.u - v < 1.0)


def rh_residuals(left_rho, left_u, right_rho, right_u, v):
    """Mass and momentum jump residuals ``[rho u] - v[rho]`` and ``[rho u^2 + rho] - v[rho u]``."""
    m_l, m_r = left_rho * left_u, right_rho * right_u
    r1 = (m_r - m_l) - v * (right_rho - left_rho)
    r2 = (m_r * right_u + right_rho - m_l * left_u - left_rho) - v * (m_r - m_l)
    return r1, r2


def _left(bg, x):
    return bg.arrays(x, Side.LEFT)


def _right(bg, x):
    return bg.arrays(x, Side.RIGHT)


def eval_G(background: SteadyTransonicSolution, x, v, rho_bar, u_bar, exact: bool = False):
    """Shock boundary function for the second perturbation invariant.

    With ``exact=False`` this is the closed form built on the left
    background at ``x``; it is exact at ``x = x*`` only.  ``exact=True``
    references the subsonic background at ``x`` instead, so the value is
    the true perturbation of the second invariant behind the moving
    shock at every ``x``.
    """
    rl, ul = _left(background, x)
    w = ul + u_bar - v
    r = rl + rho_bar
    if np.any(w <= 0.0) or np.any(r <= 0.0):
        raise DomainViolation("G needs u_l + u_bar - v > 0 and rho_l + rho_bar > 0")
    val = 1.0 / w + v + np.log(r * w * w)
    if exact:
        rr, ur = _right(background, x)
        val = val - (ur + np.log(rr))
    else:
        val = val - 1.0 / ul - np.log(rl * ul * ul)
    return float(val) if np.ndim(val) == 0 else val


def eval_F(background: SteadyTransonicSolution, x, U, rho_bar, u_bar):
    """Shock speed from the left perturbation and the subsonic mismatch U."""
    rl, ul = _left(background, x)
    rr, _ = _right(background, x)
    r = rl + rho_bar
    if np.any(r <= 0.0):
        raise DomainViolation("F needs rho_l + rho_bar > 0")
    val = ul + u_bar - np.sqrt(rr / r) * np.exp(0.5 * np.asarray(U))
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class LinearizationCoeffs:
    dG_dx: float
    dG_dv: float
    dG_drho: float
    dG_du: float
    dF_dx: float
    dF_dU: float
    dF_drho: float
    dF_du: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def linearization(background: SteadyTransonicSolution) -> LinearizationCoeffs:
    """Analytic partials of G and F at (x*, 0, 0, 0)."""
    xs = background.x_star
    u, r = background.u_l, background.rho_l
    k = float(background.profile.slope(xs))
    return LinearizationCoeffs(
        dG_dx=0.0,
        dG_dv=(u - 1.0) ** 2 / u ** 2,
        dG_drho=1.0 / r,
        dG_du=(2.0 * u - 1.0) / u ** 2,
        dF_dx=k * (-u / 2.0),
        dF_dU=-u / 2.0,
        dF_drho=u / (2.0 * r),
        dF_du=1.0,
    )


@dataclass(frozen=True)
class ScalingConfig:
    M: float
    alpha: float
    beta: float

    @property
    def alpha_interval(self) -> tuple[float, float]:
        return (self.M / (2.0 - self.M), 1.0)

    @property
    def beta_interval(self) -> tuple[float, float]:
        return (max((1.0 + self.alpha) / (2.0 * self.alpha) * self.M, self.alpha), 1.0)

    def as_dict(self) -> dict:
        return {"M": self.M, "alpha_interval": list(self.alpha_interval), "alpha": self.alpha,
                "beta_interval": list(self.beta_interval), "beta": self.beta}


def dissipation_number(u_inlet: float) -> float:
    return (u_inlet - 1.0) ** 2 / (2.0 * u_inlet)


def scaling_from_inlet(u_inlet: float, alpha: float | None = None,
                       beta: float | None = None) -> ScalingConfig:
    """M, alpha and beta from the inlet velocity, with optional overrides."""
    M = dissipation_number(u_inlet)
    if not M < 1.0:
        raise DissipationTooWeak(
            f"dissipation number M = (u-1)^2/(2u) = {M:.6g} must satisfy M < 1")
    a_lo = M / (2.0 - M)
    if alpha is None:
        alpha = 0.5 * (a_lo + 1.0)
    elif not (a_lo < alpha < 1.0):
        raise DissipationTooWeak(f"alpha = {alpha} must lie in (M/(2-M), 1) = ({a_lo:.6g}, 1)")
    b_lo = max((1.0 + alpha) / (2.0 * alpha) * M, alpha)
    if beta is None:
        beta = 0.5 * (b_lo + 1.0)
    elif not (b_lo < beta < 1.0):
        raise DissipationTooWeak(
            f"beta = {beta} must lie in (max((1+alpha)M/(2 alpha), alpha), 1) = ({b_lo:.6g}, 1)")
    return ScalingConfig(M, float(alpha), float(beta))


def scaling_config(background: SteadyTransonicSolution, alpha: float | None = None,
                   beta: float | None = None) -> ScalingConfig:
    return scaling_from_inlet(background.inlet.u, alpha, beta)


def scale_phi(phi, alpha):
    p1, p2 = phi
    return p1, np.asarray(p2) / alpha if np.ndim(p2) else p2 / alpha


def unscale_phi(phi_hat, alpha):
    p1, p2 = phi_hat
    return p1, np.asarray(p2) * alpha if np.ndim(p2) else p2 * alpha
