"""Time-periodic boundary perturbations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Waveform:
    """Unit-amplitude trigonometric polynomial.

    ``harmonics`` holds ``(k, a_k, b_k)`` triples for
    ``sum a_k cos(2 pi k t / T) + b_k sin(2 pi k t / T)``.
    """

    harmonics: tuple[tuple[int, float, float], ...] = ()

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def sine(cls, scale=1.0, k=1):
        return cls(((int(k), 0.0, float(scale)),))

    @classmethod
    def cosine(cls, scale=1.0, k=1):
        return cls(((int(k), float(scale), 0.0),))

    def value(self, t, period):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k, a, b in self.harmonics:
            w = 2.0 * math.pi * k / period
            out = out + a * np.cos(w * t) + b * np.sin(w * t)
        return out

    def deriv(self, t, period):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k, a, b in self.harmonics:
            w = 2.0 * math.pi * k / period
            out = out + w * (-a * np.sin(w * t) + b * np.cos(w * t))
        return out

    @property
    def is_zero(self) -> bool:
        return all(a == 0.0 and b == 0.0 for _, a, b in self.harmonics)


@dataclass(frozen=True)
class BoundaryForcing:
    """Inlet perturbations of density and velocity plus the exit density perturbation.

    Each boundary function is ``eps * waveform(t)``.  The measured C1
    norms (value and derivative sup on a fine grid) are in ``c1_norms``.
    """

    period: float
    eps: float
    rho_l: Waveform = field(default_factory=Waveform.zero)
    u_l: Waveform = field(default_factory=Waveform.zero)
    rho_r: Waveform = field(default_factory=Waveform.zero)

    def __post_init__(self):
        if not self.period > 0.0:
            raise ValueError("forcing period must be positive")
        if self.eps < 0.0:
            raise ValueError("forcing amplitude must be non-negative")

    def rho_bar_l(self, t):
        return self.eps * self.rho_l.value(t, self.period)

    def u_bar_l(self, t):
        return self.eps * self.u_l.value(t, self.period)

    def rho_bar_r(self, t):
        return self.eps * self.rho_r.value(t, self.period)

    def d_rho_bar_l(self, t):
        return self.eps * self.rho_l.deriv(t, self.period)

    def d_u_bar_l(self, t):
        return self.eps * self.u_l.deriv(t, self.period)

    def d_rho_bar_r(self, t):
        return self.eps * self.rho_r.deriv(t, self.period)

    @property
    def is_zero(self) -> bool:
        return self.eps == 0.0 or all(w.is_zero for w in (self.rho_l, self.u_l, self.rho_r))

    def c1_norms(self, n: int = 4096) -> dict:
        ts = np.linspace(0.0, self.period, n, endpoint=False)
        out = {}
        for name in ("rho_l", "u_l", "rho_r"):
            w = getattr(self, name)
            out[name] = float(max(np.max(np.abs(self.eps * w.value(ts, self.period))),
                                  np.max(np.abs(self.eps * w.deriv(ts, self.period)))))
        return out

    def periodicity_defect(self, n: int = 257) -> float:
        ts = np.linspace(0.0, self.period, n)
        d = 0.0
        for f in (self.rho_bar_l, self.u_bar_l, self.rho_bar_r):
            d = max(d, float(np.max(np.abs(f(ts + self.period) - f(ts)))))
        return d

    def scaled(self, factor: float) -> "BoundaryForcing":
        return BoundaryForcing(self.period, self.eps * factor, self.rho_l, self.u_l, self.rho_r)
