"""Run configuration: JSON parsing, strict key checking and the assumption gate."""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import AssumptionViolation, ConfigError, DissipationTooWeak
from .forcing import BoundaryForcing, Waveform
from .gas import GasState
from .nozzle import Exponential, NozzleProfile, PolynomialDivergent, validate_assumptions
from .shock import dissipation_number


def _reject_unknown(section: str, data: dict, allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"'{section}' must be a JSON object")
    extra = sorted(set(data) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in '{section}': {', '.join(extra)}")


@dataclass(frozen=True)
class NozzleSpec:
    length: float = 1.0
    shape: str = "exponential"
    kappa: float = 0.05
    coefficients: tuple[float, ...] = ()

    def build(self, strict: bool = True) -> NozzleProfile:
        if self.shape == "exponential":
            sh = Exponential(self.kappa)
        elif self.shape == "polynomial":
            sh = PolynomialDivergent(tuple(self.coefficients))
        else:
            raise ConfigError(f"nozzle shape must be 'exponential' or 'polynomial', got {self.shape!r}")
        return NozzleProfile(self.length, sh, allow_degenerate=not strict)


@dataclass(frozen=True)
class WaveSpec:
    type: str = "zero"
    scale: float = 1.0
    k: int = 1
    terms: tuple[tuple[int, float, float], ...] = ()

    def build(self) -> Waveform:
        if self.type == "zero":
            return Waveform.zero()
        if self.type == "sin":
            return Waveform.sine(self.scale, self.k)
        if self.type == "cos":
            return Waveform.cosine(self.scale, self.k)
        if self.type == "harmonics":
            return Waveform(tuple((int(k), float(a), float(b)) for k, a, b in self.terms))
        raise ConfigError(f"waveform type must be zero, sin, cos or harmonics; got {self.type!r}")


@dataclass(frozen=True)
class ForcingSpec:
    period: float = 1.0
    eps: float = 1e-3
    rho_l: WaveSpec = field(default_factory=WaveSpec)
    u_l: WaveSpec = field(default_factory=WaveSpec)
    rho_r: WaveSpec = field(default_factory=lambda: WaveSpec("sin"))

    def build(self) -> BoundaryForcing:
        return BoundaryForcing(self.period, self.eps, self.rho_l.build(), self.u_l.build(),
                               self.rho_r.build())


@dataclass(frozen=True)
class GridSpec:
    steps_per_unit: float = 2000.0
    n_t: int = 256
    n_x: int = 256
    ibvp_n: int = 128
    fv_ladder: tuple[int, ...] = (256, 512, 1024)


@dataclass(frozen=True)
class ToleranceSpec:
    fit_tol: float = 1e-10
    conv_tol: float | None = None
    max_iter: int = 60
    tol_sonic: float = 1e-6


@dataclass(frozen=True)
class ScalingSpec:
    alpha: float | None = None
    beta: float | None = None


@dataclass(frozen=True)
class StabilitySpec:
    shift: float = 0.01
    bump: float = 0.0
    windows: int = 7
    snapshot_dt: float = 0.02


@dataclass(frozen=True)
class CrosscheckSpec:
    n_periods: int = 3
    snapshot_every: float | None = None


@dataclass(frozen=True)
class RunConfig:
    nozzle: NozzleSpec = field(default_factory=NozzleSpec)
    inlet: tuple[float, float] = (1.0, 2.0)
    exit_density: float | None = 3.964365402172952
    shock_position: float | None = None
    forcing: ForcingSpec = field(default_factory=ForcingSpec)
    grids: GridSpec = field(default_factory=GridSpec)
    tolerances: ToleranceSpec = field(default_factory=ToleranceSpec)
    scaling: ScalingSpec = field(default_factory=ScalingSpec)
    stability: StabilitySpec = field(default_factory=StabilitySpec)
    crosscheck: CrosscheckSpec = field(default_factory=CrosscheckSpec)
    output_dir: str = "out"

    @property
    def inlet_state(self) -> GasState:
        return GasState(*self.inlet)

    def resolved_output_dir(self) -> Path:
        return Path(os.environ.get("NOZZLE_OUT") or self.output_dir)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["inlet"] = {"rho": self.inlet[0], "u": self.inlet[1]}
        return d


def _section(cls, name, data):
    """Build a flat dataclass from ``data`` rejecting unknown keys."""
    fields = cls.__dataclass_fields__
    _reject_unknown(name, data, fields)
    kw = {}
    for k, v in data.items():
        default = fields[k].default
        if isinstance(v, list):
            v = tuple(tuple(x) if isinstance(x, list) else x for x in v)
        if isinstance(default, (int, float)) and not isinstance(default, bool) and v is not None:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"'{name}.{k}' must be a number")
            v = type(default)(v) if isinstance(default, float) else v
        kw[k] = v
    try:
        return cls(**kw)
    except TypeError as exc:  # pragma: no cover - guarded above
        raise ConfigError(str(exc)) from None


def _wave(name, data):
    if isinstance(data, str):
        data = {"type": data}
    return _section(WaveSpec, name, data)


def parse_config(data: dict) -> RunConfig:
    """Build a ``RunConfig`` from a decoded JSON object (unknown keys rejected)."""
    _reject_unknown("config", data, RunConfig.__dataclass_fields__)
    kw = {}
    if "nozzle" in data:
        kw["nozzle"] = _section(NozzleSpec, "nozzle", data["nozzle"])
    if "inlet" in data:
        inl = data["inlet"]
        _reject_unknown("inlet", inl, ("rho", "u"))
        if set(inl) != {"rho", "u"}:
            raise ConfigError("'inlet' needs both 'rho' and 'u'")
        kw["inlet"] = (float(inl["rho"]), float(inl["u"]))
    for key in ("exit_density", "shock_position"):
        if key in data:
            kw[key] = None if data[key] is None else float(data[key])
    if "shock_position" in data and "exit_density" not in data:
        kw["exit_density"] = None
    if "forcing" in data:
        f = data["forcing"]
        _reject_unknown("forcing", f, ForcingSpec.__dataclass_fields__)
        base = _section(ForcingSpec, "forcing", {k: v for k, v in f.items() if k in ("period", "eps")})
        kw["forcing"] = replace(base, **{w: _wave(f"forcing.{w}", f[w])
                                         for w in ("rho_l", "u_l", "rho_r") if w in f})
    for key, cls in (("grids", GridSpec), ("tolerances", ToleranceSpec), ("scaling", ScalingSpec),
                     ("stability", StabilitySpec), ("crosscheck", CrosscheckSpec)):
        if key in data:
            kw[key] = _section(cls, key, data[key])
    if "output_dir" in data:
        kw["output_dir"] = str(data["output_dir"])
    cfg = RunConfig(**kw)
    try:
        cfg.forcing.build()
    except ValueError as exc:
        raise ConfigError(f"forcing: {exc}") from None
    if (cfg.exit_density is None) == (cfg.shock_position is None):
        raise ConfigError("give exactly one of 'exit_density' and 'shock_position'")
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(data)


@dataclass
class GateResult:
    profile: NozzleProfile
    inlet: GasState
    assumptions: dict
    M: float

    def as_dict(self) -> dict:
        return {"assumptions": self.assumptions, "M": self.M}


def gate(cfg: RunConfig) -> GateResult:
    """Every structural check, run before any solver.

    Raises
    ------
    AssumptionViolation
        Divergence or inlet-range failures; the message lists each failed
        inequality.
    DissipationTooWeak
        The dissipation number is not below one.
    """
    profile = cfg.nozzle.build(strict=False)
    inlet = cfg.inlet_state
    rep = validate_assumptions(profile, inlet)
    M = dissipation_number(inlet.u)
    failures = list(rep.failures)
    if not M < 1.0:
        failures.append(f"dissipation number M = (u-1)^2/(2u) = {M:.6g} violates M < 1")
    if failures:
        exc = DissipationTooWeak if all(f.startswith("dissipation") for f in failures) else AssumptionViolation
        raise exc("; ".join(failures))
    if not all(math.isfinite(v) for v in cfg.inlet):
        raise ConfigError("inlet state must be finite")
    return GateResult(cfg.nozzle.build(strict=True), inlet, rep.as_dict(), M)
