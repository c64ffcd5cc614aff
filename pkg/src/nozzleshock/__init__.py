"""Time-periodic transonic shocks in divergent nozzles: steady fitting, periodic
free-boundary iteration, tracked-shock stability runs and a finite-volume oracle."""
from .errors import NozzleError, SolverError, ValidationError
from .forcing import BoundaryForcing, Waveform
from .gas import GasState, RiemannPair, from_riemann, to_riemann
from .nozzle import Exponential, NozzleProfile, PolynomialDivergent, validate_assumptions
from .steady import FitOptions, fit_transonic

__version__ = "0.1.0"

__all__ = [
    "BoundaryForcing", "Exponential", "FitOptions", "GasState", "NozzleError", "NozzleProfile",
    "PolynomialDivergent", "RiemannPair", "SolverError", "ValidationError", "Waveform",
    "fit_transonic", "from_riemann", "to_riemann", "validate_assumptions",
]
