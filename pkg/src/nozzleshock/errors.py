"""Exception hierarchy.

``ValidationError`` subclasses signal bad inputs (CLI exit code 2);
``SolverError`` subclasses signal numerical failure (exit code 3).
"""


class NozzleError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(NozzleError):
    pass


class SolverError(NozzleError):
    pass


class NonPositiveVelocity(ValidationError):
    pass


class InvalidState(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class AssumptionViolation(ValidationError):
    pass


class DissipationTooWeak(ValidationError):
    pass


class ExitDensityUnattainable(ValidationError):
    def __init__(self, msg, interval):
        super().__init__(msg)
        self.interval = interval


class InvalidRelativeVelocity(ValidationError):
    pass


class NotCompressive(ValidationError):
    pass


class DomainViolation(ValidationError):
    pass


class VacuumAtExit(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class SonicApproach(SolverError):
    pass


class StepCountTooSmall(ValidationError):
    pass


class NonMonotoneResidual(SolverError):
    pass


class BracketEscape(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class SonicBreakdown(SolverError):
    pass


class AmplitudeTooLarge(SolverError):
    pass


class CharacteristicEscape(SolverError):
    pass


class ShockLeftDomain(SolverError):
    pass


class NoContraction(SolverError):
    pass


class NonConvergence(SolverError):
    pass


class ShockExitsDomain(SolverError):
    pass


class AdmissibilityLost(SolverError):
    pass


class WindowTooShort(ValidationError):
    pass


class PositivityLoss(SolverError):
    pass


class NoShockFound(SolverError):
    pass
