"""Exception types shared across the package."""


class NecrobifurcError(Exception):
    """Base class for package errors."""


class DomainError(NecrobifurcError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NoRootError(NecrobifurcError):
    """A bracketed root search found no sign change.

    Carries the range of function values seen while scanning the bracket.
    """

    def __init__(self, message, scanned_min=None, scanned_max=None):
        super().__init__(message)
        self.scanned_min = scanned_min
        self.scanned_max = scanned_max


class DegenerateDenominatorError(NecrobifurcError):
    """A quotient's denominator vanished relative to its numerator."""


class AssumptionViolatedError(NecrobifurcError):
    """A precondition of a lemma-level check does not hold for the inputs."""


class InconclusiveResolutionError(NecrobifurcError):
    """Grid too coarse for the requested perturbation study.

    Discretization error dominates the signal; diagnostics carry the
    measured floors.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(NecrobifurcError):
    """Invalid run configuration (CLI exit code 2)."""
