"""Exception types shared across the package."""


class RobustmoError(Exception):
    """Base class for all package errors."""


class ConeDefinitionError(RobustmoError, ValueError):
    """The inequality description does not define a usable ordering cone."""


class EvaluationError(RobustmoError, RuntimeError):
    """An objective or derivative evaluation produced a non-finite value.

    Attributes:
        scenario: index of the scenario whose evaluation failed, if known.
        x: the point at which evaluation was attempted, if known.
    """

    def __init__(self, message, scenario=None, x=None):
        super().__init__(message)
        self.scenario = scenario
        self.x = x


class CapacityError(RobustmoError, RuntimeError):
    """An enumeration (grid or partition set) exceeds its configured cap."""


class SubproblemError(RobustmoError, RuntimeError):
    """The direction-finding subproblem could not be solved."""


class NonconvergenceError(SubproblemError):
    """Dual ascent hit its iteration cap; carries the best iterate found."""

    def __init__(self, message, p=None, value=None, weights=None, gap=None):
        super().__init__(message)
        self.p = p
        self.value = value
        self.weights = weights
        self.gap = gap
