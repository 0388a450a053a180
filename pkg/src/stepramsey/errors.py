"""Exception hierarchy shared by every module."""


class StepRamseyError(Exception):
    """Base class for all domain errors raised by this package."""


class FormatError(StepRamseyError):
    """A coloring or tree file could not be parsed or failed validation."""


class BudgetExceeded(StepRamseyError):
    """The requested enumeration is larger than the allowed budget."""

    def __init__(self, needed: int, budget: int, what: str = "evaluations"):
        super().__init__(f"needs {needed} {what}, budget is {budget}")
        self.needed = needed
        self.budget = budget


class InfeasibleSpec(StepRamseyError):
    pass


class AttemptsExhausted(StepRamseyError):
    pass


class EqualVertices(StepRamseyError, ValueError):
    pass


class InternalInvariantViolation(StepRamseyError, AssertionError):
    """A property the construction guarantees did not hold; indicates a bug."""


class NotPowerOfTwo(StepRamseyError, ValueError):
    pass


class ChainTooShort(StepRamseyError, ValueError):
    pass


class SubsetTooSmall(StepRamseyError, ValueError):
    pass


class OutOfUniverse(StepRamseyError, ValueError):
    pass


class UniverseTooLarge(StepRamseyError):
    pass


class DepthExceeded(StepRamseyError):
    pass
