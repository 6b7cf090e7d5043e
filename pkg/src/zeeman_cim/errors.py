"""Exception hierarchy shared by the simulator modules."""


class CimError(Exception):
    """Base class for all simulator errors."""


class InvalidArgumentError(CimError, ValueError):
    """Raised on malformed inputs: shape mismatches, out-of-range indices."""


class SizeLimitError(CimError, ValueError):
    """Raised when an exhaustive search is requested for too many spins."""


class NumericFault(CimError, ArithmeticError):
    """A non-finite value appeared in the dynamical state.

    Attributes:
        step: integration step at which the fault was detected, if known.
    """

    def __init__(self, message, step=None):
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
        self.step = step


class StepSizeFault(NumericFault):
    """A quantity that must stay positive (CAC error, GATW variance) did not."""
