"""Exception hierarchy.

Every error carries the process exit code the command-line front end maps
it to: 2 for violated preconditions, 3 for precision or depth exhaustion.
"""


class SmallDivError(Exception):
    exit_code = 2


class PreconditionError(SmallDivError, ValueError):
    exit_code = 2


class MalformedSpec(PreconditionError):
    exit_code = 65


class DepthInsufficient(SmallDivError):
    exit_code = 3


class PrecisionExhausted(SmallDivError):
    exit_code = 3


class RationalTerminated(DepthInsufficient):
    """The continued fraction of a rational ended before the requested depth."""


class ResonantDivisor(PreconditionError, ZeroDivisionError):
    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"resonant small divisor at order {n}")


class ResonantMode(PreconditionError, ZeroDivisionError):
    def __init__(self, k):
        self.k = tuple(k)
        super().__init__(f"resonant Fourier mode k={self.k}: mu.k = 0")


class NonzeroMean(PreconditionError):
    pass


class OrbitEscaped(SmallDivError):
    exit_code = 3

    def __init__(self, step, value):
        self.step = step
        self.value = value
        super().__init__(f"orbit escaped at step {step} (|z|={abs(value):.3g})")


class ToleranceUnreachable(SmallDivError):
    exit_code = 3


class InvariantViolation(SmallDivError, AssertionError):
    """A property guaranteed by theory failed; signals an implementation bug."""


class QPeriodic(PreconditionError):
    """f^q = id through the requested order; no resonant normal form applies."""


class OrderInsufficient(DepthInsufficient):
    """The series order is too low for the requested construction."""


class ExponentTooSmall(PreconditionError):
    """Loss exponent r <= tau + n - 1: no finite constant is claimed."""
