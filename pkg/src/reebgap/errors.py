"""Exception hierarchy.

Every error raised on purpose by the library derives from ``ReebGapError``.
The ``exit_code`` attribute is what the command line front end returns.
"""


class ReebGapError(Exception):
    exit_code = 1


class PreconditionError(ReebGapError, ValueError):
    """An input violates the documented precondition of an operation."""

    exit_code = 1


class ParseError(PreconditionError):
    exit_code = 1


# resolution failures (exit 2)

class ResolutionError(ReebGapError):
    exit_code = 2


class UnresolvableOrder(ResolutionError):
    """Two certified values could not be separated within the precision budget."""


class UnknownRationality(ResolutionError):
    """Rationality of a ratio cannot be decided from the symbolic tags."""


class DegenerateOrbit(ResolutionError):
    """The action level of an orbit is shared with another orbit."""


class AperiodicFlow(PreconditionError):
    """The flow has no common period (some axis ratio is irrational)."""


class ZeroElement(PreconditionError):
    pass


class MixedTargets(PreconditionError):
    pass


class ZeroRate(PreconditionError):
    pass


class OffSurface(PreconditionError):
    pass


class IndefiniteHessian(PreconditionError):
    pass


class NotACrossing(PreconditionError):
    pass


class DegenerateEndpoint(PreconditionError):
    pass


class InvalidDerivation(PreconditionError):
    """A derivation table entry has the wrong grading or raises action."""


# search failures (exit 3)

class SearchExhausted(ReebGapError):
    exit_code = 3

    def __init__(self, message, required_n=None):
        super().__init__(message)
        self.required_n = required_n


class NotFound(ReebGapError):
    exit_code = 3

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


# numerical failures (exit 4)

class NumericalError(ReebGapError):
    exit_code = 4


class DegenerateCrossing(NumericalError):
    pass


class UnresolvedCrossing(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class CalibrationFailure(NumericalError):
    pass


class CertificateError(NumericalError):
    """A freshly built certificate failed its own re-verification (internal bug)."""
