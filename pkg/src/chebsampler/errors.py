"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can map
failures to exit codes without string matching.
"""


class SamplingError(Exception):
    """Base class for all errors raised by this package."""

    code = "SAMPLING_ERROR"


class ConstructionError(SamplingError, ArithmeticError):
    """A numerical object could not be built from the supplied density."""

    code = "CONSTRUCTION_ERROR"


class UnresolvedError(ConstructionError):
    code = "UNRESOLVED"


class NonFiniteError(ConstructionError):
    code = "NONFINITE"

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class NegativeDensityError(ConstructionError):
    code = "NEGATIVE_DENSITY"

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class ZeroMassError(ConstructionError):
    code = "ZERO_MASS"


class RankOverflowError(ConstructionError):
    code = "RANK_OVERFLOW"


class ZeroSliceError(ConstructionError):
    code = "ZERO_SLICE"


class DegenerateConditionalError(ConstructionError):
    code = "DEGENERATE_CONDITIONAL"


class HatViolationError(SamplingError):
    """The rejection envelope was observed below the density."""

    code = "HAT_VIOLATION"

    def __init__(self, message, x=None, value=None):
        super().__init__(message)
        self.x = x
        self.value = value


class RunawayError(SamplingError):
    code = "RUNAWAY"


class ExpressionError(SamplingError, ValueError):
    """Malformed density expression. ``position`` is a 0-based offset."""

    code = "EXPRESSION_ERROR"

    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ExprSyntaxError(ExpressionError):
    code = "SYNTAX_ERROR"


class UnknownIdentifierError(ExpressionError):
    code = "UNKNOWN_IDENTIFIER"
