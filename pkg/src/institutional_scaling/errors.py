"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures to process status without inspecting message text.
"""


class InstitutionalError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    kind = "error"


class ValidationError(InstitutionalError, ValueError):
    """Input violates a documented invariant."""

    exit_code = 2
    kind = "validation"


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an evaluator."""

    kind = "domain"


class UnknownBitWidthError(ValidationError, KeyError):
    """Bit-width missing from an energy model's grid table."""

    kind = "lookup"

    def __str__(self):
        return Exception.__str__(self)


class NumericalError(InstitutionalError, ArithmeticError):
    """A numerical routine could not produce the requested quantity."""

    exit_code = 3
    kind = "numerical"


class RegionError(NumericalError):
    """Gradient requested inside a clamped region where it is undefined."""

    kind = "region"


class NoInteriorOptimumError(NumericalError):
    """Fitness is monotone on the search bracket."""

    kind = "no-interior-optimum"


class NoDivergenceError(NumericalError):
    """The fitness gradient is not negative at the top of the bracket."""

    kind = "no-divergence"


class ThresholdNotReachedError(NumericalError):
    """Marginal capability never drops below the saturation threshold."""

    kind = "threshold-not-reached"


class FormatError(InstitutionalError):
    """A file could not be read, parsed or written."""

    exit_code = 4
    kind = "io"
