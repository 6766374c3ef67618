"""Exception hierarchy.

Every error raised by the library derives from :class:`OmegaError`.  Domain
errors (bad arguments) also derive from ``ValueError`` so generic callers can
catch them the usual way; :class:`SignUndecided` and :class:`BudgetExhausted`
signal that a finite precision or term budget ran out before an answer could be
certified.
"""


class OmegaError(Exception):
    """Base class for all library errors."""


class DomainError(OmegaError, ValueError):
    """An argument lies outside the domain of the operation."""


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class LogNonPositive(DomainError):
    pass


class ZeroArgument(DomainError):
    pass


class IndexOutOfRange(DomainError, IndexError):
    pass


class NotInfinitesimal(DomainError):
    pass


class NonzeroConstantTerm(DomainError):
    pass


class NonPositiveArgument(DomainError):
    pass


class NotPositiveInfinite(DomainError):
    pass


class TargetNotPositiveInfinite(DomainError):
    pass


class EpsilonTooLarge(DomainError):
    pass


class SignUndecided(OmegaError, ArithmeticError):
    """Interval refinement could not separate a constant from zero."""


class BudgetExhausted(OmegaError):
    """A search or expansion hit its configured limit before finishing."""


class ParseError(OmegaError):
    """Base for errors in the expression front end."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class ExprSyntaxError(ParseError):
    """Malformed expression text.  ``position`` is a 0-based column."""


class UnsupportedExponent(ParseError):
    """A power whose exponent is not a rational literal."""


class MalformedDocument(OmegaError, ValueError):
    """A serialized document does not describe a valid value."""
