"""Exception hierarchy shared by every module."""


class CKError(Exception):
    """Base class for all errors raised by ckfields."""


class InvalidInputError(CKError, ValueError):
    pass


class ClosureViolationError(CKError):
    """A matrix that should lie in the span of a basis does not."""


class ElementLeftAlgebraError(ClosureViolationError):
    """Conjugation by a group element moved an element out of the algebra."""


class RankAmbiguityError(CKError):
    """The singular-value gap is too small to decide a numerical rank."""

    def __init__(self, message, singular_values=None, gap=None):
        super().__init__(message)
        self.singular_values = singular_values
        self.gap = gap


class NumericError(CKError):
    pass


class CatalogError(CKError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConstructionError(CKError):
    """A pair or algebra failed one of its structural invariants."""


class ValidationError(CKError):
    pass


class PreconditionError(CKError):
    pass
