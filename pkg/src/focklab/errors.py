class FocklabError(Exception):
    """Base class for package errors."""


class SizeLimitError(FocklabError, ValueError):
    """A truncation exceeds the desk-scale limit."""


class StabilityError(FocklabError, ArithmeticError):
    """Doubling check found a truncation that is not entry-exact."""

    def __init__(self, message: str, position=None, values=None):
        super().__init__(message)
        self.position = position
        self.values = values


class KindError(FocklabError, ValueError):
    """Operation called on an operator block of the wrong kind."""


class DimensionMismatch(FocklabError, ValueError):
    pass


class QuadratureDegreeError(FocklabError, ValueError):
    """Polynomial integrand exceeds the exactness of a quadrature rule."""


class UnboundedSymbolError(FocklabError, ValueError):
    pass
