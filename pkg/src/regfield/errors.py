"""Exception and warning types shared across the package."""


class RegFieldError(Exception):
    """Base class for domain failures."""


class InvalidCoefficient(RegFieldError, ValueError):
    pass


class GridTooCoarse(RegFieldError, ValueError):
    pass


class SymbolNotInvertible(RegFieldError):
    """The symbol vanishes (or goes negative) somewhere on the unit circle."""


class SymbolNearSingular(SymbolNotInvertible):
    """The symbol is positive but too close to zero to be handled reliably."""


class InsufficientCorrelations(RegFieldError, ValueError):
    pass


class NotPositiveDefinite(RegFieldError):
    pass


class NotMinimumPhase(RegFieldError, ValueError):
    pass


class EmbeddingNotPSD(RegFieldError):
    pass


class InsufficientData(RegFieldError, ValueError):
    pass


class DegenerateDesign(RegFieldError):
    pass


class TruncationWarning(UserWarning):
    """A truncated series has not decayed to the requested tolerance."""
