"""Exception hierarchy shared by all modules."""


class CubeshiftError(Exception):
    """Base class for package errors."""


class ParseError(CubeshiftError, ValueError):
    """Malformed textual input (real literals, JSON configs)."""


class DimensionError(CubeshiftError, ValueError):
    """Vector length does not match the number of variables."""


class UndecidableError(CubeshiftError):
    """An enclosure straddles a window boundary at the available precision."""


class BudgetExceededError(CubeshiftError):
    """An enumeration, table or quadrature would exceed its configured budget."""


class QuadratureError(CubeshiftError):
    """Numerical integration failed to reach its error target."""


class SingularError(CubeshiftError, ValueError):
    """A matrix that must be invertible is singular."""
