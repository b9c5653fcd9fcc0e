"""Exception types shared across the package."""


class MetastabError(Exception):
    """Base class for all library-specific errors."""


class NoConvergence(MetastabError):
    """An iterative solver stalled before reaching its tolerance."""


class DegenerateHessian(MetastabError):
    """A Hessian is singular (or nearly so) where nondegeneracy is required."""


class WrongKind(MetastabError):
    """A critical point of the wrong type (minimum vs saddle) was supplied."""


class ShapeMismatch(MetastabError):
    """Operands live on incompatible grids / truncations."""


class NonFinite(MetastabError):
    """A trajectory produced inf/nan, usually because dt is too large."""


class AllCensored(MetastabError):
    """Every Monte Carlo replica hit the time horizon before the target."""


class SingularSystem(MetastabError):
    """A discretized linear system could not be solved."""


class OverlappingSets(MetastabError):
    """The sets A and B of a Dirichlet problem overlap."""


class DomainError(MetastabError, ValueError):
    """A parameter lies outside the regime where the formula is valid."""


class DegeneratePath(MetastabError):
    """A discrete path has too few nodes to be differentiated."""


class OutOfRange(MetastabError):
    """A requested evaluation time lies outside the stored path."""


class InsufficientData(MetastabError):
    """Not enough data points for the requested fit."""
