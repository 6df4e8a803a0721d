"""Exception hierarchy shared by every module."""


class ProjectivoidError(Exception):
    """Base class for all library errors."""


class DepthOverflow(ProjectivoidError):
    """An exponent needs more p-power root depth than the model allows."""


class NotInvertibleAtPrecision(ProjectivoidError):
    """The element is zero (or its leading digit is unresolved) at its precision."""


class ShapeMismatch(ProjectivoidError, ValueError):
    """Operands live in different rings (variables, depth, window or model differ)."""


class ZeroSeries(ProjectivoidError):
    pass


class UnresolvedAtPrecision(ProjectivoidError):
    """A strict valuation comparison cannot be decided at the available precision."""


class NotAUnit(ProjectivoidError):
    pass


class NotIdempotent(ProjectivoidError):
    pass


class ResidueBasisInvalid(ProjectivoidError):
    pass


class WindowTooSmall(ProjectivoidError):
    """The degree window cuts off monomials that carry cohomology."""

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class NotACocycle(ProjectivoidError):
    pass


class LiftMismatch(ProjectivoidError):
    """Two lifts of a unit cocycle could not be matched by a coboundary."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class TowerInvalid(ProjectivoidError):
    pass


class NotGenerating(ProjectivoidError):
    pass


class NotSharpLiftable(ProjectivoidError):
    pass
