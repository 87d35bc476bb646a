"""Exception types raised across the package."""


class LotstabError(Exception):
    """Base class for all package errors."""


class InvalidDomain(LotstabError, ValueError):
    """A domain descriptor violates its invariants."""


class EmptyErosion(LotstabError, ValueError):
    """Erosion radius is at least the inradius."""


class NotAbsolutelyContinuous(LotstabError, ValueError):
    """A measure charges points outside the support of the reference."""


class SizeLimit(LotstabError, ValueError):
    """Problem size exceeds the supported limit."""


class NotConvex(LotstabError, ValueError):
    """A function expected to be convex is not."""


class NotConvexAlongLine(NotConvex):
    """A grid function fails convexity along a sampled line.

    Attributes
    ----------
    line : int
        Index of the offending line in the ensemble.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class NotStronglyConvex(LotstabError, ValueError):
    """Second derivative is not positive on the interval."""


class AlphaOutOfRange(LotstabError, ValueError):
    """Hölder exponent outside the open unit interval."""


class NonConvergence(LotstabError, RuntimeError):
    """The dual solver hit its iteration cap.

    Attributes
    ----------
    result : TransportResult
        Best iterate found, flagged ``converged=False``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SupportMismatch(LotstabError, ValueError):
    """Dual potentials live on different support points."""


class ReferenceMismatch(LotstabError, ValueError):
    """Embeddings were computed against different reference densities."""


class BoundingMismatch(LotstabError, ValueError):
    """A body is not contained in the bounding disk of a line ensemble."""


class NoIntersection(LotstabError, ValueError):
    """A line does not meet the body."""


class RegimeUnsupported(LotstabError, ValueError):
    """Unknown or inapplicable stability regime."""


class DegenerateData(LotstabError, ValueError):
    """Data unsuitable for a log-log fit."""


class ConfigError(LotstabError, ValueError):
    """Invalid experiment configuration."""
