"""Exception types raised across the package.

All of them derive from ``ValueError`` so callers that only care about bad
input can catch one thing.
"""


class CalabiGlueError(ValueError):
    """Base class for all domain errors."""


class PointOutsideDomain(CalabiGlueError):
    pass


class SingularMetric(CalabiGlueError):
    pass


class ValenceMismatch(CalabiGlueError):
    pass


class StepTooLarge(CalabiGlueError):
    pass


class NonpositiveU(CalabiGlueError):
    pass


class ZeroPoint(CalabiGlueError):
    pass


class InsufficientData(CalabiGlueError):
    """Too few radii / t values / nodes for a requested fit or quadrature."""


class OddDimension(CalabiGlueError):
    pass


class InvalidCurvatureData(CalabiGlueError):
    pass


class InvalidBranch(CalabiGlueError):
    pass


class TTooLarge(CalabiGlueError):
    """The glued metric failed to be positive definite."""
