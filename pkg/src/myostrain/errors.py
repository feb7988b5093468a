"""Exception types raised across the package."""


class MyostrainError(Exception):
    """Base class for all package errors."""


class GeometryError(MyostrainError, ValueError):
    """Invalid or degenerate geometry (contours, meshes, elements)."""


class EmptyContour(GeometryError):
    pass


class SelfIntersection(GeometryError):
    pass


class RefOutsideContour(GeometryError):
    pass


class DegenerateAngle(GeometryError):
    pass


class NonNestedContours(GeometryError):
    pass


class InvertedElement(GeometryError):
    pass


class DegenerateElement(GeometryError):
    pass


class NodeAtReference(GeometryError):
    pass


class CountTooSmall(MyostrainError, ValueError):
    pass


class CountMismatch(MyostrainError, ValueError):
    pass


class InvalidPoisson(MyostrainError, ValueError):
    pass


class InvalidMaterial(MyostrainError, ValueError):
    pass


class UnknownMaterial(MyostrainError, KeyError):
    pass


class SingularConstraint(MyostrainError, ValueError):
    """Dirichlet ``h`` matrix is singular or not of the supported selector form."""


class ConflictingBC(MyostrainError, ValueError):
    pass


class EdgeNotOnBoundary(MyostrainError, ValueError):
    pass


class NotPositiveDefinite(MyostrainError, ArithmeticError):
    pass


class NoConvergence(MyostrainError, ArithmeticError):
    pass


class RadiusOutOfRange(MyostrainError, ValueError):
    pass


class InhomogeneousSpec(MyostrainError, ValueError):
    pass


class ZeroVariance(MyostrainError, ValueError):
    pass


class LengthMismatch(MyostrainError, ValueError):
    pass


class ParseError(MyostrainError, ValueError):
    pass


class SchemaViolation(MyostrainError, ValueError):
    pass
