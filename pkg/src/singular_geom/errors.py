"""Exception types shared by the geometry modules."""


class GeometryError(Exception):
    """Base class for every domain failure raised by this package."""


class NotTimelike(GeometryError):
    """An argument that must be timelike is not."""


class DifferentCones(GeometryError):
    """Two timelike vectors lie in opposite timelike cones."""


class OutOfDomain(GeometryError):
    """A parameter point lies outside the surface/curve domain."""


class DegenerateMetric(GeometryError):
    """|EG - F^2| fell below the regularity floor at an evaluated point."""


class NotSpacelike(GeometryError):
    """A Lorentzian operation requires a spacelike surface point."""


class HalfspaceViolation(GeometryError):
    """The position inner product with the reference direction left its admissible range."""


class ZeroDirection(GeometryError):
    """A ruling direction is (numerically) the zero vector."""


class CylindricalInput(GeometryError):
    """Normalization was asked for a surface whose director is constant."""


class NonSpacelikeInput(GeometryError):
    """Input curves violate the admissibility relations of the Lorentzian normalization."""


class ODEBreakdown(GeometryError):
    """The reparametrization ODE could not be advanced (singular or blown-up state)."""


class NotNormalized(GeometryError):
    """The ruled surface does not satisfy its class normalization relations."""


class ZeroQ(GeometryError):
    """Lightlike-director class with |Q| below the floor; valid data always has Q != 0."""


class NoSolution(GeometryError):
    """The shooting scan found no bracketing pair of initial angles."""


class NotOrthogonal(GeometryError):
    """The ruling direction of a cylinder is not orthogonal to the reference direction."""


class Diverged(GeometryError):
    """Gradient descent increased the energy for too many consecutive steps."""


class ConfigError(GeometryError):
    """A run configuration is malformed."""
