"""Exception hierarchy shared by all tropgamma modules."""


class TropGammaError(Exception):
    """Base class for all package errors."""


class ValidationError(TropGammaError):
    """Bad input data (datum files, malformed regions, ...)."""


class UnboundedPolytope(TropGammaError):
    pass


class EmptyPolytope(TropGammaError):
    pass


class OriginNotInterior(TropGammaError):
    pass


class NotSimplicial(TropGammaError):
    """Some vertex has linearly dependent or more than d active normals."""

    def __init__(self, vertex, active):
        self.vertex = vertex
        self.active = active
        super().__init__(f"vertex {vertex} has active constraints {sorted(active)}")


class DegenerateWeight(TropGammaError):
    """A weight lambda_q supports no facet of the polytope."""

    def __init__(self, index, normal):
        self.index = index
        self.normal = normal
        super().__init__(f"constraint #{index} with normal {normal} supports no facet")


class ChamberCrossed(TropGammaError):
    """A shift changed the combinatorial type of the polytope."""


class FacetsDisjoint(TropGammaError):
    pass


class DegreeMismatch(TropGammaError):
    pass


class IProviderFailure(TropGammaError):
    pass


class QuadratureNotConverged(TropGammaError):
    def __init__(self, what, value, error, tol):
        self.value = value
        self.error = error
        super().__init__(f"{what}: error estimate {error:.3e} exceeds tolerance {tol:.3e}")


class NonTransverseBoundary(TropGammaError):
    pass


class NewtonDiverged(TropGammaError):
    pass


class HomotopyStuck(TropGammaError):
    pass
