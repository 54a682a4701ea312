"""Exception hierarchy for SymCentral.

Two families map onto CLI exit codes: InvalidInput (3) for inputs that can
never succeed, NumericalFailure (2) for computations that did not converge or
ran into a singularity.
"""


class SymCentralError(Exception):
    """Base class for all SymCentral errors."""
    exit_code = 2


class InvalidInput(SymCentralError):
    """Raised when an input group, configuration or ansatz is malformed."""
    exit_code = 3


class NumericalFailure(SymCentralError):
    """Raised when a numerical computation fails."""
    exit_code = 2


# group_core
class NotOrthogonal(InvalidInput):
    """Raised when a matrix fails the orthogonality check."""
    pass


class ClosureOverflow(InvalidInput):
    """Raised when a generated group exceeds its maximum order."""
    pass


class UnknownName(InvalidInput):
    """Raised when a catalog or orbit-type name is not recognised."""
    pass


class BadParameter(InvalidInput):
    """Raised when a catalog parameter is out of range."""
    pass


# strata / reduction
class NotIsotropy(InvalidInput):
    """Raised when a subgroup is not the isotropy subgroup of any point."""
    pass


class NotSymmetric(InvalidInput):
    """Raised when a configuration is not invariant under the group."""
    pass


class EmptyStratum(NumericalFailure):
    """Raised when no point of the requested component could be sampled."""
    pass


class InvalidConfiguration(InvalidInput):
    """Raised when a configuration has non-positive masses or coincident points."""
    pass


class InvalidAnsatz(InvalidInput):
    """Raised when an ansatz is inconsistent with its group or orbit structure."""
    pass


class SizeMismatch(InvalidInput):
    """Raised when two configurations differ in body count or total mass."""
    pass


class CollisionSingularity(NumericalFailure):
    """Raised when two bodies coincide and the potential is singular."""
    pass


class OrbitCollision(NumericalFailure):
    """Raised when points of two different orbits coincide after a lift."""
    pass


class StratumViolation(NumericalFailure):
    """Raised when a representative leaves its stratum component."""
    pass


class ZeroInertia(NumericalFailure):
    """Raised when all representatives sit at the origin."""
    pass


# solver
class NoConvergence(NumericalFailure):
    """Raised when every start of a solve failed."""
    pass


class RigidShape(NumericalFailure):
    """Raised when an ansatz has no shape degrees of freedom at all."""
    pass


class ContinuationLost(NumericalFailure):
    """Raised when a continuation step fails to reconverge."""

    def __init__(self, message, last_good=None, results=None):
        super().__init__(message)
        self.last_good = last_good
        self.results = results or []


# balanced
class InfeasibleSpectrum(InvalidInput):
    """Raised when no lift of the ansatz reaches the target spectrum."""
    pass


class DegenerateGeometry(NumericalFailure):
    """Raised when the balanced multiplier is not unique and strict mode is on."""
    pass


# dynamics
class CollisionAbort(NumericalFailure):
    """Raised when an integration comes closer than the collision radius."""

    def __init__(self, message, time=None, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory
