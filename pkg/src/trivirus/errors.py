"""Exception hierarchy shared by all trivirus modules.

Two broad families: structural errors (bad parameters, shape or sign
violations, inconsistent constructions) and numerical errors (iteration
caps, failed steps, singular linear solves). The CLI maps structural
scenario problems to exit code 2 and numerical failures to exit code 3.
"""


class TriVirusError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(TriVirusError):
    """Invalid input structure: shapes, signs, domains, constructions."""


class NumericalError(TriVirusError):
    """A numerical procedure failed to produce a valid result."""


# -- parameter validation -------------------------------------------------

class DimensionMismatch(StructuralError):
    """Array shapes or virus/node counts do not agree."""


class NonPositiveHealingRate(StructuralError):
    """Some healing rate delta_i^k <= 0."""


class NegativeInfectionRate(StructuralError):
    """Some infection rate beta_ij^k < 0."""


class NegativeEntry(StructuralError):
    """A matrix required to be nonnegative has a negative entry."""


class NotMetzler(StructuralError):
    """A matrix required to be Metzler has a negative off-diagonal entry."""


class NotSymmetric(StructuralError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class NotIrreducible(StructuralError):
    """A matrix required to be irreducible is reducible."""


class ParameterOutOfRange(StructuralError):
    """A scalar parameter lies outside its admissible interval."""


# -- equilibrium / stability analysis -------------------------------------

class SubThresholdSystem(StructuralError):
    """No endemic equilibrium exists: the spectral condition s(B - D) > 0 fails."""


class EigvecMismatch(StructuralError):
    """The supplied matrix does not fix the required eigenvector."""


class ConstructionMismatch(StructuralError):
    """A system does not match the equilibrium-line construction it claims."""


class NotAnEquilibrium(StructuralError):
    """The point's vector-field residual exceeds the stated tolerance."""


class CertificateInvalid(NumericalError):
    """A computed Lyapunov certificate violates one of its defining identities."""


class CertificateMismatch(StructuralError):
    """Trajectory and certificate dimensions/parameters do not agree."""


# -- iteration and integration ---------------------------------------------

class NoConvergence(NumericalError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class SingularJacobian(NumericalError):
    """The Newton step could not be solved; the Jacobian is singular."""


class InitialStateOutsideDomain(StructuralError):
    """The initial state lies outside the invariant domain beyond tolerance."""


class StepFailure(NumericalError):
    """The adaptive integrator reached its minimum step without acceptance.

    The partially integrated trajectory, when available, is attached as
    the ``trajectory`` attribute.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class EmptyTrajectory(StructuralError):
    """An operation requiring samples received an empty trajectory."""


# -- CLI -------------------------------------------------------------------

class ScenarioError(StructuralError):
    """A scenario file is missing, unreadable, or violates the schema."""
