"""Exception types shared across the package."""


class ExsymError(Exception):
    """Base class for all errors raised by this package."""


class InvalidAxis(ExsymError):
    """Axis specification is malformed (min >= max, or too few points)."""


class MemoryBudgetExceeded(ExsymError):
    """Requested configuration grid would not fit in the memory budget."""


class IndexOutOfRange(ExsymError):
    """Particle index outside [0, N) or identical pair indices."""


class GridMismatch(ExsymError):
    """Operands live on different grids."""


class NonPositiveFrequency(ExsymError):
    """Trap frequency must be positive."""


class EqualFrequencies(ExsymError):
    """Asymmetric trap requires two distinct frequencies."""


class SingularKernel(ExsymError):
    """Interaction kernel is non-finite at an achievable separation."""


class GaugeNotVerified(ExsymError):
    """Vector potential lacks a verified Coulomb-gauge certificate."""


class NonUniformVectorPotential(ExsymError):
    """Spectral stepping supports spatially uniform vector potentials only."""


class BoundaryMassTooLarge(ExsymError):
    """Probability mass on the boundary slabs exceeds the spectral-path limit."""


class NotNormalized(ExsymError):
    """Operation requires a normalized wavefunction."""


class SolverDiverged(ExsymError):
    """Implicit linear solve failed to reach the requested residual."""


class PropagationError(ExsymError):
    """A time step failed; carries the failing time stamp."""

    def __init__(self, t: float, message: str):
        super().__init__(f"t={t:.6g}: {message}")
        self.t = t


class EmptyMask(ExsymError):
    """No configuration point passed the phase-extraction threshold."""


class EmptyTrajectory(ExsymError):
    """Trajectory carries no diagnostic records."""


class UnsupportedParticleCount(ExsymError):
    """Operation is defined only for small particle numbers (N <= 3, or N = 3)."""


class TooLarge(ExsymError):
    """Grid exceeds the dense-oracle ceiling."""


class NullProjection(ExsymError):
    """Projection annihilated the state (norm below threshold)."""


class CheckpointError(ExsymError):
    """Checkpoint file is malformed or truncated."""


class ConfigInvalid(ExsymError):
    """Run configuration failed validation; carries the offending field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class UnknownScenario(ExsymError):
    """Requested gallery scenario does not exist."""
