"""Exception types shared across the library."""


class SpectralPoissonError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SpectralPoissonError):
    """Array arguments have incompatible lengths or shapes."""


class DistinctPolesViolated(SpectralPoissonError):
    """Two poles coincide within the resolution tolerance."""


class PoleProximity(SpectralPoissonError):
    """An evaluation or contour point sits too close to a pole."""


class CoincidentPoints(SpectralPoissonError):
    """The two evaluation points of a bracket coincide."""


class NonzeroConstTerm(SpectralPoissonError):
    """Bracket requested for a Weyl function that does not vanish at infinity."""


class MassPositivity(SpectralPoissonError):
    """A peakon momentum / string mass is not strictly positive."""


class DegenerateString(SpectralPoissonError):
    """The string determinant polynomial vanished identically (internal error)."""


class RootFindingFailure(SpectralPoissonError):
    """Polynomial root finding did not produce the expected real spectrum."""


class CollisionDetected(SpectralPoissonError):
    """Two peakon positions approached closer than the collision guard."""


class StepSizeError(SpectralPoissonError):
    """Invalid integration step or horizon."""


class Phi1Undefined(SpectralPoissonError):
    """The first Toda constraint diverges for f(z) = 1 (n = 0)."""


class DegenerateSpectrum(SpectralPoissonError):
    """Eigenvalue gap too small for a stable spectral Jacobian."""


class BranchProximity(SpectralPoissonError):
    """Spectral point too close to a branch point of the Floquet curve."""


class StepResolution(SpectralPoissonError):
    """Monodromy integration failed its step-halving consistency check."""


class ConfigError(SpectralPoissonError):
    """Bad CLI/suite configuration."""


class LogBranchWarning(UserWarning):
    """A pole sits on the negative real axis; principal log branch used."""
