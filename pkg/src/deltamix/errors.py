"""Exception types shared across the package."""


class DeltamixError(Exception):
    """Base class for all deltamix errors."""


class ConfigError(DeltamixError):
    """Invalid, unparseable or missing configuration."""


class NonHermitianError(DeltamixError):
    """A matrix that must be Hermitian is not (beyond tolerance)."""


class IntegrationError(DeltamixError):
    """Fixed-step integration became unstable (trace drift too large)."""


class DegenerateSteadyStateError(DeltamixError):
    """The Liouvillian null space has dimension > 1; no unique steady state."""


class PerturbationFitError(DeltamixError):
    """Weak-field order extraction failed: drives too strong for the fit."""


class NormalizationError(DeltamixError):
    """An output normalization requires a nonzero input amplitude."""


class SingularRatioError(DeltamixError):
    """Gamma21 = 0 makes the linewidth ratio Gamma31/Gamma21 singular."""
