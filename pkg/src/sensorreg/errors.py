"""Exception types shared across the package."""


class RegistrationError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVectorError(RegistrationError):
    """A vector that must have nonzero length is (numerically) zero."""


class MissingRangeError(RegistrationError):
    """A range value is required but the measurement carries none."""


class GimbalLockError(RegistrationError):
    """Euler angles are not uniquely defined for this rotation (pitch at +/-90 deg)."""


class DegenerateInputError(RegistrationError):
    """Input data does not determine a unique solution (e.g. collinear vectors)."""


class TriangulationError(RegistrationError):
    """Base class for position-fix failures."""


class NoConvergenceError(TriangulationError):
    """Iterative fit did not converge within the iteration budget."""


class IllConditionedError(TriangulationError):
    """Normal equations too ill-conditioned to solve (near-parallel rays)."""


class ConfigError(RegistrationError):
    """Experiment configuration is invalid or internally inconsistent."""


class ExperimentError(RegistrationError):
    """A Monte-Carlo experiment failed in too many realizations."""
