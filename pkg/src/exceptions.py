"""
Exception hierarchy for the non-Markovianity toolkit.
"""

from typing import Optional


class NonMarkovError(Exception):
    """Base class for every error raised by the toolkit"""


class DimensionError(NonMarkovError, ValueError):
    """Invalid or mismatched Hilbert-space dimension, or wrong parameter count"""


class UnsupportedDimensionError(DimensionError):
    """Dimension is valid in principle but not supported by the construction"""


class NotTracePreservingError(NonMarkovError, ValueError):
    """A trace-preserving map was required"""


class NotTraceAnnihilatingError(NonMarkovError, ValueError):
    """A generator with Tr L[X] = 0 for all X was required"""


class NonHermitianInputError(NonMarkovError, ValueError):
    """An operator that must be Hermitian (or a density matrix) is not"""


class RateDomainError(NonMarkovError, ValueError):
    """Rate function evaluated outside its declared domain, or malformed table"""


class ConfigError(NonMarkovError):
    """Scenario configuration could not be loaded or validated"""


class NumericalError(NonMarkovError):
    """Numerical failure, optionally tied to the time where it happened"""

    def __init__(self, message: str, time: Optional[float] = None):
        if time is not None:
            message = f"{message} (t = {time:.6g})"
        super().__init__(message)
        self.time = time


class DefectiveMapError(NumericalError):
    """Superoperator is not diagonalizable within tolerance"""


class SingularGeneratorError(NumericalError):
    """Time-local generator is undefined at the requested time"""


class NonInvertibleFrameError(NumericalError):
    """Dynamical map at the requested time has (numerically) zero determinant"""


class StepSizeError(NumericalError):
    """Adaptive integrator could not keep the step size above round-off"""


class NonCommutativeGeneratorError(NumericalError):
    """Generator declared commutative failed the sampled commutator check"""
