"""Exception types raised by spinphase."""


class SpinPhaseError(ValueError):
    """Base class for all library errors."""


class ParamsMismatchError(SpinPhaseError):
    """Two objects built on different Hilbert-space conventions were combined."""


class InvalidStateError(SpinPhaseError):
    """A state vector is not normalized, or has the wrong length."""


class InvalidDensityMatrixError(SpinPhaseError):
    """Matrix is not hermitian, not unit trace, or not positive semidefinite."""


class ReconstructionError(SpinPhaseError):
    """Multipole coefficients lie outside the image of the tomography map."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class SchemaError(SpinPhaseError):
    """A JSON document does not match the expected file schema."""


class NonPositiveReconstructionWarning(UserWarning):
    """A reconstructed matrix is hermitian with unit trace but not positive."""
