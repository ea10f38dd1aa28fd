"""Exception hierarchy shared by all gauss_sep modules."""


class GaussSepError(Exception):
    """Base class. ``error_code`` is the machine-readable tag used by the CLI."""

    error_code = "error"


class InvalidArgumentError(GaussSepError, ValueError):
    error_code = "invalid_argument"


class SingularMatrixError(GaussSepError, ArithmeticError):
    error_code = "singular_matrix"

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DomainError(GaussSepError, ValueError):
    """Parameters fall outside the region an operation is defined on."""

    error_code = "domain_error"

    def __init__(self, message, inequality=None):
        super().__init__(message)
        self.inequality = inequality


class NotPRepresentableError(DomainError):
    """Raised when a state has no (strictly) non-negative Gaussian P-function."""

    error_code = "not_p_representable"


class TruncationError(GaussSepError, ArithmeticError):
    error_code = "truncation_error"

    def __init__(self, message, suggested_cutoff=None):
        super().__init__(message)
        self.suggested_cutoff = suggested_cutoff
