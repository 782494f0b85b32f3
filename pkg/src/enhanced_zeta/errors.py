"""Exception types shared across the package."""


class EnhancedZetaError(Exception):
    """Base class for all package-specific errors."""


class ShapeMismatchError(EnhancedZetaError):
    """Matrix dimensions of the operands are incompatible."""


class NotPositiveDefiniteError(EnhancedZetaError):
    """A positive definite matrix was required; carries the observed signature."""

    def __init__(self, signature):
        self.signature = signature
        super().__init__(f"matrix is not positive definite (signature {signature})")


class NotOpenOrbitError(EnhancedZetaError):
    """The point is not in any open orbit (a relevant matrix is singular within tolerance)."""


class SizeLimitError(EnhancedZetaError):
    """Requested symbolic expansion exceeds the supported size."""


class ExactDivisionError(EnhancedZetaError):
    """Exact polynomial division left a nonzero remainder."""


class GammaPoleError(EnhancedZetaError):
    """A gamma factor was evaluated at a pole; carries structural pole information."""

    def __init__(self, message, poles=None):
        self.poles = poles or []
        super().__init__(message)


class ConvergenceError(EnhancedZetaError):
    """Integration parameters are outside the safe convergence region."""


class NonFiniteSampleError(EnhancedZetaError):
    """A Monte Carlo integrand evaluated to a non-finite value."""


class BranchTrackingError(EnhancedZetaError):
    """Continuous branch continuation failed (argument jump too large)."""


class UnsupportedCaseError(EnhancedZetaError):
    """The requested (n, d) or parameter combination is outside the implemented scope."""


class ConfigError(EnhancedZetaError):
    """Invalid run configuration."""
