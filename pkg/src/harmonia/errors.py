"""Exception and warning types shared across the package."""


class CapabilityError(RuntimeError):
    """Operation requested on a backend that does not support it."""


class ParityError(ValueError):
    """Input violates the even-symmetry requirement."""


class ResonantSymbolError(ValueError):
    """Operator symbol vanishes on the real spectrum; no decaying fundamental solution."""


class NotInAlgebraError(RuntimeError):
    """Black-box operator is inconsistent with every polynomial in the Laplacian."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ExtrapolationError(ValueError):
    """Evaluation requested outside the resolved radial range."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class TruncationWarning(UserWarning):
    """Data does not decay sufficiently before the end of its grid."""


class AccuracyWarning(UserWarning):
    """Result may be less accurate than the stated target."""
