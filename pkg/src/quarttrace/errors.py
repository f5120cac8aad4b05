"""Exception hierarchy shared by all modules.

Configuration problems map to CLI exit code 2, numerical failures to
exit code 1.
"""


class QuarttraceError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(QuarttraceError, ValueError):
    """Invalid configuration or violated problem constraint."""


class NumericalError(QuarttraceError, ArithmeticError):
    """A numerical routine could not deliver a trustworthy answer."""


class PoleError(NumericalError):
    """Evaluation too close to a pole of a quotient."""


class RootError(NumericalError):
    """Root bracketing or refinement failed."""


class PairingError(NumericalError):
    """Perturbed and unperturbed eigenvalues cannot be paired safely."""


class QuadratureError(NumericalError):
    """Quadrature too coarse, or the eigenbasis failed its orthogonality check."""


class DepthError(NumericalError):
    """Computed spectra do not reach far enough for the requested diagnostic."""
