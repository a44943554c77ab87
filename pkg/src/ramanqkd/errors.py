"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class ConfigError(ValueError):
    """A plan file, preset name or parameter override could not be resolved."""


class UndefinedQberError(ArithmeticError):
    """The overall gain is zero, so the QBER has no value."""


class NumericalError(ArithmeticError):
    """Base class for failures of the fitting and root-finding machinery."""


class IdentifiabilityError(NumericalError):
    """The least-squares design cannot separate the Stokes and anti-Stokes slopes.

    ``missing`` names the unidentifiable slope (``"s"`` or ``"a"``); ``partial``
    holds the estimate of the other slope when it could still be fitted.
    """

    def __init__(self, message, missing, partial=None):
        super().__init__(message)
        self.missing = missing
        self.partial = partial


class AmbiguousRootError(NumericalError):
    """The key rate changes sign more than once over the scanned distance range."""
