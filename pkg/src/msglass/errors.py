"""Exception hierarchy shared by the solver modules and the CLI."""


class MsglassError(Exception):
    """Base class for all package errors."""


class ModelError(MsglassError, ValueError):
    """Invalid model description (proportions, degrees, labels)."""


class DomainError(MsglassError, ValueError):
    """Argument outside the domain where a formula is defined."""


class UnsupportedModelError(MsglassError, ValueError):
    """Model outside the scope of the requested solver."""


class NumericalError(MsglassError, RuntimeError):
    """A root bracket or iteration failed to converge."""
