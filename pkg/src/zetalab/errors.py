"""Exception hierarchy shared by every zetalab module."""


class ZetaLabError(Exception):
    """Base class for all errors raised by zetalab."""


class DomainError(ZetaLabError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class CapacityError(ZetaLabError):
    """A requested table or grid exceeds the configured resource cap."""


class AccuracyError(ZetaLabError):
    """The requested accuracy cannot be reached with the configured terms.

    ``achievable`` carries the best error bound that *is* available.
    """

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


class FitError(ZetaLabError, ValueError):
    pass


class UnsupportedError(ZetaLabError, ValueError):
    pass


class ConfigError(ZetaLabError, ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ProvenanceError(ZetaLabError):
    """Input files do not match the digests recorded by their consumers."""
