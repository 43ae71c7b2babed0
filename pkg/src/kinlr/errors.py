"""Exception types shared across the package."""


class KinlrError(Exception):
    """Base class for errors raised by kinlr."""


class ConfigError(KinlrError):
    """Invalid or inconsistent configuration."""


class CflError(KinlrError):
    """Time step violates the CFL guard of an explicit stepper."""


class SolvabilityError(KinlrError):
    """Periodic Poisson problem has no solution (nonzero mean charge)."""


class ResourceError(KinlrError):
    """Requested dense operation exceeds the configured size cap."""
