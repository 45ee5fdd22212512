"""Exception types raised across the package."""


class FsdError(Exception):
    """Base class for all fsdsim errors."""


class InputShapeError(FsdError, ValueError):
    pass


class SingularChannelError(FsdError, ValueError):
    """Raised when a channel matrix is (numerically) rank deficient."""


class ParameterError(FsdError, ValueError):
    pass


class DegenerateNoiseError(ParameterError):
    """Raised when an LLR computation is asked for with zero noise variance."""


class LatticeTooLargeError(FsdError, ValueError):
    """Raised when an exhaustive search would exceed the desk-scale bound."""


class ConfigurationError(FsdError, ValueError):
    pass
