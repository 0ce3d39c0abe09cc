"""Exception hierarchy shared by every monocert module."""


class MonocertError(Exception):
    """Base class for all library errors."""


class DomainError(MonocertError, ValueError):
    """Argument outside the supported domain (non-positive, NaN, infinite)."""


class UnsupportedOrderError(MonocertError, ValueError):
    """Derivative / polygamma order beyond the implemented cap."""


class ConvergenceError(MonocertError, ArithmeticError):
    """A quadrature tail bound exceeded the requested tolerance.

    The offending configuration is kept on ``config`` so callers (the CLI in
    particular) can echo it back.
    """

    def __init__(self, message, config=None, tail_bound=None):
        super().__init__(message)
        self.config = config
        self.tail_bound = tail_bound
