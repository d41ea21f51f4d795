"""Exception types raised by the library."""


class NetLSDError(Exception):
    """Base class for all library errors."""


class ParseError(NetLSDError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class SizeError(NetLSDError, ValueError):
    """Raised when a dense eigensolve is requested on a graph above the threshold."""


class ConvergenceError(NetLSDError, RuntimeError):
    def __init__(self, message, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} (iterations={iterations}, worst residual={residual:.3e})")


class InconsistentEndsError(NetLSDError, ValueError):
    """Raised when the low end of a partial spectrum overlaps the high end."""


class IncompatibleSignaturesError(NetLSDError, ValueError):
    """Raised when signatures with different kernel, normalization or grid are compared."""


class UnsupportedCombinationError(NetLSDError, ValueError):
    pass
