"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid parameters or configuration."""


class EdgeListError(ValueError):
    """Malformed edge-list file."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ThresholdNotFound(RuntimeError):
    """The tolerance scan reached alpha <= 0 without the cascade condition holding."""


class SolverDivergence(RuntimeError):
    """The absorbing-probability fixed point did not converge."""

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution
