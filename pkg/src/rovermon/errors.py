"""Exception types shared across the package."""


class RoverMonError(Exception):
    """Base class for all rovermon errors."""


class ConfigError(RoverMonError):
    """Invalid configuration value or malformed config file."""


class GridParseError(RoverMonError):
    """Malformed ASCII terrain grid file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SimulationError(RoverMonError):
    """Numerical failure while stepping a simulation."""

    def __init__(self, message, t=None):
        if t is not None:
            message = f"t={t:.4f} s: {message}"
        super().__init__(message)
        self.t = t
