"""
Exception hierarchy shared by every covsim module.

The CLI maps these onto exit codes: ParameterError / ConfigError -> 1,
NumericalError -> 2.
"""

from typing import Optional


class CovsimError(Exception):
    """Base class for all covsim failures"""


class ParameterError(CovsimError, ValueError):
    """A model operation was called outside its preconditions"""

    def __init__(self, name: str, message: str):
        self.name = name
        super().__init__(f"{name}: {message}")


class ConfigError(CovsimError):
    """A config file or CLI override could not be turned into an ExperimentConfig"""

    def __init__(self, key: str, message: str, line: Optional[int] = None):
        self.key = key
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"config key '{key}'{where}: {message}")


class NumericalError(CovsimError):
    """A numerical routine could not deliver the requested accuracy"""


class QuadratureError(NumericalError):
    """Adaptive quadrature missed its absolute tolerance"""

    def __init__(self, decay: float, abs_error: float, tolerance: float, detail: str = ""):
        self.decay = decay
        self.abs_error = abs_error
        self.tolerance = tolerance
        msg = (f"quadrature for decay={decay!r} reached abs error {abs_error:.3e}, "
               f"tolerance is {tolerance:.3e}")
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class StageError(CovsimError):
    """Wraps a failure inside one stage of the scenario pipeline"""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"scenario stage '{stage}' failed: {cause}")
