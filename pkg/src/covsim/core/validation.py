"""Argument checks shared by the model modules."""

import math
import numbers
from typing import Union

import numpy as np

from covsim.core.errors import ParameterError

ArrayLike = Union[float, np.ndarray]


def require_finite(name: str, value: ArrayLike) -> ArrayLike:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParameterError(name, f"must be finite, got {value!r}")
    return value


def require_non_negative(name: str, value: ArrayLike) -> ArrayLike:
    require_finite(name, value)
    if np.any(np.asarray(value, dtype=float) < 0):
        raise ParameterError(name, f"must be >= 0, got {value!r}")
    return value


def require_positive(name: str, value: ArrayLike) -> ArrayLike:
    require_finite(name, value)
    if np.any(np.asarray(value, dtype=float) <= 0):
        raise ParameterError(name, f"must be > 0, got {value!r}")
    return value


def require_probability(name: str, value: ArrayLike) -> ArrayLike:
    require_finite(name, value)
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ParameterError(name, f"must lie in [0, 1], got {value!r}")
    return value


def require_count(name: str, value: int, minimum: int = 0) -> int:
    """Integer counts only; bools and integral floats are rejected too."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(name, f"must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(name, f"must be >= {minimum}, got {value!r}")
    return int(value)


def as_output(value: np.ndarray) -> ArrayLike:
    """Return a plain float when the computation was scalar."""
    if np.ndim(value) == 0:
        return float(value)
    return value


def is_close_unit_sum(w1: float, w2: float) -> bool:
    return math.isclose(w1 + w2, 1.0, rel_tol=0.0, abs_tol=1e-12)
