"""
Validation utilities for the transshipment optimizer.
Provides input validation for configuration values, vectors and matrices.
"""

import math
import re
from typing import Iterable, Optional, Sequence

import numpy as np


class ValidationError(Exception):
    """Custom exception for validation errors."""
    pass


class ConfigValidationError(ValidationError):
    """Validation error pinned to a location or matrix entry of a system config."""

    def __init__(self, message: str, field: Optional[str] = None, index: Optional[tuple] = None):
        self.field = field
        self.index = index
        where = ""
        if field is not None:
            where = field if index is None else f"{field}{list(index)}"
            where = f"{where}: "
        super().__init__(f"{where}{message}")


def validate_count(value, name: str = "count", min_val: int = 1, max_val: Optional[int] = None) -> int:
    """
    Validate an integer count such as a scenario number or a population size.

    Args:
        value: Value to validate
        name: Parameter name used in error messages
        min_val: Minimum allowed value
        max_val: Maximum allowed value (None = unbounded)

    Returns:
        Validated integer

    Raises:
        ValidationError: If value is not an integer in range
    """
    if isinstance(value, bool):
        raise ValidationError(f"{name} must be an integer, got bool")
    try:
        as_int = int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be an integer, got {type(value).__name__}")
    if isinstance(value, float) and value != as_int:
        raise ValidationError(f"{name} must be an integer, got {value}")

    if as_int < min_val:
        raise ValidationError(f"{name} must be at least {min_val}, got {as_int}")

    if max_val is not None and as_int > max_val:
        raise ValidationError(f"{name} must be at most {max_val}, got {as_int}")

    return as_int


def validate_probability(value, name: str = "rate") -> float:
    """Validate a probability in [0, 1]."""
    try:
        prob = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {type(value).__name__}")
    if not math.isfinite(prob) or prob < 0.0 or prob > 1.0:
        raise ValidationError(f"{name} must be within [0, 1], got {value}")
    return prob


def validate_nonnegative_vector(values, name: str = "vector", length: Optional[int] = None) -> np.ndarray:
    """
    Validate a one-dimensional vector of finite, nonnegative numbers.

    Args:
        values: Array-like input
        name: Parameter name used in error messages
        length: Required length (None = any length >= 1)

    Returns:
        Float numpy array copy of the input

    Raises:
        ValidationError: On wrong shape, length, non-finite or negative entries
    """
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be numeric")

    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty vector, got shape {arr.shape}")

    if length is not None and arr.size != length:
        raise ValidationError(f"{name} must have length {length}, got {arr.size}")

    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"{name}[{bad}] must be finite")

    if np.any(arr < 0):
        bad = int(np.flatnonzero(arr < 0)[0])
        raise ValidationError(f"{name}[{bad}] must be >= 0, got {arr[bad]}")

    return arr


def validate_square_matrix(values, name: str, size: int) -> np.ndarray:
    """
    Validate an n x n matrix of finite, nonnegative numbers.

    The diagonal is checked like any other entry but is never used downstream.

    Raises:
        ConfigValidationError: Naming the first offending (row, column)
    """
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ConfigValidationError("matrix must be numeric", field=name)

    if arr.shape != (size, size):
        raise ConfigValidationError(
            f"matrix must be {size}x{size}, got shape {arr.shape}", field=name
        )

    for (i, j), value in np.ndenumerate(arr):
        if not math.isfinite(value):
            raise ConfigValidationError("entry must be finite", field=name, index=(i, j))
        if value < 0:
            raise ConfigValidationError(f"entry must be >= 0, got {value}", field=name, index=(i, j))

    return arr


def validate_objectives(objectives: Iterable[str], allowed: Sequence[str]) -> tuple:
    """
    Validate an objective subset.

    Accepts either an iterable of names or a comma-separated string.
    Order follows ``allowed`` so that output columns are stable.

    Raises:
        ValidationError: On unknown names or fewer than two objectives
    """
    if isinstance(objectives, str):
        objectives = [part for part in objectives.split(",")]

    names = [str(name).strip().lower() for name in objectives if str(name).strip()]
    unknown = [name for name in names if name not in allowed]
    if unknown:
        raise ValidationError(
            f"Unknown objective(s) {unknown}; expected a subset of {list(allowed)}"
        )

    selected = tuple(name for name in allowed if name in names)
    if len(selected) < 2:
        raise ValidationError(
            f"At least two objectives are required for a multiobjective run, got {list(selected)}"
        )

    return selected


def sanitize_filename(filename: str) -> str:
    """
    Sanitize filename to prevent path traversal attacks.

    Args:
        filename: Filename to sanitize

    Returns:
        Sanitized filename
    """
    # Remove path separators and null bytes
    filename = filename.replace('/', '').replace('\\', '').replace('\0', '')

    # Remove leading dots
    filename = filename.lstrip('.')

    # Replace spaces with underscores
    filename = filename.replace(' ', '_')

    # Keep only alphanumeric, underscore, hyphen, and dot
    filename = re.sub(r'[^a-zA-Z0-9_\-.]', '', filename)

    # Limit length
    if len(filename) > 255:
        filename = filename[:255]

    return filename or "unnamed"
