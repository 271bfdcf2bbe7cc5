"""Utils package initialization."""

from .validators import (
    ValidationError,
    ConfigValidationError,
    validate_count,
    validate_probability,
    validate_nonnegative_vector,
    validate_square_matrix,
    validate_objectives,
    sanitize_filename,
)
from .logger import setup_logging, get_logger, log_with_context, stage_timer

__all__ = [
    'ValidationError',
    'ConfigValidationError',
    'validate_count',
    'validate_probability',
    'validate_nonnegative_vector',
    'validate_square_matrix',
    'validate_objectives',
    'sanitize_filename',
    'setup_logging',
    'get_logger',
    'log_with_context',
    'stage_timer',
]
