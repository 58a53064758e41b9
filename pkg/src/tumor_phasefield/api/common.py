import logging
from typing import TypeVar

from pydantic import ValidationError

from tumor_phasefield.errors import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_FAILURE, TumorPhasefieldError
from tumor_phasefield.io.handlers import format_validation_error
from tumor_phasefield.schemas.responses import BaseResponse

logger = logging.getLogger(__name__)

ResponseT = TypeVar("ResponseT", bound=BaseResponse)


def failure(response_class: type[ResponseT], error: Exception) -> ResponseT:
    """Builds a failed response whose exit code follows the error type.

    Bad input values and unreadable files map to the configuration code,
    anything else raised while computing to the numerical-failure code.
    """
    if isinstance(error, TumorPhasefieldError):
        exit_code = error.exit_code
        message = str(error)
    elif isinstance(error, ValidationError):
        exit_code = EXIT_CONFIG_ERROR
        message = format_validation_error(error)
    elif isinstance(error, (ValueError, OSError)):
        exit_code = EXIT_CONFIG_ERROR
        message = str(error)
    else:
        exit_code = EXIT_NUMERICAL_FAILURE
        message = f"{type(error).__name__}: {error}"
    logger.debug("%s failed", response_class.__name__, exc_info=error)
    return response_class(is_success=False, message=message, exit_code=exit_code)
