"""
Errors
Exception hierarchy shared by every processor
"""

from typing import Optional


class ForecastError(Exception):
    """Base error; carries the pipeline stage that failed"""

    stage = "general"

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage

    def to_line(self) -> str:
        """Single-line, key=value rendering used by the CLI"""
        message = str(self).replace("\n", " ").replace('"', "'")
        return f'error stage={self.stage} type={type(self).__name__} message="{message}"'


class SeriesFormatError(ForecastError):
    """Input CSV is malformed, has duplicate months or gaps"""

    stage = "load"

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InsufficientDataError(ForecastError):
    """Not enough observations or rows for the requested operation"""

    stage = "data"


class ConfigurationError(ForecastError):
    """Invalid parameter or configuration value"""

    stage = "config"


class DimensionMismatchError(ForecastError):
    """Feature dimension or vector length does not match"""

    stage = "shape"


class DegenerateSystemError(ForecastError):
    """Weighted least-squares system without usable weights"""

    stage = "fit"


class SolverConvergenceError(ForecastError):
    """Iterative solver stopped at its iteration cap"""

    stage = "fit"


class DegenerateVarianceError(ForecastError):
    """Diebold-Mariano long-run variance is zero"""

    stage = "evaluate"


class MisalignedResultsError(ForecastError):
    """Forecast results do not share the same evaluation window"""

    stage = "evaluate"


class PipelineStageError(ForecastError):
    """Wraps a failure with the stage and model it happened in"""

    def __init__(self, stage: str, model: str, cause: Exception):
        super().__init__(f"{model}: {type(cause).__name__}: {cause}", stage=stage)
        self.model = model
        self.cause = cause


def error_line(error: Exception, default_stage: str = "general") -> str:
    """to_line() for any exception; foreign exceptions take default_stage"""
    if isinstance(error, ForecastError):
        return error.to_line()
    message = str(error).replace("\n", " ").replace('"', "'")
    return f'error stage={default_stage} type={type(error).__name__} message="{message}"'
