"""Exception hierarchy. The CLI maps each family to an exit code."""


class FraudnetError(Exception):
    """Base class for all package errors."""


class ConfigError(FraudnetError, ValueError):
    """Invalid configuration or arguments (exit code 1)."""


class DataError(FraudnetError, ValueError):
    """Malformed or inconsistent input data (exit code 2)."""


class SchemaError(DataError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"missing or renamed column: {column!r}")


class ParseError(DataError):
    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        super().__init__(f"non-numeric value {value!r} at row {row}, column {column!r}")


class LabelDomainError(DataError):
    """A label outside {0, 1}."""


class NumericalError(FraudnetError, ArithmeticError):
    """Numerical failure during fitting or calibration (exit code 3)."""


class TrainingDivergenceError(NumericalError):
    def __init__(self, epoch, message=None):
        self.epoch = epoch
        super().__init__(message or f"training diverged (non-finite loss) at epoch {epoch}")


class CalibrationError(NumericalError):
    def __init__(self, row, message=None):
        self.row = row
        super().__init__(message or f"perplexity search failed for row {row}")


class ArtifactError(FraudnetError):
    """Base for model-artifact persistence failures (exit code 2)."""


class UnsupportedVersionError(ArtifactError):
    pass


class ArtifactFormatError(ArtifactError):
    pass


class ArtifactShapeError(ArtifactError):
    pass


class StageError(FraudnetError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
