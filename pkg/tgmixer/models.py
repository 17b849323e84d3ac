"""Common types: errors, exit codes and the small enums shared across layers."""

from enum import IntEnum, StrEnum

__all__ = [
    "ArtifactError",
    "CheckpointError",
    "ConfigError",
    "DatasetError",
    "DivergenceError",
    "ExitCode",
    "GraphError",
    "ReportedError",
    "ShapeError",
    "SeedStream",
    "Split",
    "TgmError",
    "TimeEncodingError",
]


class TgmError(Exception):
    """Base class for every error raised by tgmixer."""


class DatasetError(TgmError):
    """Malformed or unusable input file.

    Args:
        message: What went wrong
        line: 1-based line number in the source file, when known
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GraphError(TgmError):
    """Temporal index built or queried outside its preconditions."""


class ShapeError(TgmError):
    """Tensor shapes do not agree."""


class TimeEncodingError(TgmError):
    """Invalid time-encoding parameters or misuse of the trainable encoder."""


class ConfigError(TgmError):
    """Run configuration failed validation.

    Args:
        errors: One formatted message per problem
    """

    def __init__(self, errors: list[str]) -> None:
        self.errors = errors
        super().__init__("\n".join(errors))


class CheckpointError(TgmError):
    """Checkpoint files missing, truncated or inconsistent."""


class DivergenceError(TgmError):
    """Training produced a non-finite loss."""


class ArtifactError(TgmError):
    """An output could not be written or holds non-finite values."""


class ReportedError(BaseException):
    """Used for errors which already triggered logging."""


class ExitCode(IntEnum):
    """Process exit codes for the tgmixer command."""

    SUCCESS = 0
    USAGE_ERROR = 1  # No command provided, invalid arguments
    INPUT_ERROR = 2  # Dataset or checkpoint unreadable
    CONFIG_ERROR = 3  # Config file invalid
    COMMAND_ERROR = 4  # Command failed while running
    ARTIFACT_ERROR = 5  # Output missing or non-finite


class SeedStream(IntEnum):
    """Fixed offsets deriving every subsystem generator from the root seed."""

    INIT = 0
    BATCHES = 1
    EVAL_NEGATIVES = 2
    NEIGHBORS = 3
    RANK_NEGATIVES = 4
    LANDSCAPE = 5
    SYNTHETIC = 6


class Split(StrEnum):
    """Chronological split tags."""

    TRAIN = "train"
    VAL = "val"
    TEST = "test"
