"""Exception types shared across the pipeline."""


class ThemepathError(Exception):
    """Base class for all package errors."""


class ConfigError(ThemepathError):
    """Bad or unparseable run configuration."""


class TransportError(ThemepathError):
    """A remote provider stayed unreachable after all retries."""


class ProtocolError(ThemepathError):
    """A remote provider answered with a malformed or inconsistent payload."""


class DegenerateInputError(ThemepathError):
    """Input is structurally valid but has no usable information (e.g. zero vector)."""


class InfeasibleError(ThemepathError):
    """The requested problem size cannot be solved by the chosen method."""


class PipelineStageError(ThemepathError):
    """Failure inside one pipeline stage, tagged with the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
