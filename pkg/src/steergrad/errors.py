"""Exception types shared across the package."""


class SteergradError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(SteergradError, ValueError):
    """A model, dataset or session configuration is invalid."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class InputError(SteergradError, ValueError):
    """A numeric input is unusable (non-finite values, empty batch)."""


class AnnotationError(SteergradError, ValueError):
    """An annotation cannot be admitted (zero direction, bad index)."""


class TransitionError(SteergradError, RuntimeError):
    """A session command is illegal in the current phase."""

    def __init__(self, command: str, phase: str):
        self.command = command
        self.phase = phase
        super().__init__(f"cannot {command} while session is {phase}")


class TrainingFault(SteergradError, RuntimeError):
    """Training produced a non-finite loss or gradient."""


class ExperimentExistsError(SteergradError):
    """An experiment with this name is already stored."""


class ExperimentNotFoundError(SteergradError):
    """No stored experiment has this name."""
