"""Exception hierarchy for laeo-gaze."""

from typing import Optional


class LaeoError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(LaeoError, ValueError):
    """A precondition or validation check failed."""


class BehindCameraError(InvalidInputError):
    """A point that must be in front of the camera has z <= 0."""


class ParallelError(InvalidInputError):
    """A ray is (nearly) parallel to the plane it should hit."""


class DegenerateError(InvalidInputError):
    """A direction or construction collapsed to zero length."""


class InfeasibleSceneError(InvalidInputError):
    """Scene synthesis could not satisfy its placement constraints."""


class RecordError(InvalidInputError):
    """A dataset record failed validation."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class NumericalError(LaeoError, ArithmeticError):
    """A loss or gradient became non-finite."""

    def __init__(self, message: str, frame_id: Optional[str] = None):
        self.frame_id = frame_id
        if frame_id is not None:
            message = f"{message} (frame {frame_id})"
        super().__init__(message)
