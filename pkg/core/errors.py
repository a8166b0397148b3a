from __future__ import annotations

from typing import TYPE_CHECKING, Any


if TYPE_CHECKING:
    from core.learner import RunReport


class PdfaDistillError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PdfaDistillError, ValueError):
    pass


class ArgumentError(PdfaDistillError, ValueError):
    """A function was called with an argument outside its domain."""


class PdfaError(PdfaDistillError, ValueError):
    """An automaton violates a structural or probabilistic invariant."""

    def __init__(self, message: str, *, state: int | None = None):
        super().__init__(message)
        self.state = state


class PdfaFormatError(PdfaError):
    pass


class InvalidTokenError(PdfaDistillError, ValueError):
    def __init__(self, token: int, alphabet_size: int):
        super().__init__(f"token {token} is outside the alphabet of size {alphabet_size}")
        self.token = token
        self.alphabet_size = alphabet_size


class TreeConsistencyError(PdfaDistillError, RuntimeError):
    pass


class MergeConsistencyError(PdfaDistillError, RuntimeError):
    pass


class TeacherError(PdfaDistillError):
    """The teacher could not answer a query. `payload` holds the offending data, if any."""

    def __init__(self, message: str, *, payload: Any = None):
        super().__init__(message)
        self.payload = payload


class TeacherTimeoutError(TeacherError):
    pass


class TeacherProtocolError(TeacherError):
    pass


class ProbabilityRangeError(TeacherProtocolError):
    pass


class TeacherRemoteError(TeacherError):
    pass


class LearnerAbortedError(TeacherError):
    def __init__(self, message: str, *, report: RunReport, cause: TeacherError):
        super().__init__(message, payload=cause.payload)
        self.report = report
        self.cause = cause


class TestSetFormatError(PdfaDistillError, ValueError):
    __test__ = False

    def __init__(self, message: str, *, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
