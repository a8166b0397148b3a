"""Teacher that forwards queries to a child process over line-delimited JSON.

Wire protocol, one UTF-8 JSON object per line::

    -> {"type": "hello"}
    <- {"type": "hello", "alphabet_size": N}
    -> {"id": k, "type": "string_prob", "tokens": [t0, t1, ...]}
    <- {"id": k, "p": 0.0123}
    <- {"id": k, "type": "error", "message": "..."}

One request is in flight at a time. Responses carrying another id are
leftovers of timed-out requests and are dropped.
"""

from __future__ import annotations

import json
import logging
import subprocess
import threading
import time
from collections import deque
from queue import Empty, Queue
from typing import TYPE_CHECKING

from pydantic import BaseModel, ValidationError
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from core.errors import (
    ProbabilityRangeError,
    TeacherError,
    TeacherProtocolError,
    TeacherRemoteError,
    TeacherTimeoutError,
)
from core.teacher.provider import Teacher
from models.protocol import (
    ErrorResponse,
    HelloRequest,
    HelloResponse,
    StringProbRequest,
    StringProbResponse,
)


if TYPE_CHECKING:
    from collections.abc import Sequence


logger = logging.getLogger(__name__)

STDERR_TAIL_LINES = 50
CLOSE_GRACE_S = 3.0
# interpreter start-up counts against the handshake, not against queries
HANDSHAKE_MIN_TIMEOUT_S = 30.0


def _decode_object(line: str) -> dict:
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise TeacherProtocolError(f"Malformed response line: {e}", payload=line) from None
    if not isinstance(data, dict):
        raise TeacherProtocolError("Response line is not a JSON object", payload=line)
    return data


def parse_hello_response(line: str) -> int:
    data = _decode_object(line)
    try:
        return HelloResponse.model_validate(data).alphabet_size
    except ValidationError as e:
        raise TeacherProtocolError(
            f"Malformed handshake response ({e.error_count()} validation errors)", payload=line
        ) from None


def parse_string_prob_response(line: str, expected_id: int) -> float | None:
    """Probability carried by `line`, or None when the line answers a different request."""
    data = _decode_object(line)

    if data.get("type") == "error":
        try:
            error = ErrorResponse.model_validate(data)
        except ValidationError as e:
            raise TeacherProtocolError(
                f"Malformed error response ({e.error_count()} validation errors)", payload=line
            ) from None
        if error.id is not None and error.id != expected_id:
            return None
        raise TeacherRemoteError(f"Teacher reported an error: {error.message}", payload=line)

    try:
        response = StringProbResponse.model_validate(data)
    except ValidationError as e:
        raise TeacherProtocolError(
            f"Malformed query response ({e.error_count()} validation errors)", payload=line
        ) from None

    if response.id != expected_id:
        return None
    if not 0.0 <= response.p <= 1.0:
        raise ProbabilityRangeError(
            f"Teacher answered probability {response.p!r}, outside [0, 1]", payload=line
        )
    return response.p


class SubprocessTeacher(Teacher):
    def __init__(
        self,
        command: Sequence[str],
        *,
        timeout_s: float = 30.0,
        attempts: int = 3,
        cwd: str | None = None,
        handshake_timeout_s: float | None = None,
    ) -> None:
        self._command = list(command)
        self._timeout_s = timeout_s
        if handshake_timeout_s is None:
            handshake_timeout_s = max(timeout_s, HANDSHAKE_MIN_TIMEOUT_S)
        self._handshake_timeout_s = handshake_timeout_s
        try:
            self._proc = subprocess.Popen(
                self._command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
                cwd=cwd,
            )
        except OSError as e:
            raise TeacherError(f"Failed to launch teacher {self._command!r}: {e}") from e

        self._next_id = 1
        self._lock = threading.Lock()
        self._lines: Queue[str | None] = Queue()
        self._stderr_lines: deque[str] = deque(maxlen=STDERR_TAIL_LINES)
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._stderr_reader = threading.Thread(target=self._read_stderr_loop, daemon=True)
        self._reader.start()
        self._stderr_reader.start()

        self._retrying = Retrying(
            stop=stop_after_attempt(attempts),
            wait=wait_exponential(multiplier=0.1, max=2),
            retry=retry_if_exception_type(TeacherTimeoutError),
            reraise=True,
            before_sleep=lambda retry_state: logger.warning(
                f"Retrying teacher query after timeout ({retry_state.attempt_number}/{attempts})"
            ),
        )

        try:
            self._alphabet_size = self._handshake()
        except TeacherError:
            self.close()
            raise
        logger.info(f"Teacher {self._command!r} ready, alphabet size {self._alphabet_size}")

    @property
    def alphabet_size(self) -> int:
        return self._alphabet_size

    def string_prob(self, tokens: Sequence[int]) -> float:
        return self._retrying(self._query_once, tuple(tokens))

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
            except OSError:
                pass
            self._proc.terminate()
            try:
                self._proc.wait(timeout=CLOSE_GRACE_S)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self) -> SubprocessTeacher:
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _read_loop(self) -> None:
        if self._proc.stdout is None:
            return
        try:
            for line in self._proc.stdout:
                line = line.strip()
                if line:
                    self._lines.put(line)
        finally:
            self._lines.put(None)

    def _read_stderr_loop(self) -> None:
        if self._proc.stderr is None:
            return
        for line in self._proc.stderr:
            line = line.strip()
            if line:
                self._stderr_lines.append(line)

    def _stderr_summary(self) -> str:
        if not self._stderr_lines:
            return "<no stderr>"
        return " | ".join(self._stderr_lines)

    def _assert_running(self, context: str) -> None:
        return_code = self._proc.poll()
        if return_code is not None:
            raise TeacherError(
                f"Teacher process exited ({return_code}) during {context}. "
                f"stderr: {self._stderr_summary()}"
            )

    def _send(self, message: BaseModel, context: str) -> None:
        self._assert_running(context)
        payload = message.model_dump_json()
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(payload + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise TeacherError(f"Broken pipe while sending {context}", payload=payload) from e

    def _next_line(self, deadline: float, timeout_s: float, context: str, payload: str) -> str:
        timeout_message = f"Timed out after {timeout_s}s waiting for {context}"
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise TeacherTimeoutError(timeout_message, payload=payload)
        try:
            line = self._lines.get(timeout=remaining)
        except Empty:
            raise TeacherTimeoutError(timeout_message, payload=payload) from None
        if line is None:
            # keep the end-of-stream marker for later callers
            self._lines.put(None)
            raise TeacherError(
                f"Teacher closed its output during {context}. stderr: {self._stderr_summary()}",
                payload=payload,
            )
        return line

    def _handshake(self) -> int:
        request = HelloRequest()
        self._send(request, "handshake")
        deadline = time.monotonic() + self._handshake_timeout_s
        line = self._next_line(
            deadline, self._handshake_timeout_s, "handshake", request.model_dump_json()
        )
        return parse_hello_response(line)

    def _query_once(self, tokens: tuple[int, ...]) -> float:
        with self._lock:
            request = StringProbRequest(id=self._next_id, tokens=list(tokens))
            self._next_id += 1
            payload = request.model_dump_json()
            self._send(request, f"query {request.id}")
            deadline = time.monotonic() + self._timeout_s
            while True:
                line = self._next_line(deadline, self._timeout_s, f"query {request.id}", payload)
                p = parse_string_prob_response(line, request.id)
                if p is not None:
                    return p
                logger.debug(f"Dropping stale teacher response while waiting for {request.id}")
