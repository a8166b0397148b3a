"""Reference teacher process: answers the JSONL protocol from an automaton file.

    python -m tools.mock_teacher ladder.json

``--corrupt`` replaces every query answer with an unusable one and
``--silent`` leaves queries unanswered; both exist to exercise the client's
error paths.
"""

import json
import sys
from enum import Enum
from pathlib import Path
from typing import Annotated, TextIO

import typer
from pydantic import ValidationError

from core.errors import InvalidTokenError
from core.pdfa import Pdfa, eval_string_prob
from models.protocol import ErrorResponse, HelloResponse, StringProbRequest, StringProbResponse
from repositories.pdfa_repo import load_pdfa


class Corruption(str, Enum):
    NONE = "none"
    GARBAGE = "garbage"
    RANGE = "range"


def answer(
    pdfa: Pdfa, line: str, corrupt: Corruption = Corruption.NONE, silent: bool = False
) -> str | None:
    """Response line for one request line; None when nothing should be sent."""
    try:
        data = json.loads(line)
    except json.JSONDecodeError:
        return ErrorResponse(message="request is not JSON").model_dump_json()
    if not isinstance(data, dict):
        return ErrorResponse(message="request is not a JSON object").model_dump_json()

    request_id = data.get("id") if isinstance(data.get("id"), int) else None
    kind = data.get("type")
    if kind == "hello":
        return HelloResponse(alphabet_size=pdfa.alphabet_size).model_dump_json()
    if kind != "string_prob":
        return ErrorResponse(id=request_id, message=f"unknown type {kind!r}").model_dump_json()

    try:
        request = StringProbRequest.model_validate(data)
    except ValidationError as e:
        return ErrorResponse(
            id=request_id,
            message=f"malformed request ({e.error_count()} validation errors)",
        ).model_dump_json()

    if silent:
        return None
    if corrupt is Corruption.GARBAGE:
        return "this is not json"
    if corrupt is Corruption.RANGE:
        return StringProbResponse(id=request.id, p=1.5).model_dump_json()

    try:
        p = eval_string_prob(pdfa, request.tokens)
    except InvalidTokenError as e:
        return ErrorResponse(id=request.id, message=str(e)).model_dump_json()
    return StringProbResponse(id=request.id, p=p).model_dump_json()


def serve(
    pdfa: Pdfa,
    stdin: TextIO,
    stdout: TextIO,
    corrupt: Corruption = Corruption.NONE,
    silent: bool = False,
) -> int:
    """Answer requests until stdin closes; returns how many lines were read."""
    handled = 0
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        handled += 1
        response = answer(pdfa, line, corrupt, silent)
        if response is not None:
            stdout.write(response + "\n")
            stdout.flush()
    return handled


def main(
    pdfa_path: Annotated[Path, typer.Argument(help="Automaton JSON to serve.")],
    corrupt: Annotated[Corruption, typer.Option(help="Answer queries unusably.")] = Corruption.NONE,
    silent: Annotated[bool, typer.Option(help="Never answer queries.")] = False,
) -> None:
    pdfa = load_pdfa(pdfa_path)
    serve(pdfa, sys.stdin, sys.stdout, corrupt=corrupt, silent=silent)


if __name__ == "__main__":
    typer.run(main)
