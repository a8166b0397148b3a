from __future__ import annotations

import shlex
from typing import TYPE_CHECKING

from core.errors import ConfigError
from core.teacher.providers.exact import ExactPdfaTeacher
from core.teacher.providers.subprocess_jsonl import SubprocessTeacher
from repositories.pdfa_repo import load_pdfa


if TYPE_CHECKING:
    from pathlib import Path

    from config import Config
    from core.teacher.provider import Teacher


def create_teacher(
    config: Config,
    *,
    pdfa_path: Path | None = None,
    command: str | None = None,
    cwd: str | None = None,
) -> Teacher:
    if (pdfa_path is None) == (command is None):
        raise ConfigError(
            "Exactly one teacher source is required: a PDFA file (--teacher-pdfa) "
            "or a command (--teacher-cmd)."
        )

    if pdfa_path is not None:
        return ExactPdfaTeacher(load_pdfa(pdfa_path))

    argv = shlex.split(command or "")
    if not argv:
        raise ConfigError("The teacher command is empty.")
    return SubprocessTeacher(
        argv,
        timeout_s=config.teacher_timeout_s,
        attempts=config.teacher_attempts,
        cwd=cwd,
    )
