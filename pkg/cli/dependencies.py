import logging
from functools import lru_cache
from pathlib import Path

import typer

from config import Config
from core.errors import ConfigError, PdfaFormatError
from core.teacher import Teacher, create_teacher


EXIT_EQUIVALENT = 0
EXIT_USAGE = 2
EXIT_EARLY_STOP = 3
EXIT_TEACHER_FAILURE = 4


@lru_cache
def get_config() -> Config:
    return Config.from_env()


def setup_logging(config: Config) -> None:
    logging.basicConfig(
        level=config.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def open_teacher(teacher_pdfa: Path | None, teacher_cmd: str | None) -> Teacher:
    """Teacher for the given source; source problems become usage errors."""
    try:
        return create_teacher(get_config(), pdfa_path=teacher_pdfa, command=teacher_cmd)
    except (ConfigError, PdfaFormatError) as e:
        raise typer.BadParameter(str(e)) from e


def teacher_labels(teacher: Teacher) -> tuple[str, ...] | None:
    return getattr(teacher, "labels", None)
