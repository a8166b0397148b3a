from pathlib import Path
from typing import Annotated

import typer

from cli.dependencies import EXIT_TEACHER_FAILURE, open_teacher
from config import DEFAULT_MAX_LENGTH, DEFAULT_P_CONTINUE, EquivalenceConfig
from core.errors import ConfigError, TeacherError
from repositories.test_set_repo import format_test_set, write_test_set
from services.evaluation import sample_test_set


def sample(
    n: Annotated[int, typer.Option(help="Number of strings.")],
    teacher_pdfa: Annotated[Path | None, typer.Option("--teacher-pdfa")] = None,
    teacher_cmd: Annotated[str | None, typer.Option("--teacher-cmd")] = None,
    seed: Annotated[int, typer.Option()] = 0,
    p_continue: Annotated[float, typer.Option()] = DEFAULT_P_CONTINUE,
    max_length: Annotated[int, typer.Option()] = DEFAULT_MAX_LENGTH,
    out: Annotated[Path | None, typer.Option(help="Test-set file; stdout when omitted.")] = None,
) -> None:
    """Draw a test set with reference probabilities from a teacher."""
    if n < 0:
        raise typer.BadParameter("--n must not be negative.")
    try:
        length_law = EquivalenceConfig(p_continue=p_continue, max_length=max_length, seed=seed)
    except ConfigError as e:
        raise typer.BadParameter(str(e)) from e

    teacher = None
    try:
        teacher = open_teacher(teacher_pdfa, teacher_cmd)
        test_set = sample_test_set(teacher, n, length_law, seed)
    except TeacherError as e:
        typer.echo(f"Teacher failure: {e}", err=True)
        raise typer.Exit(code=EXIT_TEACHER_FAILURE) from e
    finally:
        if teacher is not None:
            teacher.close()

    if out is None:
        typer.echo(format_test_set(test_set), nl=False)
    else:
        write_test_set(test_set, out)
