import logging
from pathlib import Path
from typing import Annotated

import typer

from cli.dependencies import EXIT_TEACHER_FAILURE, open_teacher
from config import DEFAULT_MAX_LENGTH, DEFAULT_P_CONTINUE, EquivalenceConfig
from core.errors import (
    ConfigError,
    InvalidTokenError,
    PdfaFormatError,
    TeacherError,
    TestSetFormatError,
)
from repositories.pdfa_repo import load_pdfa
from repositories.test_set_repo import read_test_set
from services.evaluation import collect_references, evaluate, sample_strings


logger = logging.getLogger(__name__)


def evaluate_hypothesis(
    hypothesis: Annotated[Path, typer.Argument(help="Hypothesis automaton JSON.")],
    teacher_pdfa: Annotated[
        Path | None, typer.Option("--teacher-pdfa", help="Automaton JSON giving references.")
    ] = None,
    teacher_cmd: Annotated[
        str | None, typer.Option("--teacher-cmd", help="Command speaking the JSONL protocol.")
    ] = None,
    test_set: Annotated[Path | None, typer.Option(help="Test-set file.")] = None,
    sample: Annotated[
        int | None, typer.Option(help="Score N strings drawn by the equivalence sampler.")
    ] = None,
    seed: Annotated[int, typer.Option(help="Seed for --sample.")] = 0,
    p_continue: Annotated[float, typer.Option()] = DEFAULT_P_CONTINUE,
    max_length: Annotated[int, typer.Option()] = DEFAULT_MAX_LENGTH,
    out: Annotated[Path | None, typer.Option(help="Report JSON output.")] = None,
) -> None:
    """Score a hypothesis by mean squared error against reference probabilities."""
    if (test_set is None) == (sample is None):
        raise typer.BadParameter("Give exactly one test source: --test-set or --sample N.")
    try:
        machine = load_pdfa(hypothesis)
    except PdfaFormatError as e:
        raise typer.BadParameter(str(e)) from e

    has_teacher = teacher_pdfa is not None or teacher_cmd is not None
    references = None
    if test_set is not None:
        try:
            data = read_test_set(test_set)
        except (OSError, TestSetFormatError) as e:
            raise typer.BadParameter(str(e)) from e
        strings = data.strings
        references = data.references
        if references is None and not has_teacher:
            raise typer.BadParameter(
                "The test set has no reference probabilities; give a teacher source."
            )
    else:
        if not has_teacher:
            raise typer.BadParameter("--sample needs a teacher source.")
        if sample is not None and sample < 0:
            raise typer.BadParameter("--sample must not be negative.")
        try:
            length_law = EquivalenceConfig(p_continue=p_continue, max_length=max_length, seed=seed)
        except ConfigError as e:
            raise typer.BadParameter(str(e)) from e

    if has_teacher:
        try:
            teacher = open_teacher(teacher_pdfa, teacher_cmd)
            try:
                if test_set is None:
                    strings = sample_strings(sample or 0, teacher.alphabet_size, length_law, seed)
                # a teacher overrides references stored in the file
                references = collect_references(teacher, strings)
            finally:
                teacher.close()
        except InvalidTokenError as e:
            raise typer.BadParameter(f"The test set does not fit the teacher: {e}") from e
        except TeacherError as e:
            typer.echo(f"Teacher failure: {e}", err=True)
            raise typer.Exit(code=EXIT_TEACHER_FAILURE) from e

    report = evaluate(machine, strings, references)
    text = report.model_dump_json(indent=2)
    if out is not None:
        out.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote evaluation report to {out}")
    typer.echo(text)
