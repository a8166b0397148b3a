import logging
from pathlib import Path
from typing import Annotated

import typer

from cli.dependencies import (
    EXIT_EARLY_STOP,
    EXIT_EQUIVALENT,
    EXIT_TEACHER_FAILURE,
    open_teacher,
    teacher_labels,
)
from config import (
    DEFAULT_CLIP_EPSILON,
    DEFAULT_EQ_SAMPLES,
    DEFAULT_MAX_EXTENDS,
    DEFAULT_MAX_LENGTH,
    DEFAULT_MU,
    DEFAULT_P_CONTINUE,
    EquivalenceConfig,
    LearnerConfig,
)
from core.dot import tree_to_dot
from core.errors import ConfigError, LearnerAbortedError, TeacherError
from core.learner import RunReport, StopReason, run
from repositories.pdfa_repo import save_dot, save_pdfa
from services.run_logger import RunLogger


logger = logging.getLogger(__name__)


def _write_trace(report: RunReport, path: Path) -> None:
    # deferred rounds have no log; an aborted round may have a log but no record
    numbers = [record.round for record in report.history if record.minimized]
    numbers += [report.rounds] * (len(report.logs) - len(numbers))
    lines = []
    for number, log in zip(numbers, report.logs, strict=True):
        lines.append(f"# round {number}")
        lines.extend(log.to_lines())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_artifacts(
    report: RunReport,
    out: Path | None,
    dot: Path | None,
    tree_dot: Path | None,
    trace: Path | None,
) -> None:
    if out is not None:
        save_pdfa(report.hypothesis, out)
    if dot is not None:
        save_dot(report.hypothesis, dot)
    if tree_dot is not None and report.tree is not None:
        tree_dot.write_text(tree_to_dot(report.tree, report.hypothesis.labels), encoding="utf-8")
    if trace is not None:
        _write_trace(report, trace)


def learn(
    teacher_pdfa: Annotated[
        Path | None, typer.Option("--teacher-pdfa", help="Automaton JSON answering queries.")
    ] = None,
    teacher_cmd: Annotated[
        str | None, typer.Option("--teacher-cmd", help="Command speaking the JSONL protocol.")
    ] = None,
    mu: Annotated[float, typer.Option(help="Merge and equivalence threshold.")] = DEFAULT_MU,
    max_extends: Annotated[
        int, typer.Option(help="Fringe extensions before stopping early.")
    ] = DEFAULT_MAX_EXTENDS,
    eq_samples: Annotated[
        int, typer.Option(help="Random strings per equivalence query.")
    ] = DEFAULT_EQ_SAMPLES,
    seed: Annotated[int, typer.Option(help="Seed of the equivalence sampler.")] = 0,
    epsilon_clip: Annotated[
        float, typer.Option(help="Stop estimates are capped at 1 - epsilon.")
    ] = DEFAULT_CLIP_EPSILON,
    exclude_final_edge: Annotated[
        bool, typer.Option(help="Skip the edge into a new node when accumulating weights.")
    ] = False,
    p_continue: Annotated[
        float, typer.Option(help="Continuation probability of sampled strings.")
    ] = DEFAULT_P_CONTINUE,
    max_length: Annotated[int, typer.Option(help="Length cap of sampled strings.")] = DEFAULT_MAX_LENGTH,
    consistency: Annotated[
        str, typer.Option(help="Merge test: 'lookahead' (teacher answers) or 'estimate'.")
    ] = "lookahead",
    refit: Annotated[
        bool,
        typer.Option(
            "--refit/--no-refit", help="Solve hypothesis parameters from the merged structure."
        ),
    ] = True,
    clip_stop: Annotated[
        bool,
        typer.Option(
            "--clip/--no-clip", help="Clip stop estimates; --no-clip extends the tree instead."
        ),
    ] = True,
    out: Annotated[Path | None, typer.Option(help="Hypothesis JSON output.")] = None,
    dot: Annotated[Path | None, typer.Option(help="Hypothesis DOT output.")] = None,
    run_log: Annotated[Path | None, typer.Option(help="JSONL log, one line per round.")] = None,
    tree_dot: Annotated[Path | None, typer.Option(help="Final observation tree as DOT.")] = None,
    trace: Annotated[Path | None, typer.Option(help="Merge operations of every round.")] = None,
) -> None:
    """Learn a hypothesis automaton from a teacher."""
    try:
        config = LearnerConfig(
            mu=mu,
            max_extends=max_extends,
            clip_epsilon=epsilon_clip,
            equivalence=EquivalenceConfig(
                n_samples=eq_samples, p_continue=p_continue, max_length=max_length, seed=seed
            ),
            seed=seed,
            exclude_final_edge=exclude_final_edge,
            consistency=consistency,
            refit=refit,
            clip_stop=clip_stop,
        )
    except ConfigError as e:
        raise typer.BadParameter(str(e)) from e

    run_logger = RunLogger(run_log)
    try:
        teacher = open_teacher(teacher_pdfa, teacher_cmd)
    except TeacherError as e:
        typer.echo(f"Teacher failure: {e}", err=True)
        raise typer.Exit(code=EXIT_TEACHER_FAILURE) from e

    try:
        report = run(teacher, config, run_logger=run_logger, labels=teacher_labels(teacher))
    except LearnerAbortedError as e:
        typer.echo(f"Teacher failure: {e.cause}", err=True)
        _write_artifacts(e.report, None, None, tree_dot, trace)
        raise typer.Exit(code=EXIT_TEACHER_FAILURE) from e
    finally:
        teacher.close()

    _write_artifacts(report, out, dot, tree_dot, trace)
    typer.echo(
        f"{report.stop_reason.value}: {report.hypothesis.n_states} states, "
        f"{report.rounds} rounds, {report.queries} queries, "
        f"{len(report.counterexamples)} counterexamples"
    )
    if report.stop_reason is StopReason.EARLY_STOP:
        raise typer.Exit(code=EXIT_EARLY_STOP)
    raise typer.Exit(code=EXIT_EQUIVALENT)
