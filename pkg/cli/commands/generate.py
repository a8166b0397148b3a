from pathlib import Path
from typing import Annotated

import typer

from core.errors import ArgumentError
from core.pdfa import MIN_STOP_PROB, random_pdfa
from core.serialization import to_json
from repositories.pdfa_repo import save_pdfa


def generate(
    states: Annotated[int, typer.Option(help="Number of states.")],
    alphabet: Annotated[int, typer.Option(help="Alphabet size.")],
    seed: Annotated[int, typer.Option()] = 0,
    min_stop: Annotated[float, typer.Option(help="Lower bound of every stop probability.")] = (
        MIN_STOP_PROB
    ),
    out: Annotated[Path | None, typer.Option(help="Output JSON; stdout when omitted.")] = None,
) -> None:
    """Write a random connected automaton, e.g. as a teacher fixture."""
    try:
        pdfa = random_pdfa(states, alphabet, seed, min_stop=min_stop)
    except ArgumentError as e:
        raise typer.BadParameter(str(e)) from e
    if out is None:
        typer.echo(to_json(pdfa), nl=False)
    else:
        save_pdfa(pdfa, out)
