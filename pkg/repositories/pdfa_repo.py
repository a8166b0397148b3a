from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

from core.dot import to_dot
from core.errors import PdfaFormatError
from core.serialization import from_json, to_json


if TYPE_CHECKING:
    from core.pdfa import Pdfa


logger = logging.getLogger(__name__)


def load_pdfa(path: str | Path) -> Pdfa:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise PdfaFormatError(f"cannot read automaton file {path}: {e}") from e
    pdfa = from_json(text)
    logger.debug(f"Loaded {pdfa.n_states}-state automaton from {path}")
    return pdfa


def save_pdfa(pdfa: Pdfa, path: str | Path) -> None:
    Path(path).write_text(to_json(pdfa), encoding="utf-8")
    logger.info(f"Wrote {pdfa.n_states}-state automaton to {path}")


def save_dot(pdfa: Pdfa, path: str | Path) -> None:
    Path(path).write_text(to_dot(pdfa), encoding="utf-8")
