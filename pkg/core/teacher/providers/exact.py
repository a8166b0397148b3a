from __future__ import annotations

from typing import TYPE_CHECKING

from core.pdfa import eval_string_prob
from core.teacher.provider import Teacher


if TYPE_CHECKING:
    from collections.abc import Sequence

    from core.pdfa import Pdfa


def exact_string_prob(pdfa: Pdfa, tokens: Sequence[int]) -> float:
    return eval_string_prob(pdfa, tokens)


class ExactPdfaTeacher(Teacher):
    """Answers queries from a known automaton."""

    def __init__(self, pdfa: Pdfa) -> None:
        self._pdfa = pdfa

    @property
    def pdfa(self) -> Pdfa:
        return self._pdfa

    @property
    def alphabet_size(self) -> int:
        return self._pdfa.alphabet_size

    @property
    def labels(self) -> tuple[str, ...]:
        return self._pdfa.labels

    def string_prob(self, tokens: Sequence[int]) -> float:
        return exact_string_prob(self._pdfa, tokens)

    def close(self) -> None:
        return None
