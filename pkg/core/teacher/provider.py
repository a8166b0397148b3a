from __future__ import annotations

from typing import TYPE_CHECKING, Protocol, runtime_checkable


if TYPE_CHECKING:
    from collections.abc import Sequence


@runtime_checkable
class Teacher(Protocol):
    """Answers whole-string probability queries P(x) for token sequences."""

    @property
    def alphabet_size(self) -> int: ...

    def string_prob(self, tokens: Sequence[int]) -> float: ...

    def close(self) -> None:
        return None
