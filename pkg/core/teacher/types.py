from __future__ import annotations

from dataclasses import dataclass


TokenString = tuple[int, ...]


@dataclass(frozen=True)
class QueryStats:
    hits: int
    misses: int

    @property
    def total(self) -> int:
        return self.hits + self.misses
