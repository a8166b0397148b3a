import logging
from collections.abc import Sequence

from core.teacher.provider import Teacher
from core.teacher.types import QueryStats, TokenString


logger = logging.getLogger(__name__)


class QueryCache:
    """Insert-once map from token strings to answered probabilities.

    A disabled cache stores nothing and counts every lookup as a miss.
    """

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self._entries: dict[TokenString, float] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, tokens: Sequence[int]) -> bool:
        return tuple(tokens) in self._entries

    def get(self, tokens: Sequence[int]) -> float | None:
        if not self.enabled:
            self.misses += 1
            return None
        p = self._entries.get(tuple(tokens))
        if p is None:
            self.misses += 1
        else:
            self.hits += 1
        return p

    def put(self, tokens: Sequence[int], p: float) -> None:
        if not self.enabled:
            return
        key = tuple(tokens)
        if key in self._entries:
            raise KeyError(f"string {key} is already cached")
        self._entries[key] = p

    def stats(self) -> QueryStats:
        return QueryStats(hits=self.hits, misses=self.misses)


class CachingTeacher(Teacher):
    """Puts a QueryCache in front of another teacher; only misses reach it."""

    def __init__(self, teacher: Teacher, enabled: bool = True):
        self.teacher = teacher
        self.cache = QueryCache(enabled=enabled)

    @property
    def alphabet_size(self) -> int:
        return self.teacher.alphabet_size

    def string_prob(self, tokens: Sequence[int]) -> float:
        cached = self.cache.get(tokens)
        if cached is not None:
            return cached
        p = self.teacher.string_prob(tokens)
        self.cache.put(tokens, p)
        return p

    def stats(self) -> QueryStats:
        return self.cache.stats()

    def close(self) -> None:
        self.teacher.close()
