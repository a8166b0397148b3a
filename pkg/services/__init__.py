"""Services layer for pdfa-distill: query caching, equivalence testing, evaluation, run logs."""

from .equivalence import EquivalenceOracle, equivalence_query, sample_test_string
from .evaluation import evaluate
from .query_cache import CachingTeacher, QueryCache
from .run_logger import RunLogger


__all__ = [
    "CachingTeacher",
    "EquivalenceOracle",
    "QueryCache",
    "RunLogger",
    "equivalence_query",
    "evaluate",
    "sample_test_string",
]
