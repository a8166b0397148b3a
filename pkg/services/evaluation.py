import logging
from collections.abc import Sequence

import numpy as np

from config import EquivalenceConfig
from core.errors import ArgumentError
from core.pdfa import Pdfa, eval_string_prob
from core.teacher.provider import Teacher
from core.teacher.types import TokenString
from models.reports import EvalReport
from models.test_set import TestSet
from services.equivalence import sample_test_string


logger = logging.getLogger(__name__)


def hypothesis_probs(hypothesis: Pdfa, strings: Sequence[TokenString]) -> tuple[np.ndarray, int]:
    """Probabilities under `hypothesis`; strings with foreign tokens score 0 and are counted."""
    probs = np.zeros(len(strings))
    n_invalid = 0
    for i, tokens in enumerate(strings):
        if any(token >= hypothesis.alphabet_size for token in tokens):
            n_invalid += 1
            continue
        probs[i] = eval_string_prob(hypothesis, tokens)
    if n_invalid:
        logger.warning(
            f"{n_invalid} test strings use tokens outside the hypothesis alphabet "
            f"of size {hypothesis.alphabet_size}; scored as 0"
        )
    return probs, n_invalid


def evaluate(
    hypothesis: Pdfa, strings: Sequence[TokenString], references: Sequence[float]
) -> EvalReport:
    if len(strings) != len(references):
        raise ArgumentError(f"{len(strings)} strings but {len(references)} reference probabilities")
    predicted, n_invalid = hypothesis_probs(hypothesis, strings)
    errors = np.asarray(references, dtype=float) - predicted
    if len(errors):
        mse = float(np.mean(errors**2))
        max_abs = float(np.max(np.abs(errors)))
    else:
        mse = max_abs = 0.0
    return EvalReport(
        mse=mse,
        max_abs_err=max_abs,
        n_strings=len(strings),
        n_invalid=n_invalid,
        hypothesis_states=hypothesis.n_states,
    )


def collect_references(teacher: Teacher, strings: Sequence[TokenString]) -> list[float]:
    return [teacher.string_prob(tokens) for tokens in strings]


def sample_strings(
    n: int, alphabet_size: int, cfg: EquivalenceConfig, seed: int
) -> list[TokenString]:
    rng = np.random.default_rng(seed)
    return [sample_test_string(cfg, alphabet_size, rng) for _ in range(n)]


def sample_test_set(teacher: Teacher, n: int, cfg: EquivalenceConfig, seed: int) -> TestSet:
    strings = sample_strings(n, teacher.alphabet_size, cfg, seed)
    return TestSet(
        alphabet_size=teacher.alphabet_size,
        strings=strings,
        references=collect_references(teacher, strings),
    )
