"""Randomized equivalence testing of a hypothesis against the teacher."""

import logging
from dataclasses import dataclass

import numpy as np

from config import EquivalenceConfig
from core.pdfa import Pdfa, eval_string_prob
from core.teacher.provider import Teacher
from core.teacher.types import TokenString


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    counterexample: TokenString | None = None
    teacher_prob: float | None = None
    hypothesis_prob: float | None = None
    samples_checked: int = 0


def sample_test_string(
    cfg: EquivalenceConfig, alphabet_size: int, rng: np.random.Generator
) -> TokenString:
    """Uniform tokens; after each one continue with probability p_continue, up to max_length.

    The empty string is drawn with probability 1 - p_continue.
    """
    if alphabet_size == 0:
        return ()
    # continuations drawn before the first stop
    length = min(int(rng.geometric(1.0 - cfg.p_continue)) - 1, cfg.max_length)
    return tuple(rng.integers(alphabet_size, size=length).tolist())


def equivalence_query(
    hypothesis: Pdfa,
    teacher: Teacher,
    cfg: EquivalenceConfig,
    mu: float,
    rng: np.random.Generator,
) -> EquivalenceVerdict:
    """Test up to n_samples strings and return the first one where the two disagree by more than mu."""
    for i in range(cfg.n_samples):
        x = sample_test_string(cfg, teacher.alphabet_size, rng)
        p_teacher = teacher.string_prob(x)
        p_hypothesis = eval_string_prob(hypothesis, x)
        if abs(p_teacher - p_hypothesis) > mu:
            logger.debug(
                f"Counterexample {x} after {i + 1} samples: "
                f"teacher {p_teacher!r}, hypothesis {p_hypothesis!r}"
            )
            return EquivalenceVerdict(
                equivalent=False,
                counterexample=x,
                teacher_prob=p_teacher,
                hypothesis_prob=p_hypothesis,
                samples_checked=i + 1,
            )
    return EquivalenceVerdict(equivalent=True, samples_checked=cfg.n_samples)


class EquivalenceOracle:
    """Holds one seeded generator so successive queries draw fresh strings."""

    def __init__(
        self, teacher: Teacher, cfg: EquivalenceConfig, mu: float, *, seed: int | None = None
    ):
        self.teacher = teacher
        self.cfg = cfg
        self.mu = mu
        self.rng = np.random.default_rng(cfg.seed if seed is None else seed)
        self.queries = 0

    def check(self, hypothesis: Pdfa) -> EquivalenceVerdict:
        self.queries += 1
        return equivalence_query(hypothesis, self.teacher, self.cfg, self.mu, self.rng)
