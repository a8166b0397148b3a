import time

import numpy as np
import pytest

from config import EquivalenceConfig, LearnerConfig
from core.learner import run
from core.pdfa import eval_string_prob, random_pdfa
from core.serialization import to_json
from core.teacher.providers.exact import ExactPdfaTeacher
from services.evaluation import sample_strings


CONFIG = LearnerConfig(mu=1e-4, max_extends=6, seed=1, equivalence=EquivalenceConfig(n_samples=2000))
SEEDS = range(20)


def target_shape(seed: int) -> tuple[int, int]:
    """Between 2 and 8 states over 2 to 4 tokens."""
    return 2 + seed % 7, 2 + seed % 3


@pytest.fixture(scope="module")
def suite():
    started = time.perf_counter()
    results = []
    for seed in SEEDS:
        n_states, alphabet_size = target_shape(seed)
        target = random_pdfa(n_states, alphabet_size, seed=seed)
        results.append((target, run(ExactPdfaTeacher(target), CONFIG)))
    return results, time.perf_counter() - started


@pytest.mark.slow
class TestRandomTargets:
    def test_suite_runtime(self, suite):
        _, elapsed = suite
        assert elapsed < 60

    def test_state_count(self, suite):
        results, _ = suite
        for target, report in results:
            assert report.hypothesis.n_states <= target.n_states + 2

    def test_mse_on_sampled_strings(self, suite):
        results, _ = suite
        for seed, (target, report) in enumerate(results):
            strings = sample_strings(1000, target.alphabet_size, EquivalenceConfig(), seed=seed)
            errors = np.array(
                [eval_string_prob(target, x) - eval_string_prob(report.hypothesis, x) for x in strings]
            )
            assert np.mean(errors**2) <= 1e-6, f"seed {seed}"

    def test_round_invariants(self, suite):
        results, _ = suite
        for _, report in results:
            for record in report.history:
                assert record.max_residual <= 1e-9
                assert record.hash_before == record.hash_after
                assert record.max_merge_score <= CONFIG.mu

    def test_counterexamples_never_repeat(self, suite):
        results, _ = suite
        for _, report in results:
            assert len(set(report.counterexamples)) == len(report.counterexamples)

    def test_counterexamples_disagree_with_their_hypothesis(self, suite):
        results, _ = suite
        for target, report in results:
            for x, hypothesis in zip(report.counterexamples, report.hypotheses, strict=False):
                assert abs(eval_string_prob(target, x) - eval_string_prob(hypothesis, x)) > CONFIG.mu

    def test_hypothesis_is_normalized(self, suite):
        results, _ = suite
        for target, report in results:
            hypothesis = report.hypothesis
            assert hypothesis.alphabet_size == target.alphabet_size
            for state in range(hypothesis.n_states):
                outgoing = sum(p for (s, _), p in hypothesis.trans_prob.items() if s == state)
                assert hypothesis.stop_prob[state] + outgoing == pytest.approx(1.0, abs=1e-9)

    def test_rerun_is_identical(self, suite):
        results, _ = suite
        target, report = results[3]
        again = run(ExactPdfaTeacher(target), CONFIG)
        assert to_json(again.hypothesis) == to_json(report.hypothesis)
        assert again.history == report.history
