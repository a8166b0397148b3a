"""Extend, minimize and test until the teacher accepts a hypothesis.

Each round grows the observation tree by one layer, re-estimates it, clips
oversized stopping probabilities and minimizes it with the merge engine.
With ``clip_stop`` off, a round whose estimates overshoot 1 extends again
instead of minimizing, until the depth budget is reached.

A complete basis becomes a hypothesis for the equivalence oracle, its
parameters solved from the merged structure (``refit``) or read off the red
estimates. The tree is restored after every minimization, so queried data is
never lost, and a counterexample is materialized as a new path before the
next round.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from config import LearnerConfig
from core.errors import LearnerAbortedError, TeacherError, TreeConsistencyError
from core.merge import (
    Basis,
    ConsistencyRule,
    MergeEngine,
    OperationLog,
    empirical_error_bound,
    extract_hypothesis,
    refit_hypothesis,
)
from core.observation_tree import ObservationTree
from models.reports import RoundRecord, RunSummary
from services.equivalence import EquivalenceOracle
from services.query_cache import CachingTeacher


if TYPE_CHECKING:
    from core.pdfa import Pdfa
    from core.teacher.provider import Teacher
    from services.run_logger import RunLogger


logger = logging.getLogger(__name__)


class StopReason(str, Enum):
    EQUIVALENT = "equivalent"
    EARLY_STOP = "early_stop"


@dataclass
class RunReport:
    hypothesis: Pdfa
    rounds: int
    queries: int
    cache_hits: int
    counterexamples: list[tuple[int, ...]]
    stop_reason: StopReason | None
    wall_time: float
    history: list[RoundRecord] = field(default_factory=list)
    logs: list[OperationLog] = field(default_factory=list)
    tree: ObservationTree | None = None
    # every hypothesis sent to the equivalence oracle, in order
    hypotheses: list[Pdfa] = field(default_factory=list)

    def summary(self) -> RunSummary:
        return RunSummary(
            stop_reason=self.stop_reason.value if self.stop_reason else "aborted",
            rounds=self.rounds,
            queries=self.queries,
            cache_hits=self.cache_hits,
            hypothesis_states=self.hypothesis.n_states,
            counterexamples=[list(x) for x in self.counterexamples],
        )


def root_hypothesis(tree: ObservationTree) -> Pdfa:
    """Single-state machine carrying the root's estimates on self-loops."""
    root = tree.root
    basis = Basis(
        reds=(root,),
        transitions={(root, token): root for token in range(tree.alphabet_size)},
        complete=True,
    )
    return extract_hypothesis(tree, basis)


def clip_stop_estimates(tree: ObservationTree, epsilon: float) -> int:
    """Cap every stop estimate at 1 - epsilon and return how many nodes were capped.

    Below a capped node the path product changes, so descendants re-derive
    their stop estimate from the new product to keep reproducing P(x).
    """
    ceiling = 1.0 - epsilon
    clipped = 0
    stack = [(tree.root, 1.0, False)]
    while stack:
        q, p, dirty = stack.pop()
        if q in tree.skipped or p == 0.0:
            continue
        node = tree.nodes[q]
        if dirty:
            node.stop_est = node.access_prob / p
            tree.normalize_node(q)
        if node.stop_est > ceiling:
            node.stop_est = ceiling
            tree.normalize_node(q)
            clipped += 1
            dirty = True
        for token, child in sorted(node.children.items()):
            stack.append((child, p * node.trans_est[token], dirty))
    if clipped:
        logger.debug(f"Clipped {clipped} stop estimates to {ceiling!r}")
    return clipped


def process_counterexample(
    tree: ObservationTree, counterexample: Sequence[int], teacher: Teacher
) -> bool:
    """Materialize the path of `counterexample`; False when it already runs through the tree."""
    q = tree.root
    for i, token in enumerate(counterexample):
        child = tree.nodes[q].children.get(token)
        if child is None:
            for rest in counterexample[i:]:
                q = tree.add_node(q, rest)
                tree.initialize_node(q, teacher)
            tree.dfs_update()
            logger.debug(
                f"Counterexample {tuple(counterexample)} added "
                f"{len(counterexample) - i} nodes from depth {i}"
            )
            return True
        q = child
    logger.warning(f"Stale counterexample {tuple(counterexample)}: its path is already in the tree")
    return False


class Learner:
    def __init__(
        self,
        teacher: Teacher,
        config: LearnerConfig,
        *,
        run_logger: RunLogger | None = None,
        use_cache: bool = True,
        labels: Sequence[str] | None = None,
    ):
        self.teacher = CachingTeacher(teacher, enabled=use_cache)
        self.config = config
        self.rule = ConsistencyRule(config.consistency)
        self.run_logger = run_logger
        self.labels = tuple(labels) if labels is not None else None
        self.oracle = EquivalenceOracle(
            self.teacher, config.equivalence, config.mu, seed=config.seed
        )
        self.tree = ObservationTree(
            teacher.alphabet_size, exclude_final_edge=config.exclude_final_edge
        )
        self.best: Pdfa | None = None
        self.rounds = 0
        self.counterexamples: list[tuple[int, ...]] = []
        self.hypotheses: list[Pdfa] = []
        self.history: list[RoundRecord] = []
        self.logs: list[OperationLog] = []
        self._started = 0.0

    def run(self) -> RunReport:
        self._started = time.perf_counter()
        try:
            stop_reason = self._loop()
        except TeacherError as e:
            logger.error(f"Teacher failed in round {self.rounds}: {e}")
            raise LearnerAbortedError(
                f"Learning aborted in round {self.rounds}: {e}",
                report=self._report(None),
                cause=e,
            ) from e
        report = self._report(stop_reason)
        logger.info(
            f"Stopped ({stop_reason.value}) after {report.rounds} rounds: "
            f"{report.hypothesis.n_states} states, {report.queries} queries"
        )
        if self.run_logger is not None:
            self.run_logger.log_summary(report.summary())
        return report

    def _loop(self) -> StopReason:
        tree = self.tree
        config = self.config
        tree.initialize_node(tree.root, self.teacher)
        while True:
            if tree.extend_count >= config.max_extends:
                return StopReason.EARLY_STOP
            self.rounds += 1
            tree.extend_fringe(self.teacher)
            tree.dfs_update()
            residual = tree.max_access_error()
            overshoot = len(tree.overshooting())

            clipped = 0
            if config.clip_stop:
                clipped = clip_stop_estimates(tree, config.clip_epsilon)
            elif overshoot and tree.extend_count < config.max_extends:
                logger.info(
                    f"Round {self.rounds}: {overshoot} stop estimates exceed 1; "
                    f"extending before minimizing"
                )
                self._record_deferred(residual, overshoot)
                continue

            snapshot = tree.snapshot()
            hash_before = tree.structural_hash()
            result = MergeEngine(tree, config.mu, rule=self.rule).minimize()
            self.logs.append(result.log)

            hypothesis = None
            refit = False
            if result.basis.complete:
                hypothesis, refit = self._hypothesis(result.basis)

            tree.restore(snapshot)
            hash_after = tree.structural_hash()
            if hash_after != hash_before:
                raise TreeConsistencyError(f"restore after round {self.rounds} changed the tree")

            verdict = None
            empirical = None
            if hypothesis is not None:
                self.best = hypothesis
                self.hypotheses.append(hypothesis)
                empirical = empirical_error_bound(tree, hypothesis)
                verdict = self.oracle.check(hypothesis)

            counterexample = None
            stale = False
            if verdict is not None and not verdict.equivalent:
                counterexample = verdict.counterexample
                self.counterexamples.append(counterexample)
                if process_counterexample(tree, counterexample, self.teacher):
                    if config.clip_stop:
                        clipped += clip_stop_estimates(tree, config.clip_epsilon)
                else:
                    stale = True

            self._record(
                RoundRecord(
                    round=self.rounds,
                    tree_size=len(tree),
                    extend_count=tree.extend_count,
                    reds=len(result.basis.reds),
                    basis_complete=result.basis.complete,
                    hypothesis_states=hypothesis.n_states if hypothesis is not None else None,
                    refit=refit,
                    empirical_error=empirical,
                    counterexample=list(counterexample) if counterexample is not None else None,
                    stale_counterexample=stale,
                    clipped=clipped,
                    overshoot=overshoot,
                    max_residual=residual,
                    hash_before=hash_before,
                    hash_after=hash_after,
                    max_merge_score=result.log.max_score(),
                    rescreened=len(result.log.rescreened()),
                    queries=self.teacher.stats().misses,
                )
            )

            if verdict is not None and verdict.equivalent:
                return StopReason.EQUIVALENT

    def _hypothesis(self, basis: Basis) -> tuple[Pdfa, bool]:
        """Refit the basis automaton when possible, else read it off the estimates."""
        hypothesis = refit_hypothesis(self.tree, basis) if self.config.refit else None
        refit = hypothesis is not None
        if hypothesis is None:
            if self.config.refit:
                logger.debug(f"Round {self.rounds}: refit failed, reading estimates instead")
            hypothesis = extract_hypothesis(self.tree, basis)
        if self.labels is not None:
            hypothesis = hypothesis.relabel(self.labels)
        return hypothesis, refit

    def _record_deferred(self, residual: float, overshoot: int) -> None:
        tree_hash = self.tree.structural_hash()
        self._record(
            RoundRecord(
                round=self.rounds,
                tree_size=len(self.tree),
                extend_count=self.tree.extend_count,
                reds=len(self.tree.red_nodes()),
                minimized=False,
                basis_complete=False,
                overshoot=overshoot,
                max_residual=residual,
                hash_before=tree_hash,
                hash_after=tree_hash,
                queries=self.teacher.stats().misses,
            )
        )

    def _record(self, record: RoundRecord) -> None:
        self.history.append(record)
        if self.run_logger is not None:
            self.run_logger.log_round(record)

    def _report(self, stop_reason: StopReason | None) -> RunReport:
        hypothesis = self.best
        if stop_reason is not StopReason.EQUIVALENT and hypothesis is None:
            hypothesis = root_hypothesis(self.tree)
            if self.labels is not None:
                hypothesis = hypothesis.relabel(self.labels)
        stats = self.teacher.stats()
        return RunReport(
            hypothesis=hypothesis,
            rounds=self.rounds,
            queries=stats.misses,
            cache_hits=stats.hits,
            counterexamples=list(self.counterexamples),
            stop_reason=stop_reason,
            wall_time=time.perf_counter() - self._started,
            history=list(self.history),
            logs=list(self.logs),
            tree=self.tree,
            hypotheses=list(self.hypotheses),
        )


def run(
    teacher: Teacher,
    config: LearnerConfig,
    *,
    run_logger: RunLogger | None = None,
    use_cache: bool = True,
    labels: Sequence[str] | None = None,
) -> RunReport:
    return Learner(
        teacher, config, run_logger=run_logger, use_cache=use_cache, labels=labels
    ).run()
