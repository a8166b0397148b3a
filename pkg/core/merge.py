"""Error-bounded red-blue minimization of an observation tree.

Red nodes form the core of the hypothesis, blue nodes are the non-red
children of reds. Each layer scores every blue against every red, then
applies the best merge per blue (or turns it red). A merge redirects the
blue's incoming edge to the red and folds the blue subtree into the machine
on the red side. Every edge and color change is recorded so the layer can
be undone or replayed.

Two consistency rules are available. ``estimate`` reads the tree's
estimates:

    | prefix(blue) * stop_est(red) - access_prob(blue) | <= mu

with ``prefix`` the product of transition estimates along the blue node's
access path. ``lookahead`` (the default) reads only teacher answers and
checks that the red predicts the blue's one-step answers:

    max_a | access_prob(blue) / access_prob(red) * P(x_red a) - P(x_blue a) | <= mu

Estimates built from a finite tree carry truncation error; the lookahead
distance of two nodes reaching the same state is 0 at any depth.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from core.errors import MergeConsistencyError
from core.observation_tree import Color
from core.pdfa import Pdfa, Transition, eval_string_prob


if TYPE_CHECKING:
    from core.observation_tree import ObservationTree


logger = logging.getLogger(__name__)

EdgeEdit = tuple[int, int, int | None, int]
ColorEdit = tuple[int, Color, Color]

REFIT_TOLERANCE = 1e-9


class ConsistencyRule(str, Enum):
    LOOKAHEAD = "lookahead"
    ESTIMATE = "estimate"


class OperationKind(str, Enum):
    MERGE = "merge"
    TURN_RED = "turn_red"


@dataclass(frozen=True)
class MergeCandidate:
    red: int
    blue: int
    score: float
    pair_count: int


@dataclass
class Operation:
    kind: OperationKind
    blue: int
    red: int | None = None
    score: float | None = None
    pair_count: int = 0
    rescreened: bool = False
    edges: list[EdgeEdit] = field(default_factory=list)

    def to_line(self) -> str:
        if self.kind is OperationKind.TURN_RED:
            suffix = f" rescreened red={self.red}" if self.rescreened else ""
            return f"turn_red blue={self.blue}{suffix}"
        return f"merge red={self.red} blue={self.blue} score={self.score!r} pairs={self.pair_count}"


@dataclass
class OperationLog:
    """Applied operations plus every color change, in order."""

    operations: list[Operation] = field(default_factory=list)
    colors: list[ColorEdit] = field(default_factory=list)

    def merges(self) -> list[Operation]:
        return [op for op in self.operations if op.kind is OperationKind.MERGE]

    def max_score(self) -> float:
        return max((op.score or 0.0 for op in self.merges()), default=0.0)

    def rescreened(self) -> list[Operation]:
        """Planned merges that failed again at apply time and turned red instead."""
        return [op for op in self.operations if op.rescreened]

    def to_lines(self) -> list[str]:
        return [op.to_line() for op in self.operations]

    def undo(self, tree: ObservationTree) -> None:
        for op in reversed(self.operations):
            for node, token, before, _after in reversed(op.edges):
                if before is None:
                    del tree.nodes[node].children[token]
                else:
                    tree.nodes[node].children[token] = before
        for node, before, _after in reversed(self.colors):
            tree.nodes[node].color = before

    def replay(self, tree: ObservationTree) -> None:
        for op in self.operations:
            for node, token, _before, after in op.edges:
                tree.nodes[node].children[token] = after
        for node, _before, after in self.colors:
            tree.nodes[node].color = after


@dataclass(frozen=True)
class Basis:
    reds: tuple[int, ...]
    transitions: dict[tuple[int, int], int]
    complete: bool


@dataclass(frozen=True)
class MinimizationResult:
    basis: Basis
    log: OperationLog
    layers: int


def consistency_distance(
    tree: ObservationTree, red: int, blue: int, prefix: float | None = None
) -> float:
    if prefix is None:
        prefix = tree.prefix_prob(blue)
    return abs(prefix * tree.nodes[red].stop_est - tree.nodes[blue].access_prob)


def lookahead_distance(tree: ObservationTree, red: int, blue: int) -> float:
    """Largest gap between blue's one-step answers and the ones red predicts for it.

    Red predicts P(x_blue a) as P(x_blue) * P(x_red a) / P(x_red). A red that
    was answered 0 predicts 0.
    """
    red_node = tree.nodes[red]
    blue_node = tree.nodes[blue]
    scale = blue_node.access_prob / red_node.access_prob if red_node.access_prob > 0 else 0.0
    return max(
        (abs(scale * r - b) for r, b in zip(red_node.next_prob, blue_node.next_prob)),
        default=0.0,
    )


def is_complete_basis(tree: ObservationTree, reds: list[int] | tuple[int, ...]) -> Basis:
    red_set = set(reds)
    transitions = {}
    complete = True
    for red in sorted(red_set):
        for token in range(tree.alphabet_size):
            target = tree.nodes[red].children.get(token)
            if target is None or target not in red_set:
                complete = False
                continue
            transitions[(red, token)] = target
    return Basis(reds=tuple(sorted(red_set)), transitions=transitions, complete=complete)


def extract_hypothesis(tree: ObservationTree, basis: Basis) -> Pdfa:
    """Read the automaton spelled by a complete basis off the red nodes' estimates."""
    if not basis.complete:
        raise MergeConsistencyError("cannot extract a hypothesis from an incomplete basis")

    index = {red: i for i, red in enumerate(basis.reds)}
    trans: dict[Transition, int] = {}
    trans_prob: dict[Transition, float] = {}
    stop_prob = []
    for red in basis.reds:
        node = tree.nodes[red]
        state = index[red]
        stop = max(node.stop_est, 0.0)
        probs = [max(p, 0.0) for p in node.trans_est]
        total = stop + sum(probs)
        if total > 0:
            stop /= total
            probs = [p / total for p in probs]
        else:
            stop = 1.0
        stop_prob.append(stop)
        for token in range(tree.alphabet_size):
            trans[(state, token)] = index[basis.transitions[(red, token)]]
            trans_prob[(state, token)] = probs[token]

    return Pdfa(
        n_states=len(basis.reds),
        alphabet_size=tree.alphabet_size,
        initial=index[tree.root],
        trans=trans,
        trans_prob=trans_prob,
        stop_prob=tuple(stop_prob),
    )


def refit_hypothesis(tree: ObservationTree, basis: Basis) -> Pdfa | None:
    """Solve the parameters of the basis automaton from the reds' own answers.

    With r(q, a) = P(x_q a) / P(x_q) for red q, the reciprocal stop
    probability u(q) = P(x_q Sigma*) / P(x_q) satisfies

        u(q) = 1 + sum_a r(q, a) * u(tau(q, a))

    which is linear in u. Then stop(q) = 1 / u(q) and
    pi(q, a) = r(q, a) * u(tau(q, a)) / u(q). With exact answers and the right
    structure this reproduces the target exactly. Returns None when a red was
    answered 0 or the system has no solution with every u(q) >= 1.
    """
    if not basis.complete:
        raise MergeConsistencyError("cannot refit a hypothesis on an incomplete basis")

    n = len(basis.reds)
    k = tree.alphabet_size
    index = {red: i for i, red in enumerate(basis.reds)}
    ratios = np.zeros((n, k))
    targets = np.zeros((n, k), dtype=int)
    coupling = np.zeros((n, n))
    for red in basis.reds:
        node = tree.nodes[red]
        if node.access_prob <= 0.0:
            logger.debug(f"Red {red} was answered 0; no refit")
            return None
        i = index[red]
        for token in range(k):
            j = index[basis.transitions[(red, token)]]
            ratios[i, token] = node.next_prob[token] / node.access_prob
            targets[i, token] = j
            coupling[i, j] += ratios[i, token]

    try:
        u = np.linalg.solve(np.eye(n) - coupling, np.ones(n))
    except np.linalg.LinAlgError:
        logger.debug("Refit system is singular")
        return None
    if not np.all(np.isfinite(u)) or np.any(u < 1.0 - REFIT_TOLERANCE):
        logger.debug(f"Refit has no proper solution: u={u.tolist()}")
        return None

    trans: dict[Transition, int] = {}
    trans_prob: dict[Transition, float] = {}
    stop_prob = []
    for i in range(n):
        probs = ratios[i] * u[targets[i]] / u[i]
        stop = 1.0 / u[i]
        total = stop + float(probs.sum())
        stop_prob.append(min(stop / total, 1.0))
        for token in range(k):
            trans[(i, token)] = int(targets[i, token])
            trans_prob[(i, token)] = min(float(probs[token]) / total, 1.0)

    return Pdfa(
        n_states=n,
        alphabet_size=k,
        initial=index[tree.root],
        trans=trans,
        trans_prob=trans_prob,
        stop_prob=tuple(stop_prob),
    )


def empirical_error_bound(tree: ObservationTree, hypothesis: Pdfa) -> float:
    """Largest |hypothesis probability - teacher answer| over the strings in the tree."""
    worst = 0.0
    for node in tree.nodes:
        access = tree.access_sequence(node.id)
        worst = max(worst, abs(eval_string_prob(hypothesis, access) - node.access_prob))
    return worst


class MergeEngine:
    """Minimizes a tree in place; estimates are read, never written."""

    def __init__(
        self,
        tree: ObservationTree,
        mu: float,
        *,
        rule: ConsistencyRule = ConsistencyRule.LOOKAHEAD,
    ) -> None:
        self.tree = tree
        self.mu = mu
        self.rule = rule
        self.log = OperationLog()
        self._prefix = tree.prefix_probs()

    # ------------------------------------------------------------------
    # queries against the current machine
    # ------------------------------------------------------------------

    def reds(self) -> list[int]:
        return self.tree.red_nodes()

    def blue_edges(self) -> dict[int, tuple[int, int]]:
        """Non-red children of reds, each with the (red, token) edge leading to it."""
        nodes = self.tree.nodes
        blues: dict[int, tuple[int, int]] = {}
        for red in self.reds():
            for token, child in sorted(nodes[red].children.items()):
                if nodes[child].color is not Color.RED and child not in blues:
                    blues[child] = (red, token)
        return blues

    def consistency_distance(self, red: int, blue: int) -> float:
        if self.rule is ConsistencyRule.ESTIMATE:
            return consistency_distance(self.tree, red, blue, self._prefix[blue])
        return lookahead_distance(self.tree, red, blue)

    def mergeable(self, red: int, blue: int) -> MergeCandidate | None:
        edge = self.blue_edges().get(blue)
        if edge is None:
            raise MergeConsistencyError(f"node {blue} is not blue")
        return self._fold(red, blue, edge, apply=False)

    # ------------------------------------------------------------------
    # mutations
    # ------------------------------------------------------------------

    def apply_merge(self, candidate: MergeCandidate) -> None:
        edge = self.blue_edges().get(candidate.blue)
        if edge is None:
            raise MergeConsistencyError(f"node {candidate.blue} is not blue")
        self._fold(candidate.red, candidate.blue, edge, apply=True)

    def turn_red(self, blue: int, *, rescreened_from: int | None = None) -> None:
        self.log.operations.append(
            Operation(
                kind=OperationKind.TURN_RED,
                blue=blue,
                red=rescreened_from,
                rescreened=rescreened_from is not None,
            )
        )
        self._set_color(blue, Color.RED)

    def refresh_colors(self) -> None:
        """Blue for every non-red child of a red, white for every other non-red node."""
        blues = self.blue_edges()
        for node in self.tree.nodes:
            if node.color is Color.RED:
                continue
            self._set_color(node.id, Color.BLUE if node.id in blues else Color.WHITE)

    def merge_layer(self, reds: list[int], blues: list[int]) -> None:
        """Score all blues against the layer-start machine, then apply the chosen operations."""
        order = sorted(blues, key=self.tree.access_sequence)
        plan: list[tuple[int, MergeCandidate | None]] = []
        for blue in order:
            best: MergeCandidate | None = None
            for red in sorted(reds):
                candidate = self.mergeable(red, blue)
                if candidate is not None and (best is None or candidate.score < best.score):
                    best = candidate
            plan.append((blue, best))

        for blue, best in plan:
            if best is None:
                self.turn_red(blue)
                continue
            # earlier merges of this layer may have attached nodes on the red side
            current = self.mergeable(best.red, blue)
            if current is None:
                logger.info(f"Merge of {blue} into {best.red} no longer holds; turning it red")
                self.turn_red(blue, rescreened_from=best.red)
                continue
            self.apply_merge(current)

        self.refresh_colors()

    def minimize(self) -> MinimizationResult:
        layers = 0
        while True:
            blues = list(self.blue_edges())
            if not blues:
                break
            self.merge_layer(self.reds(), blues)
            layers += 1
        basis = is_complete_basis(self.tree, self.reds())
        for line in self.log.to_lines():
            logger.debug(line)
        logger.debug(
            f"Minimization finished after {layers} layers: {len(basis.reds)} reds, "
            f"complete={basis.complete}"
        )
        return MinimizationResult(basis=basis, log=self.log, layers=layers)

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _set_color(self, node: int, color: Color) -> None:
        before = self.tree.nodes[node].color
        if before is color:
            return
        self.log.colors.append((node, before, color))
        self.tree.nodes[node].color = color

    def _fold(
        self, red: int, blue: int, edge: tuple[int, int], *, apply: bool
    ) -> MergeCandidate | None:
        """Walk the blue subtree against the red side, redirecting and attaching edges.

        With ``apply=False`` the edge changes go to a scratch overlay, so the
        dry run meets exactly the pairs the real fold will meet.
        """
        nodes = self.tree.nodes
        overlay: dict[tuple[int, int], int] = {}
        operation = Operation(kind=OperationKind.MERGE, blue=blue, red=red)

        def child(node: int, token: int) -> int | None:
            if (node, token) in overlay:
                return overlay[(node, token)]
            return nodes[node].children.get(token)

        def set_edge(node: int, token: int, target: int) -> None:
            if apply:
                operation.edges.append((node, token, nodes[node].children.get(token), target))
                nodes[node].children[token] = target
            else:
                overlay[(node, token)] = target

        parent, via = edge
        set_edge(parent, via, red)

        score = 0.0
        pairs = 0
        stack = [(red, blue)]
        while stack:
            red_side, blue_side = stack.pop()
            d = self.consistency_distance(red_side, blue_side)
            pairs += 1
            if d > self.mu:
                if apply:
                    raise MergeConsistencyError(
                        f"fold of {blue} into {red} met pair ({red_side}, {blue_side}) "
                        f"with distance {d!r} > {self.mu!r}"
                    )
                return None
            score = max(score, d)
            for token in sorted(nodes[blue_side].children, reverse=True):
                blue_child = nodes[blue_side].children[token]
                red_child = child(red_side, token)
                if red_child is None:
                    set_edge(red_side, token, blue_child)
                else:
                    stack.append((red_child, blue_child))

        if apply:
            operation.score = score
            operation.pair_count = pairs
            self.log.operations.append(operation)
        return MergeCandidate(red=red, blue=blue, score=score, pair_count=pairs)
