"""Observation tree of queried strings.

Every node stands for the string spelled by its root path (its access
sequence) and carries four attributes:

- ``access_prob``: P(x) as answered by the teacher,
- ``stop_est`` / ``trans_est``: the current stop and transition estimates,
- ``weight``: probability mass observed below each outgoing edge.

The one-step answers P(xa) are also kept unchanged in ``next_prob``; the
merge engine compares nodes on them.

``children`` doubles as the transition map of the machine being minimized:
the merge engine redirects and attaches edges in place and the learner puts
the tree back with :meth:`ObservationTree.restore`. Every other method
expects the pure tree.
"""

from __future__ import annotations

import copy
import hashlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from core.errors import ArgumentError, TreeConsistencyError


if TYPE_CHECKING:
    from core.teacher.provider import Teacher


logger = logging.getLogger(__name__)


class Color(str, Enum):
    RED = "red"
    BLUE = "blue"
    WHITE = "white"


@dataclass(slots=True)
class ObsNode:
    id: int
    parent: int | None
    via: int | None
    depth: int
    children: dict[int, int] = field(default_factory=dict)
    stop_est: float = 0.0
    trans_est: list[float] = field(default_factory=list)
    access_prob: float = 0.0
    weight: list[float] = field(default_factory=list)
    next_prob: list[float] = field(default_factory=list)
    color: Color = Color.WHITE
    initialized: bool = False


@dataclass(frozen=True)
class Snapshot:
    nodes: tuple[ObsNode, ...]
    fringe: tuple[int, ...]
    extend_count: int
    skipped: frozenset[int]


class ObservationTree:
    def __init__(self, alphabet_size: int, *, exclude_final_edge: bool = False):
        if alphabet_size < 0:
            raise ArgumentError(f"alphabet_size cannot be negative, got {alphabet_size}")
        self.alphabet_size = alphabet_size
        self.exclude_final_edge = exclude_final_edge
        self.nodes: list[ObsNode] = []
        self.root = self.add_node(None, None)
        self.fringe: list[int] = [self.root]
        self.extend_count = 0
        self.skipped: set[int] = set()

    def __len__(self) -> int:
        return len(self.nodes)

    # ------------------------------------------------------------------
    # structure
    # ------------------------------------------------------------------

    def add_node(self, parent: int | None, token: int | None) -> int:
        """Create an uninitialized node under `parent`; colors follow the starting condition."""
        node_id = len(self.nodes)
        if parent is None:
            depth, color = 0, Color.RED
        else:
            parent_node = self.nodes[parent]
            if token in parent_node.children:
                raise TreeConsistencyError(f"node {parent} already has a child on token {token}")
            depth = parent_node.depth + 1
            color = Color.BLUE if parent == self.root else Color.WHITE
            parent_node.children[token] = node_id
        self.nodes.append(
            ObsNode(
                id=node_id,
                parent=parent,
                via=token,
                depth=depth,
                trans_est=[0.0] * self.alphabet_size,
                weight=[0.0] * self.alphabet_size,
                next_prob=[0.0] * self.alphabet_size,
                color=color,
            )
        )
        return node_id

    def access_sequence(self, q: int) -> tuple[int, ...]:
        tokens = []
        node = self.nodes[q]
        while node.parent is not None:
            tokens.append(node.via)
            node = self.nodes[node.parent]
        return tuple(reversed(tokens))

    def node_at(self, tokens: Sequence[int]) -> int | None:
        q = self.root
        for token in tokens:
            child = self.nodes[q].children.get(token)
            if child is None:
                return None
            q = child
        return q

    def leaves(self) -> list[int]:
        return [node.id for node in self.nodes if not node.children]

    # ------------------------------------------------------------------
    # growth
    # ------------------------------------------------------------------

    def extend_fringe(self, teacher: Teacher) -> list[int]:
        """Give every fringe node a child per token; the children become the new fringe."""
        new_fringe = []
        for q in self.fringe:
            for token in range(self.alphabet_size):
                child = self.nodes[q].children.get(token)
                if child is None:
                    child = self.add_node(q, token)
                    self.initialize_node(child, teacher)
                new_fringe.append(child)
        self.fringe = new_fringe
        self.extend_count += 1
        logger.debug(
            f"Extended fringe to depth {self.extend_count}: "
            f"{len(new_fringe)} fringe nodes, {len(self.nodes)} total"
        )
        return new_fringe

    def initialize_node(self, q: int, teacher: Teacher) -> None:
        node = self.nodes[q]
        if node.initialized:
            raise TreeConsistencyError(f"node {q} is already initialized")
        access = self.access_sequence(q)

        p = teacher.string_prob(access)
        node.access_prob = p
        node.stop_est = p
        for token in range(self.alphabet_size):
            p_next = teacher.string_prob((*access, token))
            node.weight[token] = p_next
            node.trans_est[token] = p_next
            node.next_prob[token] = p_next
        node.initialized = True

        self.update_path(q, access, p)

    def update_path(self, q: int, tokens: Sequence[int], p: float) -> None:
        """Add `p` to the weight of every edge on the root path spelled by `tokens`.

        With `exclude_final_edge` the edge into `q` itself is left alone, since
        the parent seeded it with the same mass when it was initialized.
        """
        n_edges = len(tokens)
        if self.exclude_final_edge:
            n_edges -= 1
        current = self.root
        for i in range(max(n_edges, 0)):
            token = tokens[i]
            child = self.nodes[current].children.get(token)
            if child is None:
                raise TreeConsistencyError(
                    f"path to node {q} breaks off after {i} tokens at node {current}"
                )
            self.nodes[current].weight[token] += p
            current = child

    # ------------------------------------------------------------------
    # estimation
    # ------------------------------------------------------------------

    def normalize_node(self, q: int) -> None:
        node = self.nodes[q]
        remainder = 1.0 - node.stop_est
        total = sum(node.weight)
        if total > 0:
            factor = remainder / total
            node.trans_est = [factor * w for w in node.weight]
        elif self.alphabet_size:
            share = remainder / self.alphabet_size
            node.trans_est = [share] * self.alphabet_size

    def dfs_update(self) -> None:
        """Recompute estimates top-down so the tree reproduces every access probability.

        A node reached with path product 0 cannot be rescaled; it and its
        subtree keep their previous estimates and are listed in `skipped`.
        """
        self.skipped = set()
        visited = set()
        stack = [(self.root, 1.0)]
        while stack:
            q, p = stack.pop()
            if q in visited:
                raise TreeConsistencyError(f"node {q} reached twice; the tree is not pure")
            visited.add(q)
            node = self.nodes[q]
            if p == 0.0:
                self._skip_subtree(q)
                continue
            node.stop_est = node.access_prob / p
            self.normalize_node(q)
            for token, child in sorted(node.children.items()):
                stack.append((child, p * node.trans_est[token]))

    def _skip_subtree(self, q: int) -> None:
        logger.debug(f"Path product of node {q} is 0; freezing its subtree")
        stack = [q]
        while stack:
            current = stack.pop()
            self.skipped.add(current)
            stack.extend(self.nodes[current].children.values())

    def prefix_probs(self) -> list[float]:
        """Product of trans_est along each node's access path, in node order."""
        prefix = [1.0] * len(self.nodes)
        for node in self.nodes[1:]:
            prefix[node.id] = prefix[node.parent] * self.nodes[node.parent].trans_est[node.via]
        return prefix

    def prefix_prob(self, q: int) -> float:
        prob = 1.0
        current = q
        path = []
        while self.nodes[current].parent is not None:
            path.append(current)
            current = self.nodes[current].parent
        for node_id in reversed(path):
            node = self.nodes[node_id]
            prob *= self.nodes[node.parent].trans_est[node.via]
        return prob

    def path_prob(self, q: int) -> float:
        """The tree's own probability for the access sequence of `q`."""
        return self.prefix_prob(q) * self.nodes[q].stop_est

    def overshooting(self) -> list[int]:
        """Nodes the last update reached whose stop estimate exceeds 1."""
        return [
            node.id
            for node in self.nodes
            if node.id not in self.skipped and node.stop_est > 1.0
        ]

    def max_access_error(self) -> float:
        """Largest |tree probability - access_prob| over the nodes the last update reached."""
        prefix = self.prefix_probs()
        worst = 0.0
        for node in self.nodes:
            if node.id in self.skipped:
                continue
            worst = max(worst, abs(prefix[node.id] * node.stop_est - node.access_prob))
        return worst

    # ------------------------------------------------------------------
    # colors and checkpoints
    # ------------------------------------------------------------------

    def reset_colors(self) -> None:
        for node in self.nodes:
            node.color = Color.WHITE
        root = self.nodes[self.root]
        root.color = Color.RED
        for child in root.children.values():
            self.nodes[child].color = Color.BLUE

    def red_nodes(self) -> list[int]:
        return [node.id for node in self.nodes if node.color is Color.RED]

    def snapshot(self) -> Snapshot:
        return Snapshot(
            nodes=tuple(copy.deepcopy(self.nodes)),
            fringe=tuple(self.fringe),
            extend_count=self.extend_count,
            skipped=frozenset(self.skipped),
        )

    def restore(self, snapshot: Snapshot) -> None:
        self.nodes = copy.deepcopy(list(snapshot.nodes))
        self.fringe = list(snapshot.fringe)
        self.extend_count = snapshot.extend_count
        self.skipped = set(snapshot.skipped)
        self.reset_colors()

    def structural_hash(self) -> str:
        digest = hashlib.sha256()
        for node in self.nodes:
            digest.update(
                repr(
                    (
                        node.id,
                        node.parent,
                        node.via,
                        sorted(node.children.items()),
                        node.stop_est,
                        node.trans_est,
                        node.access_prob,
                        node.weight,
                        node.next_prob,
                        node.color.value,
                    )
                ).encode()
            )
        digest.update(repr((self.fringe, self.extend_count)).encode())
        return digest.hexdigest()
