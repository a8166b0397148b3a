"""Probabilistic deterministic finite automata: representation and evaluation.

Tokens are dense integer ids ``0..alphabet_size-1``; ``labels`` maps them to
external names. A string's probability is the product of the transition
probabilities along its path times the stop probability of the state it ends
in. An undefined transition gives probability 0 instead of an error.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace

import numpy as np

from core.errors import ArgumentError, InvalidTokenError, PdfaError


logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9
MIN_STOP_PROB = 0.05

Transition = tuple[int, int]


@dataclass(frozen=True)
class Pdfa:
    n_states: int
    alphabet_size: int
    initial: int
    trans: Mapping[Transition, int]
    trans_prob: Mapping[Transition, float]
    stop_prob: tuple[float, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "trans", dict(self.trans))
        object.__setattr__(self, "trans_prob", {k: float(v) for k, v in self.trans_prob.items()})
        object.__setattr__(self, "stop_prob", tuple(float(p) for p in self.stop_prob))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(a) for a in range(self.alphabet_size)))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))
        self._validate()

    def _validate(self) -> None:
        if self.n_states < 1:
            raise PdfaError("an automaton needs at least one state")
        if self.alphabet_size < 0:
            raise PdfaError("alphabet size cannot be negative")
        if not 0 <= self.initial < self.n_states:
            raise PdfaError(f"initial state {self.initial} does not exist", state=self.initial)
        if len(self.stop_prob) != self.n_states:
            raise PdfaError(
                f"expected {self.n_states} stop probabilities, got {len(self.stop_prob)}"
            )
        if len(self.labels) != self.alphabet_size:
            raise PdfaError(
                f"expected {self.alphabet_size} token labels, got {len(self.labels)}"
            )
        if set(self.trans) != set(self.trans_prob):
            raise PdfaError("every defined transition needs exactly one probability")

        mass = list(self.stop_prob)
        for (state, token), target in self.trans.items():
            if not 0 <= state < self.n_states:
                raise PdfaError(f"transition from unknown state {state}", state=state)
            if not 0 <= token < self.alphabet_size:
                raise PdfaError(f"state {state}: token {token} outside the alphabet", state=state)
            if not 0 <= target < self.n_states:
                raise PdfaError(f"state {state}: target {target} does not exist", state=state)
            p = self.trans_prob[(state, token)]
            if not 0.0 <= p <= 1.0:
                raise PdfaError(f"state {state}: transition probability {p} outside [0, 1]", state=state)
            mass[state] += p

        for state, stop in enumerate(self.stop_prob):
            if not 0.0 <= stop <= 1.0:
                raise PdfaError(f"state {state}: stop probability {stop} outside [0, 1]", state=state)
            if abs(mass[state] - 1.0) > NORMALIZATION_TOLERANCE:
                raise PdfaError(
                    f"state {state}: outgoing mass {mass[state]!r} does not sum to 1", state=state
                )

        unreachable = set(range(self.n_states)) - self.reachable_states()
        if unreachable:
            first = min(unreachable)
            raise PdfaError(f"state {first} is unreachable from the initial state", state=first)

    def reachable_states(self) -> set[int]:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            state = queue.popleft()
            for token in range(self.alphabet_size):
                target = self.trans.get((state, token))
                if target is not None and target not in seen:
                    seen.add(target)
                    queue.append(target)
        return seen

    def step(self, state: int, token: int) -> int | None:
        return self.trans.get((state, token))

    def state_after(self, tokens: Sequence[int]) -> int | None:
        """State reached by `tokens` from the initial state, None if the path breaks off."""
        self._check_tokens(tokens)
        state: int | None = self.initial
        for token in tokens:
            state = self.trans.get((state, token))
            if state is None:
                return None
        return state

    def relabel(self, labels: Sequence[str]) -> Pdfa:
        return replace(self, labels=tuple(labels))

    def _check_tokens(self, tokens: Sequence[int]) -> None:
        for token in tokens:
            if not 0 <= token < self.alphabet_size:
                raise InvalidTokenError(token, self.alphabet_size)


def eval_prefix_prob(pdfa: Pdfa, tokens: Sequence[int]) -> float:
    """P(x Sigma*): product of transition probabilities along x, no stop factor."""
    pdfa._check_tokens(tokens)
    state = pdfa.initial
    prob = 1.0
    for token in tokens:
        target = pdfa.trans.get((state, token))
        if target is None:
            return 0.0
        prob *= pdfa.trans_prob[(state, token)]
        state = target
    return prob


def eval_string_prob(pdfa: Pdfa, tokens: Sequence[int]) -> float:
    pdfa._check_tokens(tokens)
    state = pdfa.initial
    prob = 1.0
    for token in tokens:
        target = pdfa.trans.get((state, token))
        if target is None:
            return 0.0
        prob *= pdfa.trans_prob[(state, token)]
        state = target
    return prob * pdfa.stop_prob[state]


def random_pdfa(
    n_states: int,
    alphabet_size: int,
    seed: int,
    *,
    min_stop: float = MIN_STOP_PROB,
) -> Pdfa:
    """Sample a connected, total automaton; every state stops with probability >= `min_stop`.

    A random spanning tree over the states is drawn first so that every state
    is reachable, the remaining transitions get uniform targets, and each
    state's distribution over {stop} + Sigma is a flat Dirichlet draw scaled
    so the stop mass never falls below `min_stop`.
    """
    if n_states < 1:
        raise ArgumentError(f"n_states must be at least 1, got {n_states}")
    if alphabet_size < 1:
        raise ArgumentError(f"alphabet_size must be at least 1, got {alphabet_size}")
    if not 0.0 < min_stop < 1.0:
        raise ArgumentError(f"min_stop must lie in (0, 1), got {min_stop}")

    rng = np.random.default_rng(seed)

    trans: dict[Transition, int] = {}
    open_slots = [(0, token) for token in range(alphabet_size)]
    for state in range(1, n_states):
        slot = open_slots.pop(int(rng.integers(len(open_slots))))
        trans[slot] = state
        open_slots.extend((state, token) for token in range(alphabet_size))
    for slot in open_slots:
        trans[slot] = int(rng.integers(n_states))

    trans_prob: dict[Transition, float] = {}
    stop_prob = []
    free_mass = 1.0 - min_stop
    for state in range(n_states):
        draw = rng.dirichlet(np.ones(alphabet_size + 1))
        stop_prob.append(min_stop + free_mass * float(draw[0]))
        for token in range(alphabet_size):
            trans_prob[(state, token)] = free_mass * float(draw[token + 1])

    return Pdfa(
        n_states=n_states,
        alphabet_size=alphabet_size,
        initial=0,
        trans=trans,
        trans_prob=trans_prob,
        stop_prob=tuple(stop_prob),
    )
