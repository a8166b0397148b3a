"""Graphviz renderings of automata and observation trees."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from typing import TYPE_CHECKING


if TYPE_CHECKING:
    from core.observation_tree import ObservationTree
    from core.pdfa import Pdfa


EMPTY_STRING = "λ"


def _gvquote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def _fmt(p: float) -> str:
    return f"{p:.6g}"


def _pdfa_lines(pdfa: Pdfa, labels: Sequence[str]) -> Iterator[str]:
    yield "digraph pdfa {\n"
    yield "  rankdir=LR;\n"
    yield '  __start [shape=point label=""];\n'
    for state in range(pdfa.n_states):
        label = _gvquote(f"q{state}/{_fmt(pdfa.stop_prob[state])}")
        yield f"  q{state} [shape=circle label={label}];\n"
    yield f"  __start -> q{pdfa.initial};\n"
    for state in range(pdfa.n_states):
        for token in range(pdfa.alphabet_size):
            target = pdfa.trans.get((state, token))
            if target is None:
                continue
            label = _gvquote(f"{labels[token]}/{_fmt(pdfa.trans_prob[(state, token)])}")
            yield f"  q{state} -> q{target} [label={label}];\n"
    yield "}\n"


def to_dot(pdfa: Pdfa, labels: Sequence[str] | None = None) -> str:
    return "".join(_pdfa_lines(pdfa, labels if labels is not None else pdfa.labels))


def _tree_lines(tree: ObservationTree, labels: Sequence[str]) -> Iterator[str]:
    yield "digraph observation_tree {\n"
    yield "  rankdir=TB;\n"
    for node in tree.nodes:
        access = tree.access_sequence(node.id)
        name = " ".join(labels[token] for token in access) or EMPTY_STRING
        label = _gvquote(f"{name} : {_fmt(node.access_prob)}")
        yield f"  n{node.id} [shape=box color={node.color.value} label={label}];\n"
    for node in tree.nodes:
        if node.parent is not None:
            yield f"  n{node.parent} -> n{node.id} [label={_gvquote(labels[node.via])}];\n"
    yield "}\n"


def tree_to_dot(tree: ObservationTree, labels: Sequence[str] | None = None) -> str:
    """Debug rendering: one box per node labeled with its access sequence and P(x)."""
    if labels is None:
        labels = [str(token) for token in range(tree.alphabet_size)]
    return "".join(_tree_lines(tree, labels))
