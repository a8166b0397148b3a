"""JSON persistence for automata.

Probabilities are written with Python's shortest round-trip float repr rather
than a fixed 17 significant digits. Both parse back to the same double, so
``from_json(to_json(p)) == p`` holds bit for bit; the shortest form keeps
files readable (``0.1``, not ``0.10000000000000001``).
"""

from __future__ import annotations

import json
import logging

from pydantic import ValidationError

from core.errors import PdfaError, PdfaFormatError
from core.pdfa import NORMALIZATION_TOLERANCE, Pdfa, Transition
from models.documents import EdgeDocument, PdfaDocument, StateDocument


logger = logging.getLogger(__name__)

DOCUMENT_TOLERANCE = 1e-6


def to_document(pdfa: Pdfa) -> PdfaDocument:
    states = []
    for state in range(pdfa.n_states):
        edges = [
            EdgeDocument(
                token=pdfa.labels[token],
                to=pdfa.trans[(state, token)],
                p=pdfa.trans_prob[(state, token)],
            )
            for token in range(pdfa.alphabet_size)
            if (state, token) in pdfa.trans
        ]
        states.append(StateDocument(id=state, stop=pdfa.stop_prob[state], edges=edges))
    return PdfaDocument(alphabet=list(pdfa.labels), initial=pdfa.initial, states=states)


def to_json(pdfa: Pdfa) -> str:
    return json.dumps(to_document(pdfa).model_dump(), indent=2) + "\n"


def from_document(document: PdfaDocument) -> Pdfa:
    token_ids = {}
    for token_id, name in enumerate(document.alphabet):
        if name in token_ids:
            raise PdfaFormatError(f"token name {name!r} appears twice in the alphabet")
        token_ids[name] = token_id

    n_states = len(document.states)
    by_id = {}
    for state_doc in document.states:
        if state_doc.id >= n_states:
            raise PdfaFormatError(
                f"state {state_doc.id}: ids must be 0..{n_states - 1}", state=state_doc.id
            )
        if state_doc.id in by_id:
            raise PdfaFormatError(f"state {state_doc.id} is declared twice", state=state_doc.id)
        by_id[state_doc.id] = state_doc

    trans: dict[Transition, int] = {}
    trans_prob: dict[Transition, float] = {}
    stop_prob = [0.0] * n_states
    for state, state_doc in sorted(by_id.items()):
        for edge in state_doc.edges:
            token = token_ids.get(edge.token)
            if token is None:
                raise PdfaFormatError(f"state {state}: unknown token {edge.token!r}", state=state)
            if (state, token) in trans:
                raise PdfaFormatError(
                    f"state {state}: nondeterministic transitions on token {edge.token!r}",
                    state=state,
                )
            if edge.to >= n_states:
                raise PdfaFormatError(
                    f"state {state}: edge on {edge.token!r} targets missing state {edge.to}",
                    state=state,
                )
            trans[(state, token)] = edge.to
            trans_prob[(state, token)] = edge.p

        stop_prob[state] = state_doc.stop
        mass = state_doc.stop + sum(edge.p for edge in state_doc.edges)
        deviation = abs(mass - 1.0)
        if deviation > DOCUMENT_TOLERANCE:
            raise PdfaFormatError(
                f"state {state}: outgoing mass {mass!r} violates normalization", state=state
            )
        if deviation > NORMALIZATION_TOLERANCE:
            logger.debug(f"Renormalizing state {state} (mass {mass!r})")
            stop_prob[state] /= mass
            for token in range(len(document.alphabet)):
                if (state, token) in trans_prob:
                    trans_prob[(state, token)] /= mass

    if document.initial >= n_states:
        raise PdfaFormatError(f"initial state {document.initial} does not exist")

    try:
        return Pdfa(
            n_states=n_states,
            alphabet_size=len(document.alphabet),
            initial=document.initial,
            trans=trans,
            trans_prob=trans_prob,
            stop_prob=tuple(stop_prob),
            labels=tuple(document.alphabet),
        )
    except PdfaError as e:
        raise PdfaFormatError(str(e), state=e.state) from e


def from_json(text: str) -> Pdfa:
    # json.loads parses floats with correct rounding, which the round-trip guarantee relies on
    try:
        document = PdfaDocument.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise PdfaFormatError(f"automaton document is not valid JSON: {e}") from e
    except ValidationError as e:
        raise PdfaFormatError(f"malformed automaton document: {e}") from e
    return from_document(document)
