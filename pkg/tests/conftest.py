import tempfile
from pathlib import Path

import pytest

from config import Config
from core.observation_tree import ObservationTree
from core.pdfa import Pdfa
from core.serialization import to_json
from core.teacher.providers.exact import ExactPdfaTeacher


REPO_ROOT = Path(__file__).resolve().parent.parent

A, B = 0, 1


def make_ladder() -> Pdfa:
    """Three states over {a, b}: q0 loops on a, b walks q0 -> q1 -> q2, q2 absorbs."""
    return Pdfa(
        n_states=3,
        alphabet_size=2,
        initial=0,
        trans={(0, A): 0, (0, B): 1, (1, A): 0, (1, B): 2, (2, A): 2, (2, B): 2},
        trans_prob={(0, A): 0.3, (0, B): 0.6, (1, A): 0.2, (1, B): 0.5, (2, A): 0.2, (2, B): 0.7},
        stop_prob=(0.1, 0.3, 0.1),
        labels=("a", "b"),
    )


def make_one_state(probs: tuple[float, ...], stop: float) -> Pdfa:
    return Pdfa(
        n_states=1,
        alphabet_size=len(probs),
        initial=0,
        trans={(0, token): 0 for token in range(len(probs))},
        trans_prob={(0, token): p for token, p in enumerate(probs)},
        stop_prob=(stop,),
    )


def grow_tree(teacher, depth: int, *, exclude_final_edge: bool = False) -> ObservationTree:
    tree = ObservationTree(teacher.alphabet_size, exclude_final_edge=exclude_final_edge)
    tree.initialize_node(tree.root, teacher)
    for _ in range(depth):
        tree.extend_fringe(teacher)
    tree.dfs_update()
    return tree


def annotate_tree(tree: ObservationTree, pdfa: Pdfa) -> ObservationTree:
    """Overwrite every node's estimates with the true values of the state it reaches."""
    for node in tree.nodes:
        state = pdfa.state_after(tree.access_sequence(node.id))
        node.stop_est = pdfa.stop_prob[state]
        node.trans_est = [pdfa.trans_prob[(state, token)] for token in range(pdfa.alphabet_size)]
    return tree


@pytest.fixture
def ladder() -> Pdfa:
    return make_ladder()


@pytest.fixture
def ladder_teacher(ladder) -> ExactPdfaTeacher:
    return ExactPdfaTeacher(ladder)


@pytest.fixture
def unary_sul() -> Pdfa:
    return make_one_state((0.5,), 0.5)


@pytest.fixture
def binary_sul() -> Pdfa:
    return make_one_state((0.2, 0.3), 0.5)


@pytest.fixture
def annotated_ladder_tree(ladder_teacher, ladder) -> ObservationTree:
    return annotate_tree(grow_tree(ladder_teacher, 4), ladder)


@pytest.fixture
def ladder_file(ladder):
    temp_file = tempfile.NamedTemporaryFile(  # noqa: SIM115
        mode="w", delete=False, suffix=".json", encoding="utf-8"
    )
    temp_file.write(to_json(ladder))
    temp_file.close()

    yield Path(temp_file.name)

    Path(temp_file.name).unlink(missing_ok=True)


@pytest.fixture
def config(monkeypatch):
    for key in ("PDFA_DISTILL_LOG", "PDFA_DISTILL_TEACHER_TIMEOUT", "PDFA_DISTILL_TEACHER_ATTEMPTS"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setattr("config.load_dotenv", lambda **kwargs: False)
    return Config.from_env()
