import itertools

import pytest

from core.errors import ArgumentError, InvalidTokenError, PdfaError
from core.pdfa import Pdfa, eval_prefix_prob, eval_string_prob, random_pdfa
from tests.conftest import A, B, make_one_state


class TestEvalStringProb:
    @pytest.mark.parametrize(
        ("tokens", "expected"),
        [
            ((), 0.1),
            ((A,), 0.03),
            ((B,), 0.18),
            ((A, A), 0.009),
            ((A, B), 0.054),
            ((B, A), 0.012),
            ((B, B), 0.03),
            ((B, B, A), 0.006),
            ((B, B, B), 0.021),
        ],
    )
    def test_ladder_values(self, ladder, tokens, expected):
        assert eval_string_prob(ladder, tokens) == pytest.approx(expected)

    def test_invalid_token(self, ladder):
        with pytest.raises(InvalidTokenError) as exc_info:
            eval_string_prob(ladder, (A, 2))
        assert exc_info.value.token == 2
        assert "outside the alphabet of size 2" in str(exc_info.value)

    def test_negative_token(self, ladder):
        with pytest.raises(InvalidTokenError):
            eval_string_prob(ladder, (-1,))

    def test_undefined_transition_gives_zero(self):
        partial = Pdfa(
            n_states=1,
            alphabet_size=2,
            initial=0,
            trans={(0, A): 0},
            trans_prob={(0, A): 0.4},
            stop_prob=(0.6,),
        )
        assert eval_string_prob(partial, (B,)) == 0.0
        assert eval_string_prob(partial, (A, A)) == pytest.approx(0.4 * 0.4 * 0.6)

    def test_mass_over_short_strings(self, ladder):
        total = sum(
            eval_string_prob(ladder, tokens)
            for length in range(13)
            for tokens in itertools.product((A, B), repeat=length)
        )
        # strings longer than 12 carry at most 0.95**13 of the mass
        assert 1.0 - 0.95**13 <= total <= 1.0 + 1e-12


class TestEvalPrefixProb:
    def test_empty_prefix(self, ladder):
        assert eval_prefix_prob(ladder, ()) == 1.0

    @pytest.mark.parametrize(
        ("tokens", "expected"), [((A,), 0.3), ((B,), 0.6), ((B, B), 0.3), ((B, A, B), 0.072)]
    )
    def test_products(self, ladder, tokens, expected):
        assert eval_prefix_prob(ladder, tokens) == pytest.approx(expected)

    def test_matches_sum_of_extensions(self, ladder):
        for prefix in [(), (A,), (B,), (B, B)]:
            total = sum(
                eval_string_prob(ladder, prefix + suffix)
                for length in range(13)
                for suffix in itertools.product((A, B), repeat=length)
            )
            bound = eval_prefix_prob(ladder, prefix)
            assert bound * (1.0 - 0.95**13) - 1e-12 <= total <= bound + 1e-12


class TestValidation:
    def test_mass_must_sum_to_one(self):
        with pytest.raises(PdfaError) as exc_info:
            make_one_state((0.5,), 0.6)
        assert exc_info.value.state == 0
        assert "does not sum to 1" in str(exc_info.value)

    def test_probability_range(self):
        with pytest.raises(PdfaError, match="outside"):
            make_one_state((1.2,), -0.2)

    def test_unreachable_state(self):
        with pytest.raises(PdfaError) as exc_info:
            Pdfa(
                n_states=2,
                alphabet_size=1,
                initial=0,
                trans={(0, 0): 0, (1, 0): 1},
                trans_prob={(0, 0): 0.5, (1, 0): 0.5},
                stop_prob=(0.5, 0.5),
            )
        assert exc_info.value.state == 1
        assert "unreachable" in str(exc_info.value)

    def test_transition_needs_probability(self):
        with pytest.raises(PdfaError, match="exactly one probability"):
            Pdfa(
                n_states=1,
                alphabet_size=1,
                initial=0,
                trans={(0, 0): 0},
                trans_prob={},
                stop_prob=(1.0,),
            )

    def test_initial_state_must_exist(self):
        with pytest.raises(PdfaError, match="initial state"):
            Pdfa(n_states=1, alphabet_size=0, initial=3, trans={}, trans_prob={}, stop_prob=(1.0,))

    def test_default_labels(self, binary_sul):
        assert binary_sul.labels == ("0", "1")

    def test_label_count(self):
        with pytest.raises(PdfaError, match="token labels"):
            Pdfa(
                n_states=1,
                alphabet_size=0,
                initial=0,
                trans={},
                trans_prob={},
                stop_prob=(1.0,),
                labels=("x",),
            )

    def test_relabel_keeps_probabilities(self, binary_sul):
        relabeled = binary_sul.relabel(["x", "y"])
        assert relabeled.labels == ("x", "y")
        assert relabeled.trans_prob == binary_sul.trans_prob


class TestStateAfter:
    def test_ladder_states(self, ladder):
        assert ladder.state_after(()) == 0
        assert ladder.state_after((B,)) == 1
        assert ladder.state_after((B, A)) == 0
        assert ladder.state_after((B, B, A, B)) == 2

    def test_checks_tokens(self, ladder):
        with pytest.raises(InvalidTokenError):
            ladder.state_after((5,))


class TestRandomPdfa:
    def test_deterministic_for_seed(self):
        assert random_pdfa(5, 3, seed=7) == random_pdfa(5, 3, seed=7)

    def test_seed_changes_automaton(self):
        assert random_pdfa(5, 3, seed=1) != random_pdfa(5, 3, seed=2)

    @pytest.mark.parametrize("seed", range(5))
    def test_shape_and_stop_floor(self, seed):
        pdfa = random_pdfa(8, 4, seed=seed)
        assert pdfa.n_states == 8
        assert len(pdfa.trans) == 8 * 4
        assert pdfa.reachable_states() == set(range(8))
        assert min(pdfa.stop_prob) >= 0.05

    def test_mass_concentrates_on_short_strings(self):
        pdfa = random_pdfa(6, 3, seed=3)
        # distribution over states after each length, propagated forward
        state_mass = [0.0] * pdfa.n_states
        state_mass[pdfa.initial] = 1.0
        total = 0.0
        for _ in range(60):
            total += sum(m * pdfa.stop_prob[q] for q, m in enumerate(state_mass))
            nxt = [0.0] * pdfa.n_states
            for (q, token), target in pdfa.trans.items():
                nxt[target] += state_mass[q] * pdfa.trans_prob[(q, token)]
            state_mass = nxt
        assert total >= 0.9

    def test_rejects_bad_sizes(self):
        with pytest.raises(ArgumentError, match="n_states"):
            random_pdfa(0, 2, seed=0)
        with pytest.raises(ArgumentError, match="alphabet_size"):
            random_pdfa(2, 0, seed=0)
