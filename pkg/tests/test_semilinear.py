import pytest

from vasslab.automata import Nfa, enumerate_words
from vasslab.errors import ArgumentError
from vasslab.model import (
    dec_letter,
    dyck_alphabet,
    inc_letter,
    is_dyck_word,
    word_effect,
)
from vasslab.semilinear import (
    BasicSeparatorDesc,
    LinearSet,
    RejectedChain,
    approx_automaton,
    approx_member,
    basic_member,
    basic_separators_for_regular,
    counterexample_member,
    counterexample_nfa,
    family_cov,
    family_drift,
    family_mod,
    fold_nfa_to_dmgts_list,
    lin_member,
    make_basic_separator,
    move_word,
    nfa_to_linear_cover,
    period_deduction_check,
    pos_sum_contains_zero,
    singleton_set,
)

from conftest import make_rng

A1, AB1, A2, AB2 = inc_letter(1), dec_letter(1), inc_letter(2), dec_letter(2)


def random_sparse_nfa(rng, n=1, max_states=3, max_trans=5):
    k = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(k)]
    letters = dyck_alphabet(n)
    transitions = set()
    for _ in range(rng.randint(1, max_trans)):
        transitions.add((rng.choice(states), rng.choice(letters), rng.choice(states)))
    return Nfa(states, transitions, {states[0]}, {rng.choice(states)}, letters)


class TestApprox:
    def test_even_set(self):
        lin = LinearSet((0,), ((2,), (-2,)))
        assert approx_member(lin, 2, (A1, A1))
        assert not approx_member(lin, 2, (A1,))

    def test_epsilon_needs_zero_in_set(self):
        assert not approx_member(LinearSet((1,), ()), 2, ())
        assert approx_member(LinearSet((0,), ()), 2, ())

    def test_soundness_all_accepted_effects_in_set(self):
        rng = make_rng(41)
        for _ in range(10):
            base = (rng.randint(-2, 2),)
            periods = tuple((rng.randint(-2, 2),) for _ in range(rng.randint(0, 2)))
            lin = LinearSet(base, periods)
            auto = approx_automaton(lin, 3)
            for w in enumerate_words(auto, 5):
                assert lin_member(lin, word_effect(w, 1))


class TestCover:
    def test_one_state_loop(self):
        nfa = Nfa({"s"}, {("s", A1, "s")}, {"s"}, {"s"}, dyck_alphabet(1))
        k, lins = nfa_to_linear_cover(nfa)
        assert k == 4
        assert LinearSet((0,), ((1,),)) in lins

    def test_single_word(self):
        nfa = Nfa({"0", "1"}, {("0", A1, "1")}, {"0"}, {"1"}, dyck_alphabet(1))
        k, lins = nfa_to_linear_cover(nfa)
        assert lins == [LinearSet((1,), ())]

    def test_cover_property(self):
        rng = make_rng(42)
        for _ in range(15):
            nfa = random_sparse_nfa(rng, n=1)
            k, lins = nfa_to_linear_cover(nfa)
            for w in enumerate_words(nfa, 6):
                assert any(approx_member(lin, k, w) for lin in lins), w

    def test_effect_preservation(self):
        rng = make_rng(43)
        for _ in range(8):
            nfa = random_sparse_nfa(rng, n=1, max_trans=4)
            k, lins = nfa_to_linear_cover(nfa)
            nfa_effects = {word_effect(w, 1) for w in enumerate_words(nfa, 6)}
            # accepted effects all lie in some linear set
            for e in nfa_effects:
                assert any(lin_member(lin, e) for lin in lins)

    def test_epsilon_rejected(self):
        nfa = Nfa({"0", "1"}, {("0", None, "1")}, {"0"}, {"1"}, dyck_alphabet(1))
        with pytest.raises(ArgumentError):
            nfa_to_linear_cover(nfa)


class TestPosSum:
    def test_plus_minus_reaches_zero(self):
        assert pos_sum_contains_zero([singleton_set((1,)), singleton_set((-1,))]) is not None

    def test_negative_first_operand_empty(self):
        assert pos_sum_contains_zero([singleton_set((-1,)), singleton_set((1,))]) is None

    def test_left_fold_order_matters(self):
        chain_a = [singleton_set((-1,)), singleton_set((1,)), singleton_set((0,))]
        assert pos_sum_contains_zero(chain_a) is None

    def test_make_basic_separator_rejection_carries_witness(self):
        out = make_basic_separator([singleton_set((1,)), singleton_set((-1,))], 1)
        assert isinstance(out, RejectedChain)
        desc = make_basic_separator([singleton_set((1,))], 1)
        assert isinstance(desc, BasicSeparatorDesc)
        assert not basic_member(desc, ())


class TestFamilies:
    def test_mod(self):
        m = family_mod(2, (1,))
        assert basic_member(m, (A1,))
        assert not basic_member(m, (A1, A1))
        with pytest.raises(ArgumentError):
            family_mod(2, (0,))

    def test_mod_disjoint_from_dyck(self):
        from vasslab.driver import dyck_words

        m = family_mod(2, (1, 0), n=2)
        for w in dyck_words(2, 6):
            assert not basic_member(m, w)

    def test_cov(self):
        k = family_cov(1, 1, 1)
        assert basic_member(k, (AB1,))

    def test_cov_matches_predicate(self):
        # K_{k,i}: counter i dips below zero while never exceeding k before that
        k11 = family_cov(2, 1, 1)

        def predicate(w):
            v = 0
            for pos, a in enumerate(w):
                v += 1 if a == A1 else -1
                if v < 0:
                    return all(
                        0 <= sum(1 if b == A1 else -1 for b in w[:q + 1]) <= 2
                        for q in range(pos)
                    )
            return False

        words = [()]
        for _ in range(5):
            words = [w + (a,) for w in words for a in dyck_alphabet(1)]
            for w in words:
                if predicate(w):
                    assert basic_member(k11, w), w

    def test_drift(self):
        d = family_drift((1, 0), 0)
        assert basic_member(d, (A1,))
        assert not basic_member(d, (AB1, A1))

    def test_drift_against_predicate(self):
        # bounded cross-check of the defining predicate on words <= 5 (n=1)
        d = family_drift((1,), 2)

        def in_drift(w):
            eff = word_effect(w, 1)[0]
            if eff <= 0:
                return False
            return all(
                sum(1 if a == A1 else -1 for a in w[i:j]) >= -2
                for i in range(len(w)) for j in range(i, len(w) + 1)
            )

        words = [()]
        hits = 0
        for _ in range(5):
            words = [w + (a,) for w in words for a in dyck_alphabet(1)]
        for w in words:
            if in_drift(w):
                assert basic_member(d, w), w
                hits += 1
        assert hits > 0


class TestCounterexample:
    def test_shape_membership(self):
        assert counterexample_member(1, (A1, A1, A2))
        assert not counterexample_member(1, (A2,))

    def test_move_words_members(self):
        for ell in (1, 2, 3):
            for i in range(0, 5):
                assert counterexample_member(ell, move_word(i, ell))

    def test_disjoint_from_dyck(self):
        for ell in (1, 2):
            nfa = counterexample_nfa(ell)
            for w in enumerate_words(nfa, 10):
                assert not is_dyck_word(w, 2)

    def test_induction_inequality(self):
        for ell in (1, 2):
            nfa = counterexample_nfa(ell)
            for w in enumerate_words(nfa, 10):
                vals = [0, 0]
                prefix_ok = True
                for a in w:
                    e = word_effect((a,), 2)
                    vals[0] += e[0]
                    vals[1] += e[1]
                    if vals[0] < 0 or vals[1] < 0:
                        prefix_ok = False
                        break
                if prefix_ok:
                    assert ell * vals[0] >= vals[1] + ell


class TestPeriodDeduction:
    def test_extracts_scale(self):
        lin = LinearSet((0,), ((2,),))
        y = period_deduction_check(lin, 1, (A1,), 3, suffix=(A1,))
        assert y is not None
        assert lin_member(LinearSet((0,), lin.periods), tuple(y * e for e in word_effect((A1,), 1)))

    def test_no_repetition_none(self):
        lin = LinearSet((1,), ())
        assert period_deduction_check(lin, 1, (A1,), 1) in (None, 1)
        # a word that is not accepted at all gives None
        assert period_deduction_check(lin, 1, (AB1,), 3) is None


class TestBasicSeparatorsForRegular:
    def test_positive_effect_language(self):
        # a1 · (a1 ā1)*: every effect >= 1, disjoint from the Dyck language
        nfa = Nfa({"0", "1", "2"},
                  {("0", A1, "1"), ("1", A1, "2"), ("2", AB1, "1")},
                  {"0"}, {"1"}, dyck_alphabet(1))
        cover = basic_separators_for_regular(nfa, n=1)
        assert cover
        for w in enumerate_words(nfa, 8):
            assert any(basic_member(d, w) for d in cover), w
        from vasslab.driver import dyck_words

        for d in cover:
            for w in dyck_words(1, 10):
                assert not basic_member(d, w)

    def test_dyck_intersecting_refused(self):
        nfa = Nfa({"0", "1"}, {("0", A1, "1"), ("1", AB1, "0")},
                  {"0"}, {"0"}, dyck_alphabet(1))
        with pytest.raises(ArgumentError):
            basic_separators_for_regular(nfa, n=1)

    def test_odd_effect_language_gets_mod_cover(self):
        # a1 (a1 a1)*: effect ≡ 1 mod 2
        nfa = Nfa({"0", "1"}, {("0", A1, "1"), ("1", A1, "0")},
                  {"0"}, {"1"}, dyck_alphabet(1))
        cover = basic_separators_for_regular(nfa, n=1)
        for w in enumerate_words(nfa, 7):
            assert any(basic_member(d, w) for d in cover), w


def test_linear_set_and_descriptor_json():
    import json

    from vasslab.semilinear import descriptor_to_json, linear_set_from_json, linear_set_to_json

    lin = LinearSet((1, -2), ((2, 0), (0, 3)))
    assert linear_set_from_json(linear_set_to_json(lin)) == lin
    desc = family_mod(2, (1,))
    doc = descriptor_to_json(desc)
    json.dumps(doc)
    assert doc["certificate"] and doc["k"] == desc.k


def test_fold_nfa_preserves_bounded_language():
    from vasslab.mgts import LanguageCaps, side_language_bounded
    from conftest import strip_words

    nfa = Nfa({"0", "1", "2"},
              {("0", A1, "1"), ("1", A1, "2"), ("2", AB1, "1")},
              {"0"}, {"1"}, dyck_alphabet(1))
    want = enumerate_words(nfa, 6)
    got = set()
    for dm in fold_nfa_to_dmgts_list(nfa, 1):
        got |= strip_words(side_language_bounded(
            dm, "x", 6, "nat", LanguageCaps(max_run_len=10, value_cap=24)).words)
    assert got == want
