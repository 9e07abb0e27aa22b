import pytest

from vasslab.automata import (
    Nfa,
    dfa_profile,
    empty_nfa,
    enumerate_words,
    is_empty,
    nfa_from_json,
    nfa_to_dot,
    nfa_to_json,
    product,
    profiles_equal,
    run_word,
    strip_hash,
    union,
    universal_nfa,
)
from vasslab.errors import ArgumentError, StructuralError

from conftest import make_rng


def random_nfa(rng, letters=("a", "b"), max_states=4, eps=False):
    k = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(k)]
    labels = list(letters) + ([None] if eps else [])
    transitions = {
        (rng.choice(states), rng.choice(labels), rng.choice(states))
        for _ in range(rng.randint(1, 6))
    }
    initial = {states[0]}
    final = {rng.choice(states)}
    return Nfa(states, transitions, initial, final, letters)


def test_empty_nfa_language():
    assert enumerate_words(empty_nfa({"a"}), 3) == set()
    assert is_empty(empty_nfa({"a"}))


def test_single_loop():
    n = Nfa({"s"}, {("s", "a", "s")}, {"s"}, {"s"})
    assert enumerate_words(n, 3) == {(), ("a",), ("a", "a"), ("a", "a", "a")}


def test_epsilon_closure_membership():
    n = Nfa({"1", "2", "3"}, {("1", None, "2"), ("2", "a", "3")}, {"1"}, {"3"})
    assert run_word(n, ("a",))
    assert not run_word(n, ())


def test_product_with_universal():
    rng = make_rng(1)
    for _ in range(20):
        n = random_nfa(rng)
        u = universal_nfa(n.alphabet)
        assert enumerate_words(product(n, u), 6) == enumerate_words(n, 6)


def test_product_disjoint_singletons():
    n1 = Nfa({"0", "1"}, {("0", "a", "1")}, {"0"}, {"1"})
    n2 = Nfa({"0", "1"}, {("0", "b", "1")}, {"0"}, {"1"}, alphabet={"a", "b"})
    n1b = Nfa(n1.states, n1.transitions, n1.initial, n1.final, {"a", "b"})
    assert is_empty(product(n1b, n2))


def test_product_enumerate_consistency():
    rng = make_rng(2)
    for _ in range(25):
        x, y = random_nfa(rng, eps=True), random_nfa(rng, eps=True)
        x = Nfa(x.states, x.transitions, x.initial, x.final, ("a", "b"))
        y = Nfa(y.states, y.transitions, y.initial, y.final, ("a", "b"))
        assert enumerate_words(product(x, y), 6) == (
            enumerate_words(x, 6) & enumerate_words(y, 6)
        )


def test_strip_hash():
    ann = Nfa({"1", "2"}, {("1", ("a", True), "2"), ("2", ("b", False), "1")}, {"1"}, {"2"})
    plain = strip_hash(ann)
    assert enumerate_words(plain, 3) == {("a",), ("a", "b", "a")}
    again = strip_hash(plain)
    assert enumerate_words(again, 3) == enumerate_words(plain, 3)


def test_strip_hash_projects_language():
    ann = Nfa({"1", "2", "3"},
              {("1", ("a", True), "2"), ("1", ("a", False), "3")},
              {"1"}, {"2", "3"})
    assert enumerate_words(strip_hash(ann), 2) == {("a",)}


class TestDfaProfile:
    def test_one_state_all_equal(self):
        d = Nfa({"s"}, {("s", "a", "s")}, {"s"}, {"s"})
        assert profiles_equal(dfa_profile(d, ("a", "a", "a")), dfa_profile(d, ()))

    def test_parity(self):
        d = Nfa({"e", "o"}, {("e", "a", "o"), ("o", "a", "e")}, {"e"}, {"e"})
        assert profiles_equal(dfa_profile(d, ("a", "a")), dfa_profile(d, ()))
        assert not profiles_equal(dfa_profile(d, ("a",)), dfa_profile(d, ()))

    def test_nondeterministic_rejected(self):
        n = Nfa({"1", "2"}, {("1", "a", "1"), ("1", "a", "2"), ("2", "a", "2")}, {"1"}, {"2"})
        with pytest.raises(ArgumentError):
            dfa_profile(n, ("a",))

    def test_finite_index(self):
        # number of distinct profiles <= |Q|^|Q| on small total DFAs
        rng = make_rng(3)
        for _ in range(10):
            k = rng.randint(1, 3)
            states = [f"s{i}" for i in range(k)]
            trans = set()
            for s in states:
                for a in ("a", "b"):
                    trans.add((s, a, rng.choice(states)))
            d = Nfa(states, trans, {states[0]}, {states[0]}, ("a", "b"))
            profiles = set()
            words = [()]
            for _ in range(6):
                words = [w + (a,) for w in words for a in ("a", "b")]
                for w in words:
                    profiles.add(dfa_profile(d, w))
            assert len(profiles) <= k ** k


def test_pumping_profile_equality():
    # diff^N vs diff^{N + c N!} pumping words are ~A-equivalent
    from math import factorial

    rng = make_rng(4)
    for _ in range(20):
        k = rng.randint(1, 3)
        states = [f"s{i}" for i in range(k)]
        trans = set()
        for s in states:
            for a in ("a", "b"):
                trans.add((s, a, rng.choice(states)))
        d = Nfa(states, trans, {states[0]}, set(), ("a", "b"))
        diff = tuple(rng.choice(("a", "b")) for _ in range(rng.randint(1, 3)))
        c = rng.randint(1, 3)
        n = len(states)
        w1 = diff * n
        w2 = diff * (n + c * factorial(n))
        assert profiles_equal(dfa_profile(d, w1), dfa_profile(d, w2))


def test_union():
    n1 = Nfa({"0", "1"}, {("0", "a", "1")}, {"0"}, {"1"}, {"a", "b"})
    n2 = Nfa({"0", "1"}, {("0", "b", "1")}, {"0"}, {"1"}, {"a", "b"})
    assert enumerate_words(union([n1, n2]), 2) == {("a",), ("b",)}


def test_json_and_dot():
    n = Nfa({"1", "2"}, {("1", ("a", True), "2")}, {"1"}, {"2"})
    doc = nfa_to_json(n)
    assert doc["transitions"][0]["hash"] is True
    back = nfa_from_json(doc)
    assert enumerate_words(back, 2) == enumerate_words(n, 2)
    assert "digraph" in nfa_to_dot(n)


def test_undeclared_endpoint_is_structural():
    with pytest.raises(StructuralError):
        Nfa({"1"}, {("1", "a", "2")}, {"1"}, set())
