from hypothesis import given
from hypothesis import strategies as st

from vasslab.values import (
    OMEGA,
    ExactOrOmega,
    ModOmega,
    Omega,
    is_omega,
    omega_set,
    valuation_le,
    value_from_json,
    value_to_json,
    vec_add,
)


def test_omega_is_a_singleton():
    assert Omega() is OMEGA


def test_omega_absorbs_addition():
    assert OMEGA + 5 is OMEGA
    assert -3 + OMEGA is OMEGA
    assert OMEGA + OMEGA is OMEGA


@given(st.integers(min_value=-10**18, max_value=10**18))
def test_omega_above_every_finite_value(x):
    assert OMEGA > x
    assert x < OMEGA
    assert not OMEGA <= x
    assert OMEGA >= x


def test_value_json_roundtrip_arbitrary_precision():
    big = 10**60 + 7
    assert value_from_json(value_to_json(big)) == big
    assert value_from_json(value_to_json(OMEGA)) is OMEGA


def test_omega_set_stable_under_copy():
    v = {"a": OMEGA, "b": 3}
    assert omega_set(v) == {"a"}
    assert omega_set(dict(v)) == {"a"}


def test_vec_add_keeps_omega():
    v = vec_add({"a": OMEGA, "b": 1}, {"a": -5, "b": 2})
    assert is_omega(v["a"]) and v["b"] == 3


def test_specialization_preorder():
    o = ExactOrOmega()
    assert o.le(3, 3) and o.le(3, OMEGA) and not o.le(3, 4)
    assert not o.le(OMEGA, 3) and o.le(OMEGA, OMEGA)


def test_mod_omega_preorder():
    m = ModOmega(3)
    assert m.le(5, 2) and m.le(2, 5) and not m.le(1, 3)
    assert m.le(7, OMEGA) and not m.le(OMEGA, 1)


def test_mod_implied_by_exact():
    # ≡_mu^ω acceptance is implied by ≤_ω acceptance
    for mu in range(1, 7):
        m = ModOmega(mu)
        e = ExactOrOmega()
        for a in range(0, 21):
            for b in list(range(0, 21)) + [OMEGA]:
                if e.le(a, b):
                    assert m.le(a, b)


def test_restricted_comparison():
    bound = {"a": 1, "b": 2}
    assert valuation_le({"a": 1, "b": 99}, bound, [ExactOrOmega(restrict={"a"})])
    assert not valuation_le({"a": 2, "b": 2}, bound, [ExactOrOmega(restrict={"a"})])
