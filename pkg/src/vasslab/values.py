"""Counter values: arbitrary-precision integers extended with a top element omega.

Valuations are plain dicts counter-id -> int | OMEGA. Ids are strings with
lexicographic ordering so every iteration over counters is deterministic.
"""

from __future__ import annotations

from fractions import Fraction


class Omega:
    """The top element: strictly above every finite value, absorbing under +."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "omega"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("__omega__")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        if isinstance(other, (int, Fraction)) or other is self:
            return other is not self
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, Fraction)) or other is self:
            return True
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) or other is self:
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        raise ArithmeticError("omega has no additive inverse")


OMEGA = Omega()


def is_omega(v) -> bool:
    return v is OMEGA


def omega_set(valuation: dict) -> frozenset:
    """The counters mapped to omega."""
    return frozenset(c for c, v in valuation.items() if v is OMEGA)


def val_add(a, b):
    """a + b with omega absorbing; b must be finite or omega."""
    if a is OMEGA or b is OMEGA:
        return OMEGA
    return a + b


def vec_add(valuation: dict, update: dict) -> dict:
    """Apply a finite update vector to a (possibly generalized) valuation."""
    return {c: val_add(v, update.get(c, 0)) for c, v in valuation.items()}


def value_to_json(v):
    return "omega" if v is OMEGA else v


def value_from_json(v):
    if v == "omega":
        return OMEGA
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"not a counter value: {v!r}")
    return v


class ExactOrOmega:
    """The specialization preorder: k <= k and k <= omega, nothing else.

    `restrict` limits the comparison to a counter subset; counters outside it
    are unconstrained.
    """

    def __init__(self, restrict=None):
        self.restrict = None if restrict is None else frozenset(restrict)

    def le(self, a, b) -> bool:
        if b is OMEGA:
            return True
        return a == b

    def __repr__(self):
        r = "" if self.restrict is None else f"|{sorted(self.restrict)}"
        return f"<=omega{r}"


class ModOmega:
    """Congruence-modulo-mu with omega on the right absorbing everything."""

    def __init__(self, mu: int, restrict=None):
        if mu < 1:
            raise ValueError("modulus must be >= 1")
        self.mu = mu
        self.restrict = None if restrict is None else frozenset(restrict)

    def le(self, a, b) -> bool:
        if b is OMEGA:
            return True
        if a is OMEGA:
            return False
        return (a - b) % self.mu == 0

    def __repr__(self):
        r = "" if self.restrict is None else f"|{sorted(self.restrict)}"
        return f"=mod{self.mu}^omega{r}"


def valuation_le(val: dict, bound: dict, orders) -> bool:
    """val <= bound under every preorder in `orders`, each on its restriction."""
    if not isinstance(orders, (list, tuple)):
        orders = [orders]
    for order in orders:
        counters = bound.keys() if order.restrict is None else order.restrict
        for c in counters:
            if not order.le(val[c], bound[c]):
                return False
    return True


def valuation_nonneg(val: dict, counters=None) -> bool:
    cs = val.keys() if counters is None else counters
    return all(val[c] is OMEGA or val[c] >= 0 for c in cs)
