"""Exact linear programming and integer feasibility.

Systems hold equalities, selective non-negativity, fixed values, and
congruences. The LP layer is a two-phase rational simplex with Bland's rule;
integer feasibility is branch-and-bound over the exact relaxation with a
deterministic branch order (lowest-index fractional variable, floor first).
No floating point anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd

from .errors import ArgumentError, ResourceExhausted

UNBOUNDED = "unbounded"

# cumulative call counters, reported in decomposition traces
STATS = {"lp_calls": 0, "ilp_calls": 0}


class LinSystem:
    def __init__(self, vars, eqs=(), nonneg=(), fixed=None, congruences=()):
        self.vars = tuple(vars)
        varset = set(self.vars)
        if len(varset) != len(self.vars):
            raise ArgumentError("duplicate variables")
        self.eqs = tuple((dict(coeffs), rhs) for coeffs, rhs in eqs)
        self.nonneg = frozenset(nonneg)
        self.fixed = dict(fixed or {})
        self.congruences = tuple((dict(coeffs), r, m) for coeffs, r, m in congruences)
        for coeffs, _ in self.eqs:
            if not set(coeffs) <= varset:
                raise ArgumentError("equation references undeclared variables")
        for coeffs, _, m in self.congruences:
            if not set(coeffs) <= varset:
                raise ArgumentError("congruence references undeclared variables")
            if m < 1:
                raise ArgumentError("congruence modulus must be >= 1")
        if not self.nonneg <= varset or not set(self.fixed) <= varset:
            raise ArgumentError("constraint on undeclared variable")

    def with_fixed(self, var, value) -> "LinSystem":
        fixed = dict(self.fixed)
        fixed[var] = value
        return LinSystem(self.vars, self.eqs, self.nonneg, fixed, self.congruences)

    def satisfied_by(self, assignment) -> bool:
        for v in self.vars:
            if v not in assignment:
                return False
        for coeffs, rhs in self.eqs:
            if sum(c * assignment[x] for x, c in coeffs.items()) != rhs:
                return False
        for v in self.nonneg:
            if assignment[v] < 0:
                return False
        for v, k in self.fixed.items():
            if assignment[v] != k:
                return False
        for coeffs, r, m in self.congruences:
            if (sum(c * assignment[x] for x, c in coeffs.items()) - r) % m != 0:
                return False
        return True

    def to_json(self) -> dict:
        key = lambda v: v if isinstance(v, str) else repr(v)
        return {
            "vars": [key(v) for v in self.vars],
            "eqs": [[{key(x): c for x, c in coeffs.items()}, rhs] for coeffs, rhs in self.eqs],
            "nonneg": sorted(key(v) for v in self.nonneg),
            "fixed": {key(v): k for v, k in sorted(self.fixed.items(), key=repr)},
            "congruences": [
                [{key(x): c for x, c in coeffs.items()}, r, m]
                for coeffs, r, m in self.congruences
            ],
        }

    def dump(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class Solution:
    """An integer assignment; checked against its system on construction."""

    assignment: dict
    system: LinSystem

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))
        if not self.system.satisfied_by(self.assignment):
            raise ArgumentError("assignment does not satisfy the system")

    def __getitem__(self, var):
        return self.assignment[var]


# -- rational simplex ---------------------------------------------------------

def _pivot(rows, basis, r, c):
    piv = rows[r][c]
    rows[r] = [x / piv for x in rows[r]]
    for i in range(len(rows)):
        if i != r and rows[i][c] != 0:
            f = rows[i][c]
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
    basis[r] = c


def _simplex_core(rows, basis, cost, ncols):
    """Maximize over a tableau already canonical in `basis`. Returns status."""
    while True:
        cb = [cost[basis[i]] for i in range(len(rows))]
        entering = -1
        for j in range(ncols):
            red = cost[j] - sum(cb[i] * rows[i][j] for i in range(len(rows)))
            if red > 0:
                entering = j
                break  # Bland: smallest index
        if entering < 0:
            return "optimal"
        leaving, best = -1, None
        for i in range(len(rows)):
            if rows[i][entering] > 0:
                ratio = rows[i][-1] / rows[i][entering]
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leaving]
                ):
                    leaving, best = i, ratio
        if leaving < 0:
            return "unbounded"
        _pivot(rows, basis, leaving, entering)


def _solve_standard(A, b, c):
    """max c·x s.t. Ax = b, x >= 0; A rows of Fractions.

    Returns (status, value, x) with status optimal | unbounded | infeasible.
    """
    STATS["lp_calls"] += 1
    m, n = len(A), len(c)
    rows = []
    for i in range(m):
        row = list(A[i]) + [b[i]]
        if row[-1] < 0:
            row = [-x for x in row]
        rows.append(row)
    # phase 1: artificials n..n+m-1
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows[i] = rows[i][:-1] + art + [rows[i][-1]]
    basis = [n + i for i in range(m)]
    cost1 = [Fraction(0)] * n + [Fraction(-1)] * m
    _simplex_core(rows, basis, cost1, n + m)
    val1 = sum(cost1[basis[i]] * rows[i][-1] for i in range(m))
    if val1 < 0:
        return "infeasible", None, None
    # drive artificials out of the basis; drop redundant rows
    keep = []
    for i in range(len(rows)):
        if basis[i] >= n:
            piv = next((j for j in range(n) if rows[i][j] != 0), None)
            if piv is None:
                continue  # redundant row
            _pivot(rows, basis, i, piv)
        keep.append(i)
    rows = [rows[i][:n] + [rows[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    cost2 = list(c)
    status = _simplex_core(rows, basis, cost2, n)
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        x[bi] = rows[i][-1]
    if status == "unbounded":
        return "unbounded", None, x
    value = sum(c[j] * x[j] for j in range(n))
    return "optimal", value, x


class _Relaxation:
    """Maps a LinSystem (congruences dropped) plus bound cuts onto standard form.

    Sign-free variables are modeled as differences of two non-negative parts.
    """

    def __init__(self, system: LinSystem, lower=None, upper=None):
        self.system = system
        self.cols = []  # (var, sign)
        self.colidx = {}
        for v in system.vars:
            self.colidx[v] = len(self.cols)
            self.cols.append((v, 1))
            if v not in system.nonneg:
                self.cols.append((v, -1))
        rows = []
        rhs = []

        def add_row(coeffs, b):
            row = [Fraction(0)] * len(self.cols)
            for x, cf in coeffs.items():
                j = self.colidx[x]
                row[j] += Fraction(cf)
                if j + 1 < len(self.cols) and self.cols[j + 1] == (x, -1):
                    row[j + 1] -= Fraction(cf)
            rows.append(row)
            rhs.append(Fraction(b))

        for coeffs, b in system.eqs:
            add_row(coeffs, b)
        for v, k in system.fixed.items():
            add_row({v: 1}, k)
        self._slacks = 0
        self._rows, self._rhs = rows, rhs
        for v, k in (lower or {}).items():  # v >= k : v - s = k
            self._add_bound(v, k, -1)
        for v, k in (upper or {}).items():  # v <= k : v + s = k
            self._add_bound(v, k, 1)

    def _add_bound(self, v, k, sign):
        j = self.colidx[v]
        row = [Fraction(0)] * len(self.cols)
        row[j] = Fraction(1)
        if j + 1 < len(self.cols) and self.cols[j + 1] == (v, -1):
            row[j + 1] = Fraction(-1)
        for r in self._rows:
            r.append(Fraction(0))
        self.cols.append((f"__s{self._slacks}", 1))
        self._slacks += 1
        row.append(Fraction(sign))
        self._rows.append(row)
        self._rhs.append(Fraction(k))

    def optimize(self, objective, maximize=True):
        c = [Fraction(0)] * len(self.cols)
        for v, cf in objective.items():
            j = self.colidx[v]
            c[j] = Fraction(cf)
            if j + 1 < len(self.cols) and self.cols[j + 1] == (v, -1):
                c[j + 1] = Fraction(-cf)
        if not maximize:
            c = [-x for x in c]
        status, value, x = _solve_standard(self._rows, self._rhs, c)
        if status != "optimal":
            return status, None, self._extract(x) if x else None
        return status, (value if maximize else -value), self._extract(x)

    def _extract(self, x):
        if x is None:
            return None
        out = {}
        for j, (v, sign) in enumerate(self.cols):
            if isinstance(v, str) and v.startswith("__s"):
                continue
            out[v] = out.get(v, Fraction(0)) + sign * x[j]
        return out


def _rewrite_congruences(system: LinSystem) -> LinSystem:
    """Each congruence Σc·x ≡ r (mod m) becomes Σc·x - m·t = r with a fresh t.

    For a single non-negative variable with coefficient 1 the residue is
    normalized into [0, m) and t is non-negative too; multi-variable
    congruences keep t sign-free.
    """
    if not system.congruences:
        return system
    vars = list(system.vars)
    nonneg = set(system.nonneg)
    eqs = list(system.eqs)
    for i, (coeffs, r, m) in enumerate(system.congruences):
        t = ("__t", i)
        vars.append(t)
        row = dict(coeffs)
        row[t] = -m
        if list(coeffs.items()) and len(coeffs) == 1:
            (x, c), = coeffs.items()
            if c == 1 and x in nonneg:
                nonneg.add(t)
                r = r % m
        eqs.append((row, r))
    return LinSystem(vars, eqs, nonneg, system.fixed, ())


def _lattice_feasible(eqs, var_order) -> bool:
    """Exact integer solvability of the equalities over Z (signs ignored), by
    unimodular column reduction. A False here certifies infeasibility."""
    n = len(var_order)
    idx = {v: j for j, v in enumerate(var_order)}
    m = len(eqs)
    A = []
    resid = []
    for coeffs, rhs in eqs:
        row = [0] * n
        for v, c in coeffs.items():
            row[idx[v]] += c
        A.append(row)
        resid.append(rhs)
    cur = 0
    for r in range(m):
        while True:
            nz = [j for j in range(cur, n) if A[r][j] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: (abs(A[r][j]), j))
            j0, j1 = nz[0], nz[1]
            q = A[r][j1] // A[r][j0]  # non-zero: |A[r][j1]| >= |A[r][j0]| > 0
            for i in range(m):
                A[i][j1] -= q * A[i][j0]
        nz = [j for j in range(cur, n) if A[r][j] != 0]
        if not nz:
            if resid[r] != 0:
                return False
            continue
        jp = nz[0]
        g = A[r][jp]
        if resid[r] % g != 0:
            return False
        y = resid[r] // g
        for i in range(r + 1, m):
            resid[i] -= A[i][jp] * y
        if jp != cur:
            for i in range(m):
                A[i][jp], A[i][cur] = A[i][cur], A[i][jp]
        cur += 1
    return True


def lp_feasible(system: LinSystem) -> bool:
    """Rational feasibility of the relaxation (congruences ignored)."""
    status, _, _ = _Relaxation(system).optimize({}, maximize=True)
    return status != "infeasible"


def lp_opt(system: LinSystem, objective: dict, maximize=True):
    """Exact optimum of a linear objective over the relaxation.

    Returns a Fraction, UNBOUNDED, or None when the relaxation is infeasible.
    """
    status, value, _ = _Relaxation(system).optimize(objective, maximize=maximize)
    if status == "infeasible":
        return None
    if status == "unbounded":
        return UNBOUNDED
    return value


def lp_point(system: LinSystem, lower=None):
    """A rational point of the relaxation (optionally with var >= bound cuts),
    as a dict of Fractions, or None."""
    relax = _Relaxation(system, lower=lower or {})
    status, _, x = relax.optimize({}, maximize=True)
    if status == "infeasible":
        return None
    return {v: x[v] for v in system.vars}


def lp_max(system: LinSystem, var):
    return lp_opt(system, {var: 1}, maximize=True)


def lp_min(system: LinSystem, var):
    return lp_opt(system, {var: 1}, maximize=False)


def _gcd_reject(eqs) -> bool:
    for coeffs, rhs in eqs:
        g = 0
        for c in coeffs.values():
            g = gcd(g, abs(c))
        if g == 0:
            if rhs != 0:
                return True
        elif rhs % g != 0:
            return True
    return False


def ilp_feasible(system: LinSystem, node_budget: int = 100_000):
    """An integer Solution of the full system (congruences included), or None.

    Branch-and-bound over the exact LP relaxation. Deterministic: branches on
    the lowest-index fractional variable, floor side first. Exceeding the node
    budget raises ResourceExhausted, never a wrong verdict.
    """
    STATS["ilp_calls"] += 1
    base = _rewrite_congruences(system)
    all_rows = list(base.eqs) + [({v: 1}, k) for v, k in base.fixed.items()]
    if _gcd_reject(all_rows):
        return None
    if not _lattice_feasible(all_rows, base.vars):
        return None
    order = {v: i for i, v in enumerate(base.vars)}
    stack = [({}, {})]  # (lower bounds, upper bounds)
    nodes = 0
    while stack:
        lower, upper = stack.pop()
        nodes += 1
        if nodes > node_budget:
            raise ResourceExhausted(f"ilp node budget {node_budget} exceeded")
        relax = _Relaxation(base, lower=lower, upper=upper)
        status, _, x = relax.optimize({}, maximize=True)
        if status == "infeasible":
            continue
        frac = None
        for v in base.vars:
            if x[v].denominator != 1:
                if frac is None or order[v] < order[frac]:
                    frac = v
        if frac is None:
            ints = {v: int(x[v]) for v in base.vars}
            original = {v: ints[v] for v in system.vars}
            return Solution(original, system)
        f = floor(x[frac])
        up_lower = dict(lower)
        up_lower[frac] = max(f + 1, lower.get(frac, f + 1))
        dn_upper = dict(upper)
        dn_upper[frac] = min(f, upper.get(frac, f))
        stack.append((up_lower, upper))   # ceil branch, explored second
        stack.append((lower, dn_upper))   # floor branch first
    return None


def enumerate_var_values(system: LinSystem, var, hard_cap: int = 512,
                         node_budget: int = 100_000):
    """The set of values `var` takes over integer solutions, or UNBOUNDED.

    Only meaningful when the LP bound is finite; candidates in [lb, ceil(max)]
    are tested one ilp_feasible each.
    """
    if var not in system.vars:
        raise ArgumentError(f"undeclared variable {var!r}")
    hi = lp_max(system, var)
    if hi is None:
        return set()
    if hi is UNBOUNDED:
        return UNBOUNDED
    lo = lp_min(system, var)
    if lo is UNBOUNDED:
        return UNBOUNDED
    lo, hi = ceil(lo), floor(hi)
    if hi - lo + 1 > hard_cap:
        raise ResourceExhausted(f"value range {hi - lo + 1} exceeds cap {hard_cap}")
    out = set()
    for a in range(lo, hi + 1):
        if _residue_incompatible(system, var, a):
            continue
        if ilp_feasible(system.with_fixed(var, a), node_budget=node_budget) is not None:
            out.add(a)
    return out


def _residue_incompatible(system, var, a) -> bool:
    for coeffs, r, m in system.congruences:
        if set(coeffs) == {var} and (coeffs[var] * a - r) % m != 0:
            return True
    return False
