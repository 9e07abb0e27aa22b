"""Linear sets, positivity-restricted sums, k-th regular approximations,
NFA-to-linear covers, basic separators, the M/K/D families, and the
counterexample family that needs unbounded concatenation length."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .automata import Nfa, enumerate_words, product, run_word
from .errors import ArgumentError, InvariantViolation, ResourceExhausted
from .model import dyck_alphabet, dec_letter, inc_letter, is_dyck_word, letter_index, word_effect
from .solver import LinSystem, ilp_feasible


@dataclass(frozen=True)
class LinearSet:
    """b + P*: a base vector plus non-negative combinations of the periods.
    Periods are deduplicated and sorted for deterministic behavior."""

    base: tuple
    periods: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(
            self, "periods", tuple(sorted(set(tuple(p) for p in self.periods)))
        )
        for p in self.periods:
            if len(p) != len(self.base):
                raise ArgumentError("period dimension mismatch")

    @property
    def dim(self):
        return len(self.base)


def singleton_set(vec) -> LinearSet:
    return LinearSet(tuple(vec), ())


def linear_set_to_json(lin: LinearSet) -> dict:
    return {"base": list(lin.base), "periods": [list(p) for p in lin.periods]}


def linear_set_from_json(doc: dict) -> LinearSet:
    return LinearSet(tuple(doc["base"]), tuple(tuple(p) for p in doc["periods"]))


def descriptor_to_json(desc) -> dict:
    """Serialized descriptor with a hash of its disjointness certificate."""
    import hashlib
    import json as _json

    chain = [linear_set_to_json(lin) for lin in desc.chain]
    payload = _json.dumps({"k": desc.k, "chain": chain}, sort_keys=True)
    return {
        "k": desc.k,
        "chain": chain,
        "certificate": hashlib.sha256(payload.encode()).hexdigest(),
    }


def lin_member(lin: LinearSet, vec, node_budget=50000) -> bool:
    """vec = base + Σ λ_p p with integer λ >= 0, decided exactly."""
    vec = tuple(vec)
    if len(vec) != lin.dim:
        raise ArgumentError("dimension mismatch")
    if not lin.periods:
        return vec == lin.base
    vars = [("lam", i) for i in range(len(lin.periods))]
    eqs = []
    for d in range(lin.dim):
        coeffs = {("lam", i): lin.periods[i][d] for i in range(len(lin.periods))
                  if lin.periods[i][d]}
        eqs.append((coeffs, vec[d] - lin.base[d]))
    sys = LinSystem(vars, eqs, nonneg=vars)
    return ilp_feasible(sys, node_budget=node_budget) is not None


_APPROX_CACHE = {}


def approx_automaton(lin: LinearSet, k: int, annotated=False) -> Nfa:
    """The k-th regular approximation R(lin, k): simulate letter effects inside
    [-k, k]^n and subtract period vectors without reading a symbol; final
    states are the box members of the linear set."""
    if k < 0:
        raise ArgumentError("k must be >= 0")
    key = (lin, k, annotated)
    if key in _APPROX_CACHE:
        return _APPROX_CACHE[key]
    n = lin.dim
    letters = dyck_alphabet(n)

    def inside(v):
        return all(-k <= x <= k for x in v)

    start = tuple(0 for _ in range(n))
    if not inside(start):
        raise ArgumentError("k too small for the zero start")
    states = {start}
    transitions = set()
    stack = [start]
    while stack:
        v = stack.pop()
        succ = []
        for a in letters:
            i, d = letter_index(a, n)
            w = tuple(x + (d if j == i - 1 else 0) for j, x in enumerate(v))
            if inside(w):
                if annotated:
                    succ.append(((a, False), w))
                    succ.append(((a, True), w))
                else:
                    succ.append((a, w))
        for p in lin.periods:
            w = tuple(x - y for x, y in zip(v, p))
            if inside(w):
                succ.append((None, w))
        for lab, w in succ:
            transitions.add((v, lab, w))
            if w not in states:
                states.add(w)
                stack.append(w)
    final = {v for v in states if lin_member(lin, v)}
    alphabet = frozenset((a, h) for a in letters for h in (False, True)) if annotated \
        else frozenset(letters)
    nfa = Nfa(states, transitions, {start}, final, alphabet)
    _APPROX_CACHE[key] = nfa
    return nfa


def approx_member(lin: LinearSet, k: int, word) -> bool:
    return run_word(approx_automaton(lin, k), tuple(word))


def nfa_to_linear_cover(nfa: Nfa, run_cap=200000):
    """(k, linear sets) with L(nfa) ⊆ ∪ R(Λ_ρ, k) and identical effect sets:
    one Λ per accepted run of length <= |Q|² + |Q| (its effect plus the effects
    of simple cycles touching its visited states); k = (|Q| + 1)²."""
    if any(a is None for _, a, _ in nfa.transitions):
        raise ArgumentError("nfa_to_linear_cover needs an ε-free NFA")
    letters = sorted(nfa.alphabet, key=repr)
    n = max((letter_index_any(a) for a in letters), default=0)
    q = len(nfa.states)
    max_len = q * q + q
    k = (q + 1) ** 2
    succ = {}
    for p, a, r in nfa.transitions:
        succ.setdefault(p, []).append((a, r))
    for p in succ:
        succ[p].sort(key=repr)

    cycles = _simple_cycles(nfa, succ)
    runs = []
    budget = [0]

    def dfs(state, eff, visited, length):
        budget[0] += 1
        if budget[0] > run_cap:
            raise ResourceExhausted(f"run enumeration cap {run_cap} exceeded")
        if state in nfa.final:
            runs.append((tuple(eff), frozenset(visited)))
        if length >= max_len:
            return
        for a, r in succ.get(state, ()):
            i, d = letter_index(a, n)
            eff[i - 1] += d
            visited.append(r)
            dfs(r, eff, visited, length + 1)
            visited.pop()
            eff[i - 1] -= d

    for init in sorted(nfa.initial, key=repr):
        dfs(init, [0] * n, [init], 0)

    out = []
    seen = set()
    for eff, visited in runs:
        periods = tuple(sorted({c_eff for c_states, c_eff in cycles
                                if c_states & visited}))
        lin = LinearSet(eff, periods)
        if lin not in seen:
            seen.add(lin)
            out.append(lin)
    return k, out


def letter_index_any(a) -> int:
    for n in range(1, 64):
        hit = letter_index(a, n)
        if hit is not None:
            return hit[0]
    raise ArgumentError(f"letter {a!r} is not a Dyck letter")


def _simple_cycles(nfa: Nfa, succ):
    """(state set, effect) of every simple cycle, via rooted DFS."""
    n = max((letter_index_any(a) for a in nfa.alphabet), default=0)
    cycles = set()
    states = sorted(nfa.states, key=repr)
    order = {s: i for i, s in enumerate(states)}

    def dfs(root, state, eff, visited):
        for a, r in succ.get(state, ()):
            i, d = letter_index(a, n)
            if r == root:
                e = list(eff)
                e[i - 1] += d
                cycles.add((frozenset(visited), tuple(e)))
            elif r not in visited and order[r] > order[root]:
                e = list(eff)
                e[i - 1] += d
                dfs(root, r, tuple(e), visited | {r})

    for root in states:
        dfs(root, root, tuple([0] * n), frozenset({root}))
    return cycles


# -- positivity-restricted sums and basic separators ---------------------------------

def pos_sum_contains_zero(chain, node_budget=100000) -> "Solution | None":
    """The witness for 0 ∈ Λ_1 ⊕ ... ⊕ Λ_ℓ (left fold, all prefix sums
    non-negative, total zero), or None. One exact ILP."""
    chain = list(chain)
    if not chain:
        raise ArgumentError("empty chain")
    dim = chain[0].dim
    if any(lin.dim != dim for lin in chain):
        raise ArgumentError("chain dimension mismatch")
    vars = []
    for i, lin in enumerate(chain):
        vars.extend(("lam", i, p) for p in range(len(lin.periods)))
    slacks = [("s", i, d) for i in range(len(chain) - 1) for d in range(dim)]
    vars.extend(slacks)
    eqs = []
    for i in range(len(chain)):
        for d in range(dim):
            coeffs = {}
            rhs = 0
            for j in range(i + 1):
                rhs -= chain[j].base[d]
                for p, period in enumerate(chain[j].periods):
                    if period[d]:
                        coeffs[("lam", j, p)] = coeffs.get(("lam", j, p), 0) + period[d]
            if i < len(chain) - 1:
                coeffs[("s", i, d)] = -1  # prefix sum = slack >= 0
            eqs.append((coeffs, rhs))
    sys = LinSystem(vars, eqs, nonneg=vars)
    return ilp_feasible(sys, node_budget=node_budget)


@dataclass(frozen=True)
class BasicSeparatorDesc:
    """R(Λ_1,k)...R(Λ_ℓ,k) with the certificate 0 ∉ Λ_1 ⊕ ... ⊕ Λ_ℓ."""

    k: int
    chain: tuple

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(self.chain))


@dataclass(frozen=True)
class RejectedChain:
    witness: dict  # period multiplicities reaching zero


def make_basic_separator(chain, k: int):
    """Certify 0 ∉ ⊕-chain; a rejection carries the zero witness."""
    wit = pos_sum_contains_zero(chain)
    if wit is not None:
        return RejectedChain(dict(wit.assignment))
    return BasicSeparatorDesc(k, tuple(chain))


def basic_member(desc: BasicSeparatorDesc, word) -> bool:
    """Concatenation membership by dynamic programming over split points."""
    word = tuple(word)
    autos = [approx_automaton(lin, desc.k) for lin in desc.chain]
    reach = {0}
    for auto in autos:
        nxt = set()
        for p in reach:
            cur = auto.eps_closure(auto.initial)
            if cur & auto.final:
                nxt.add(p)
            for q in range(p, len(word)):
                cur = auto.step(cur, word[q])
                if not cur:
                    break
                if cur & auto.final:
                    nxt.add(q + 1)
        reach = nxt
        if not reach:
            return False
    return len(word) in reach


def family_mod(mu: int, v, n: int = None) -> BasicSeparatorDesc:
    """Words whose effect is ≡ v mod mu; requires v ≢ 0."""
    v = tuple(v)
    n = len(v) if n is None else n
    if all(x % mu == 0 for x in v):
        raise ArgumentError("family_mod needs v ≢ 0 mod mu")
    periods = []
    for i in range(n):
        unit = tuple(mu if j == i else 0 for j in range(n))
        periods.append(unit)
        periods.append(tuple(-x for x in unit))
    desc = make_basic_separator([LinearSet(v, periods)], mu)
    if isinstance(desc, RejectedChain):
        raise InvariantViolation("modulo family failed its own certificate")
    return desc


def family_cov(k: int, i: int, n: int) -> BasicSeparatorDesc:
    """Covers the words whose counter i dips below zero before exceeding k.

    The second factor is the full lattice (base 0, periods ±units), whose
    approximation accepts every suffix; the certificate only needs the first
    factor to miss the non-negative orthant.
    """
    units = [tuple(1 if j == d else 0 for j in range(n)) for d in range(n)]
    neg_units = [tuple(-x for x in u) for u in units]
    others = [u for d, u in enumerate(units) if d != i - 1] + [
        u for d, u in enumerate(neg_units) if d != i - 1
    ]
    lneg = LinearSet(neg_units[i - 1], others)
    lattice = LinearSet(tuple(0 for _ in range(n)), units + neg_units)
    desc = make_basic_separator([lneg, lattice], max(k, 1))
    if isinstance(desc, RejectedChain):
        raise InvariantViolation("coverability family failed its own certificate")
    return desc


def _halfspace_set(v) -> LinearSet:
    """{y : <y, v> > 0} as a linear set: a base with <b0,v> = gcd(v) plus the
    base itself and an integer kernel basis (both signs) as periods."""
    v = tuple(v)
    n = len(v)
    if all(x == 0 for x in v):
        raise ArgumentError("drift direction must be non-zero")
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    # Bezout base: build <b0, v> = g greedily
    b0 = [0] * n
    acc = 0
    for i, x in enumerate(v):
        if x == 0:
            continue
        if acc == 0:
            b0[i] = 1 if x > 0 else -1
            acc = abs(x)
        else:
            gg = gcd(acc, abs(x))
            # find s,t with s*acc + t*|x| = gg
            s, t = _bezout(acc, abs(x))
            b0 = [s * y for y in b0]
            b0[i] = t * (1 if x > 0 else -1)
            acc = gg
    kernel = []
    for i in range(n):
        if v[i] == 0:
            kernel.append(tuple(1 if j == i else 0 for j in range(n)))
            continue
        for j in range(i + 1, n):
            if v[j] == 0:
                continue
            gij = gcd(abs(v[i]), abs(v[j]))
            vec = [0] * n
            vec[i] = v[j] // gij
            vec[j] = -v[i] // gij
            kernel.append(tuple(vec))
    periods = [tuple(b0)] + kernel + [tuple(-x for x in kvec) for kvec in kernel]
    return LinearSet(tuple(b0), periods)


def _bezout(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    return old_s, old_t


def family_drift(v, k: int, k_prime: int = None) -> BasicSeparatorDesc:
    """Covers the words drifting in direction v (effect inner product positive,
    bounded dips)."""
    v = tuple(v)
    h = _halfspace_set(v)
    if k_prime is None:
        norm = sum(abs(x) for x in v)
        pnorm = max((sum(abs(x) for x in p) for p in h.periods), default=0)
        k_prime = k * norm + pnorm + 1
    desc = make_basic_separator([h], k_prime)
    if isinstance(desc, RejectedChain):
        raise InvariantViolation("drift family failed its own certificate")
    return desc


# -- the counterexample family --------------------------------------------------------

def counterexample_nfa(ell: int) -> Nfa:
    """The two-counter family a1+ . {a1 a2, ā1 ā2}* ... {a1 a2^ℓ, ā1 ā2^ℓ}*."""
    if ell < 1:
        raise ArgumentError("ell must be >= 1")
    a1, abar1 = inc_letter(1), dec_letter(1)
    a2, abar2 = inc_letter(2), dec_letter(2)
    states = {"start", "plus"}
    transitions = {("start", a1, "plus"), ("plus", a1, "plus")}
    prev = "plus"
    for s in range(1, ell + 1):
        hub = f"h{s}"
        states.add(hub)
        transitions.add((prev, None, hub))
        for letters, tag in (((a1,) + (a2,) * s, "u"), ((abar1,) + (abar2,) * s, "d")):
            cur = hub
            for t, letter in enumerate(letters):
                nxt = hub if t == len(letters) - 1 else f"h{s}{tag}{t}"
                states.add(nxt)
                transitions.add((cur, letter, nxt))
                cur = nxt
        prev = hub
    return Nfa(states, transitions, {"start"}, {prev}, dyck_alphabet(2))


def counterexample_member(ell: int, word) -> bool:
    return run_word(counterexample_nfa(ell), tuple(word))


def move_word(i: int, ell: int) -> tuple:
    """m_i = a1^{i!} . Π_{s=1..ℓ} (f_s^i b_s^i)^i with f_s = (a1 a2^s)^{L/(s+1)},
    b_s its barred twin, L = (ℓ+1)!."""
    from math import factorial

    if ell < 1 or i < 0:
        raise ArgumentError("need ell >= 1 and i >= 0")
    L = factorial(ell + 1)
    word = [inc_letter(1)] * factorial(i)
    for s in range(1, ell + 1):
        f = ([inc_letter(1)] + [inc_letter(2)] * s) * (L // (s + 1))
        b = ([dec_letter(1)] + [dec_letter(2)] * s) * (L // (s + 1))
        word.extend((f * i + b * i) * i)
    return tuple(word)


def period_deduction_check(lin: LinearSet, k: int, w_mid, i: int,
                           prefix=(), suffix=()):
    """Extract a non-zero y with y·Δ(w_mid) ∈ P* from an accepting run over
    prefix . w_mid^i . suffix, or None when no repetition closes a cycle.
    The returned scalar is certified by an exact membership check."""
    auto = approx_automaton(lin, k)
    word = tuple(prefix) + tuple(w_mid) * i + tuple(suffix)
    # forward subset states at every position, then one backward pass to pick
    # an accepting run's boundary states between the w_mid blocks
    fwd = [auto.eps_closure(auto.initial)]
    for a in word:
        fwd.append(auto.step(fwd[-1], a))
        if not fwd[-1]:
            return None
    if not fwd[-1] & auto.final:
        return None
    choice = [None] * (len(word) + 1)
    target = sorted(fwd[-1] & auto.final, key=repr)[0]
    choice[len(word)] = target
    for pos in range(len(word) - 1, -1, -1):
        a = word[pos]
        want = choice[pos + 1]
        picked = None
        for p in sorted(fwd[pos], key=repr):
            if want in auto.step({p}, a):
                picked = p
                break
        if picked is None:
            return None
        choice[pos] = picked
    boundaries = []
    for rep in range(i + 1):
        boundaries.append(choice[len(prefix) + rep * len(w_mid)])
    for x in range(len(boundaries)):
        for y in range(x + 1, len(boundaries)):
            if boundaries[x] == boundaries[y]:
                scale = y - x
                n = lin.dim
                eff = word_effect(w_mid, n)
                target_vec = tuple(scale * e for e in eff)
                zero = tuple(0 for _ in range(n))
                if lin_member(LinearSet(zero, lin.periods), target_vec):
                    return scale
                return None
    return None


# -- basic separators for regular languages --------------------------------------------

def _mod_language_nfa(mu: int, v, n: int) -> Nfa:
    """Sequences with effect ≡ v mod mu, as a complete DFA over Σ_n."""
    v = tuple(x % mu for x in v)
    states = set()
    stack = [tuple(0 for _ in range(n))]
    transitions = set()
    while stack:
        r = stack.pop()
        if r in states:
            continue
        states.add(r)
        for a in dyck_alphabet(n):
            i, d = letter_index(a, n)
            r2 = tuple((x + (d if j == i - 1 else 0)) % mu for j, x in enumerate(r))
            transitions.add((r, a, r2))
            if r2 not in states:
                stack.append(r2)
    start = tuple(0 for _ in range(n))
    return Nfa(states, transitions, {start}, {v}, dyck_alphabet(n))


def fold_nfa_to_dmgts_list(nfa: Nfa, n: int, path_cap=2000):
    """Break the NFA's control flow into sequences of strongly connected
    components: one DMGTS per simple path from an initial to a final state,
    with X = ∅, μ = 1, all-ω intermediate markings and zero outer markings."""
    from .mgts import Dmgts, Mgts, PrecoveringGraph, Update, _scc_of, validate_precovering
    from .model import Edge, GenConfig, InitVass, Vass
    from .values import OMEGA

    if any(a is None for _, a, _ in nfa.transitions):
        raise ArgumentError("folding needs an ε-free NFA")
    counters = [f"y.{i}" for i in range(1, n + 1)]
    succ = {}
    for p, a, q in nfa.transitions:
        succ.setdefault(p, []).append((a, q))
    for p in succ:
        succ[p].sort(key=repr)

    comp = {}
    for s in nfa.states:
        comp[s] = frozenset(_scc_of(nfa.states, [(p, q) for p, _, q in nfa.transitions], s))

    def unit(a):
        i, d = letter_index(a, n)
        return {c: (d if c == f"y.{i}" else 0) for c in counters}

    paths = []

    def dfs(state, states, labels, visited):
        if state in nfa.final:
            paths.append((list(states), list(labels)))
            if len(paths) > path_cap:
                raise ResourceExhausted(f"fold path cap {path_cap} exceeded")
        for a, q in succ.get(state, ()):
            if q in visited:
                continue
            visited.add(q)
            states.append(q)
            labels.append(a)
            dfs(q, states, labels, visited)
            visited.remove(q)
            states.pop()
            labels.pop()

    for init in sorted(nfa.initial, key=repr):
        dfs(init, [init], [], {init})

    zero = {c: 0 for c in counters}
    omega_all = {c: OMEGA for c in counters}
    out = []
    for states, labels in paths:
        graphs = []
        for pos, s in enumerate(states):
            scc = sorted(comp[s], key=repr)
            name = {q: f"f{pos}.{q}" for q in scc}
            edges = []
            for q in scc:
                for a, r in succ.get(q, ()):
                    if r in comp[s]:
                        edges.append(Edge(name[q], a, unit(a), name[r]))
            in_val = dict(zero) if pos == 0 else dict(omega_all)
            out_val = dict(zero) if pos == len(states) - 1 else dict(omega_all)
            base = InitVass(
                Vass(name.values(), dyck_alphabet(n), counters, edges),
                GenConfig(name[s], in_val),
                GenConfig(name[s], out_val),
            )
            g = PrecoveringGraph(base, {name[q]: dict(omega_all) for q in scc})
            bad = validate_precovering(g)
            if bad:
                raise InvariantViolation(f"fold produced an invalid graph: {bad}")
            graphs.append(g)
        bridges = [Update(a, unit(a)) for a in labels]
        out.append(Dmgts(Mgts(graphs, bridges), 1, (), counters, faithful=True))
    return out


def basic_separators_for_regular(nfa: Nfa, n: int = None, disjoint_check_len=10,
                                 residue_cap=4096, chain_cap=4096):
    """A finite basic-separator cover of a regular language disjoint from the
    Dyck language: fold into DMGTS, decompose, and emit modulo-family members
    for the modulo-decided parts and certified approximation chains for the
    faithful Y-infeasible parts."""
    from .chareq import build_char
    from .decomposition import DecideCaps, decompose
    from .mgts import Dmgts

    if n is None:
        n = max((letter_index_any(a) for a in nfa.alphabet), default=1)
    for w in sorted(enumerate_words(nfa, disjoint_check_len), key=repr):
        if is_dyck_word(w, n):
            raise ArgumentError(f"input intersects the Dyck language: witness {w}")

    covers = []
    for dm in fold_nfa_to_dmgts_list(nfa, n):
        res = decompose(dm, DecideCaps())
        chain_members = [d.dmgts for d in res.decided if d.certificate == "y-infeasible"]
        for member in res.perfect:
            # for a Dyck-disjoint regular input every perfect member has an
            # infeasible Dyck-side system; a feasible one witnesses overlap
            if ilp_feasible(build_char(member, "y").system) is not None:
                raise ArgumentError(
                    "perfect member with feasible Dyck-side system: the input is "
                    "not disjoint from the Dyck language"
                )
            chain_members.append(member)
        for d in res.decided:
            if d.certificate == "modulo-nonzero":
                mu = d.dmgts.mu
                for v in _nonzero_residues(mu, n):
                    covers.append(family_mod(mu, v, n))
        for member in chain_members:
            covers.extend(_member_chains(member, n, residue_cap, chain_cap))
    dedup = []
    seen = set()
    for d in covers:
        key = (d.k, d.chain)
        if key not in seen:
            seen.add(key)
            dedup.append(d)
    return dedup


def _nonzero_residues(mu: int, n: int):
    out = [()]
    for _ in range(n):
        out = [r + (v,) for r in out for v in range(mu)]
    return [r for r in out if any(r)]


def _member_chains(dm, n: int, residue_cap: int, chain_cap: int):
    """The L_{v,u} chains of a faithful DMGTS with infeasible Dyck-side system."""
    mu = dm.mu
    graphs = dm.graphs
    bridges = dm.bridges
    ell = len(graphs)
    ys = list(dm.y_counters)

    def bridge_effect(u):
        return tuple(u.update.get(c, 0) for c in ys)

    def marking_vec(m):
        return tuple(m[c] for c in ys)

    control = []
    for g in graphs:
        transitions = {
            (e.src, e.label, e.dst) for e in g.vass.edges
        }
        control.append(Nfa(set(g.vass.nodes), transitions, {g.root}, {g.root},
                           dyck_alphabet(n)))

    residue_tuples = [()]
    for _ in range(ell):
        residue_tuples = [
            r + (v,) for r in residue_tuples for v in _all_residues(mu, n)
        ]
        if len(residue_tuples) > residue_cap:
            raise ResourceExhausted(f"residue cap {residue_cap} exceeded")

    def gates_ok(vtuple):
        entry = tuple(0 for _ in range(n))
        for gi in range(ell):
            if not _cong_ok(entry, marking_vec(graphs[gi].in_marking), mu):
                return False
            exit_ = tuple((entry[d] + vtuple[gi][d]) % mu for d in range(n))
            if not _cong_ok(exit_, marking_vec(graphs[gi].out_marking), mu):
                return False
            if gi < ell - 1:
                be = bridge_effect(bridges[gi])
                entry = tuple((exit_[d] + be[d]) % mu for d in range(n))
        return True

    out = []
    for vtuple in residue_tuples:
        if not gates_ok(vtuple):
            continue
        factor_covers = []
        k = 1
        empty = False
        for gi in range(ell):
            auto = product(control[gi], _mod_language_nfa(mu, vtuple[gi], n))
            ki, lins = nfa_to_linear_cover(auto)
            if not lins:
                empty = True
                break
            k = max(k, ki)
            factor_covers.append(lins)
        if empty:
            continue
        chains = [[]]
        for gi in range(ell):
            chains = [c + [lin] for c in chains for lin in factor_covers[gi]]
            if gi < ell - 1:
                be = bridge_effect(bridges[gi])
                chains = [c + [singleton_set(be)] for c in chains]
            if len(chains) > chain_cap:
                raise ResourceExhausted(f"chain cap {chain_cap} exceeded")
        for chain in chains:
            desc = make_basic_separator(chain, k)
            if isinstance(desc, RejectedChain):
                raise InvariantViolation(
                    "a solution-language chain failed its certificate; the member "
                    "cannot be faithful with an infeasible Dyck-side system"
                )
            out.append(desc)
    return out


def _all_residues(mu: int, n: int):
    out = [()]
    for _ in range(n):
        out = [r + (v,) for r in out for v in range(mu)]
    return out


def _cong_ok(vec, marking, mu) -> bool:
    from .values import is_omega

    return all(
        is_omega(m) or (vec[d] - m) % mu == 0 for d, m in enumerate(marking)
    )
