"""Pluggable decision of regular separability between the Z-approximations
Sol_X and Sol_Y of a DMGTS. Ships layered sound strategies behind a stable
interface; verdicts carry bounded-verified certificates, never guesses."""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import Nfa, run_word
from .chareq import build_char, edge_var
from .errors import ResourceExhausted
from .mgts import Dmgts, LanguageCaps, side_language_bounded
from .model import letter_index
from .semilinear import _halfspace_set, approx_automaton
from .separator import annotated_alphabet
from .solver import UNBOUNDED, LinSystem, ilp_feasible, lp_opt


@dataclass
class ZsepCaps:
    verify_len: int = 6
    modulo_max: int = 6
    drift_norm: int = 2
    drift_k: int = 8
    loop_len: int = 4
    ilp_nodes: int = 100_000
    language: LanguageCaps = field(default_factory=LanguageCaps)


@dataclass
class SepVerdict:
    kind: str                 # "separable" | "inseparable" | "unknown"
    nfa: Nfa = None           # annotated separator for "separable"
    z_pair: list = None       # per-graph loop pairs for "inseparable"
    strategy: str = None
    reason: str = None
    caps: ZsepCaps = None

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "certificate": self.strategy, "reason": self.reason}
        if self.caps is not None:
            doc["caps"] = {
                "verify_len": self.caps.verify_len,
                "modulo_max": self.caps.modulo_max,
                "drift_norm": self.caps.drift_norm,
                "loop_len": self.caps.loop_len,
            }
        if self.z_pair is not None:
            doc["z_pair"] = [[list(a), list(b)] for a, b in self.z_pair]
        return doc


def _universal(n: int) -> Nfa:
    alpha = annotated_alphabet(n)
    return Nfa({"u"}, {("u", a, "u") for a in alpha}, {"u"}, {"u"}, alpha)


def _empty(n: int) -> Nfa:
    return Nfa({"e"}, set(), {"e"}, set(), annotated_alphabet(n))


def _bounded_certificate_ok(nfa: Nfa, dmgts: Dmgts, caps: ZsepCaps) -> bool:
    """Coverage of the bounded Sol_X and disjointness from the bounded Sol_Y."""
    solx = side_language_bounded(dmgts, "x", caps.verify_len, "int", caps.language).words
    soly = side_language_bounded(dmgts, "y", caps.verify_len, "int", caps.language).words
    for w in solx:
        if not run_word(nfa, w):
            return False
    for w in soly:
        if run_word(nfa, w):
            return False
    return True


def _effect_expression(dmgts: Dmgts, counter):
    """The word effect on one counter as (edge-coefficient dict, constant)."""
    coeffs = {}
    for gi, g in enumerate(dmgts.graphs):
        for ei, e in enumerate(g.vass.edges):
            if e.update[counter]:
                coeffs[edge_var(gi, ei)] = e.update[counter]
    const = sum(u.update.get(counter, 0) for u in dmgts.bridges)
    return coeffs, const


def _with_effect_congruence(system: LinSystem, coeffs, const, residue, mu):
    extra = (dict(coeffs), (residue - const) % mu, mu)
    return LinSystem(system.vars, system.eqs, system.nonneg, system.fixed,
                     tuple(system.congruences) + (extra,))


def _mod_effect_nfa(counter_idx: int, mu: int, residue: int, n: int) -> Nfa:
    """Annotated NFA accepting the words whose effect on one Dyck counter is
    ≡ residue mod mu."""
    alpha = annotated_alphabet(n)
    states = set(range(mu))
    transitions = set()
    for r in range(mu):
        for (a, h) in alpha:
            i, d = letter_index(a, n)
            r2 = (r + (d if i == counter_idx else 0)) % mu
            transitions.add((r, (a, h), r2))
    return Nfa(states, transitions, {0}, {residue % mu}, alpha)


def z_separability(dmgts: Dmgts, caps: ZsepCaps = ZsepCaps()) -> SepVerdict:
    """The strategy ladder: Y-infeasible, X-infeasible, modulo counting, drift,
    equal-label inseparability pairs, then Unknown. Separable verdicts carry an
    NFA that passed the bounded coverage/disjointness checks; Inseparable ones
    carry loop pairs that solve both side systems."""
    n = len(dmgts.y_counters)
    ys = list(dmgts.y_counters)
    cs_x = build_char(dmgts, "x")
    cs_y = build_char(dmgts, "y")
    if ilp_feasible(cs_y.system, node_budget=caps.ilp_nodes) is None:
        nfa = _universal(n)
        if _bounded_certificate_ok(nfa, dmgts, caps):
            return SepVerdict("separable", nfa=nfa, strategy="y-infeasible", caps=caps)
    if ilp_feasible(cs_x.system, node_budget=caps.ilp_nodes) is None:
        nfa = _empty(n)
        if _bounded_certificate_ok(nfa, dmgts, caps):
            return SepVerdict("separable", nfa=nfa, strategy="x-infeasible", caps=caps)

    # modulo strategy: one counter whose Sol_X effects occupy a single non-zero
    # residue class avoided by Sol_Y
    for mu in range(2, caps.modulo_max + 1):
        for idx, c in enumerate(ys, start=1):
            coeffs, const = _effect_expression(dmgts, c)
            occupied = [
                r for r in range(mu)
                if ilp_feasible(
                    _with_effect_congruence(cs_x.system, coeffs, const, r, mu),
                    node_budget=caps.ilp_nodes,
                ) is not None
            ]
            if len(occupied) != 1:
                continue
            v = occupied[0]
            if ilp_feasible(
                _with_effect_congruence(cs_y.system, coeffs, const, v, mu),
                node_budget=caps.ilp_nodes,
            ) is not None:
                continue
            nfa = _mod_effect_nfa(idx, mu, v, n)
            if _bounded_certificate_ok(nfa, dmgts, caps):
                return SepVerdict("separable", nfa=nfa,
                                  strategy=f"modulo({mu},{v},{c})", caps=caps)

    # drift strategy: a direction with sign-definite Sol_X effects
    for v in _small_vectors(n, caps.drift_norm):
        objective = {}
        const = 0
        for i, c in enumerate(ys):
            coeffs, cc = _effect_expression(dmgts, c)
            for var, k in coeffs.items():
                objective[var] = objective.get(var, 0) + v[i] * k
            const += v[i] * cc
        lo = lp_opt(cs_x.system, objective, maximize=False)
        if lo is None or lo is UNBOUNDED or lo + const < 1:
            continue
        lin = _halfspace_set(v)
        pnorm = max((sum(abs(x) for x in p) for p in lin.periods), default=0)
        kprime = caps.drift_k * sum(abs(x) for x in v) + pnorm + 1
        nfa = approx_automaton(lin, kprime, annotated=True)
        if _bounded_certificate_ok(nfa, dmgts, caps):
            return SepVerdict("separable", nfa=nfa, strategy=f"drift({v})", caps=caps)

    # inseparability: equal-label per-graph loop pairs solving both sides
    pair = _equal_label_pair(dmgts, caps)
    if pair is not None:
        return SepVerdict("inseparable", z_pair=pair, strategy="shared-loops", caps=caps)
    return SepVerdict("unknown", reason="strategy ladder exhausted", caps=caps)


def _small_vectors(n: int, norm: int):
    vecs = [()]
    for _ in range(n):
        vecs = [v + (x,) for v in vecs for x in range(-norm, norm + 1)]
    out = [v for v in vecs if any(v) and sum(abs(x) for x in v) <= norm]
    out.sort(key=lambda v: (sum(abs(x) for x in v), v))
    return out


def _equal_label_pair(dmgts: Dmgts, caps: ZsepCaps):
    """Per-graph rooted loop pairs with equal label sequences whose Parikh sums
    solve Char_X resp. Char_Y; certifies Sol_X ∩ Sol_Y ≠ ∅."""
    from .separator import _solves_side, rooted_loops

    per_graph = []
    for g in dmgts.graphs:
        loops = rooted_loops(g, caps.loop_len)

        def labels(seq):
            return tuple(g.vass.edges[i].label for i in seq
                         if g.vass.edges[i].label != "")

        pairs = [(a, b) for a in loops for b in loops if labels(a) == labels(b)]
        per_graph.append(pairs)
    combos = [[]]
    for pairs in per_graph:
        combos = [c + [p] for c in combos for p in pairs]
        if len(combos) > 50000:
            raise ResourceExhausted("equal-label pair search exploded")
    for combo in combos:
        if _solves_side(dmgts, [a for a, _ in combo], "x") and _solves_side(
            dmgts, [b for _, b in combo], "y"
        ):
            return combo
    return None
