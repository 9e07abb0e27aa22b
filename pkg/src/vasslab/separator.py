"""Separator synthesis and transfer: the modulo automaton, Z-to-N separator
lifting, preciseness testing, Lambert pumping, and inseparability witnesses
built from the diff/rem construction."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, factorial

from .automata import Nfa, dfa_profile, enumerate_words, product, run_word, strip_hash
from .chareq import build_char, edge_var, io_var, full_support_solution, support
from .errors import ArgumentError, ResourceExhausted, StructuralError
from .mgts import (
    Dmgts,
    LanguageCaps,
    side_domain,
    side_language_bounded,
    side_orders,
    intermediate_accepts,
    is_zero_reaching,
)
from .model import (
    EPSILON,
    CounterDomainSpec,
    GenConfig,
    Run,
    Violation,
    dyck_alphabet,
    is_dyck_word,
    parikh_of,
    simulate,
)
from .solver import ilp_feasible
from .structure import covering_sequences, down_covering, realization
from .values import is_omega


def annotated_alphabet(n: int) -> frozenset:
    return frozenset((a, h) for a in dyck_alphabet(n) for h in (False, True))


def modulo_automaton(dmgts: Dmgts, track="y") -> Nfa:
    """The NFA that follows the DMGTS, maintains the tracked counters modulo mu,
    and checks intermediate acceptance modulo mu. Residues are tracked for the
    Y counters by default ("xy" tracks both sides)."""
    if track == "y":
        tracked = list(dmgts.y_counters)
    elif track == "xy":
        tracked = sorted(dmgts.mgts.counters)
    else:
        raise ArgumentError(f"unknown tracking {track!r}")
    mu = dmgts.mu
    n = len(dmgts.y_counters)
    alphabet = annotated_alphabet(n)

    def residues():
        out = [()]
        for _ in tracked:
            out = [r + (v,) for r in out for v in range(mu)]
        return out

    def compatible(r, marking):
        return all(
            is_omega(marking[c]) or (r[i] - marking[c]) % mu == 0
            for i, c in enumerate(tracked)
        )

    def shift(r, update):
        return tuple((r[i] + update.get(c, 0)) % mu for i, c in enumerate(tracked))

    states, transitions = set(), set()
    all_res = residues()
    for gi, g in enumerate(dmgts.graphs):
        for r in all_res:
            states.add(("enter", gi, r))
            states.add(("exit", gi, r))
            for q in g.vass.nodes:
                states.add(("node", q, r))
            if compatible(r, g.in_marking):
                transitions.add((("enter", gi, r), None, ("node", g.root, r)))
            if compatible(r, g.out_marking):
                transitions.add((("node", g.root, r), None, ("exit", gi, r)))
            for e in g.vass.edges:
                lab = None if e.label == EPSILON else (e.label, False)
                transitions.add(
                    (("node", e.src, r), lab, ("node", e.dst, shift(r, e.update)))
                )
    for bi, u in enumerate(dmgts.bridges):
        for r in all_res:
            lab = None if u.label == EPSILON else (u.label, True)
            transitions.add(
                (("exit", bi, r), lab, ("enter", bi + 1, shift(r, u.update)))
            )
    initial = {("enter", 0, r) for r in all_res if compatible(r, dmgts.mgts.in_marking)}
    final = {
        ("exit", len(dmgts.graphs) - 1, r)
        for r in all_res
        if compatible(r, dmgts.mgts.out_marking)
    }
    return Nfa(states, transitions, initial, final, alphabet)


def lift_separator(zsep: Nfa, dmgts: Dmgts) -> Nfa:
    """Make a Z-separator precise by product with the modulo automaton, then
    drop the hash annotations. The caller owes that zsep separates Sol_X from
    Sol_Y (bounded-verified upstream)."""
    asharp = modulo_automaton(dmgts)
    if zsep.alphabet != asharp.alphabet:
        zsep = Nfa(zsep.states, zsep.transitions, zsep.initial, zsep.final, asharp.alphabet)
    return strip_hash(product(zsep, asharp))


def preciseness_falsify(nfa_sharp: Nfa, dmgts: Dmgts, max_len: int,
                        caps: LanguageCaps = LanguageCaps()):
    """A word w in L(nfa#) ∩ Dyck# with w outside the bounded Sol_Y, or None.
    Dyck# offers a and (a,#) wherever the Dyck language has a."""
    n = len(dmgts.y_counters)
    soly = side_language_bounded(dmgts, "y", max_len, "int", caps).words
    for w in sorted(enumerate_words(nfa_sharp, max_len), key=repr):
        plain = tuple(a for a, _ in w)
        if not is_dyck_word(plain, n):
            continue
        if w not in soly:
            return w
    return None


# -- Lambert pumping -------------------------------------------------------------

@dataclass
class PumpPlan:
    covers: list      # per graph (u_i, d_i) local edge tuples
    main: list        # per graph pi_i
    filler: list      # per graph w_i
    scale: int        # m
    k: int
    run: Run


def scaled_support(cs, covers, m_cap=100000):
    """m * full-support-solution satisfying the Parikh and Enable inequalities
    for the given covering sequences."""
    mgts = cs.mgts
    sup = support(cs)
    base = full_support_solution(cs, sup)
    for m in range(1, m_cap + 1):
        ok = True
        for gi, g in enumerate(mgts.graphs):
            u, d = covers[gi]
            psi_u, psi_d = parikh_of(u), parikh_of(d)
            for ei in range(len(g.vass.edges)):
                need = m * base[edge_var(gi, ei)] - psi_u.get(ei, 0) - psi_d.get(ei, 0)
                if need < 1:
                    ok = False
                    break
            if not ok:
                break
            du = _effect_of_local(g, u)
            dd = _effect_of_local(g, d)
            for j in sorted(g.omega_counters):
                if m * base[io_var(gi, "in", j)] + du[j] < 1:
                    ok = False
                    break
                if m * base[io_var(gi, "out", j)] - dd[j] < 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return {v: m * base[v] for v in base.assignment}, m
    raise ResourceExhausted(f"no support scale within {m_cap}")


def _effect_of_local(g, edge_seq):
    eff = {c: 0 for c in g.vass.counters}
    for i in edge_seq:
        for c, x in g.vass.edges[i].update.items():
            eff[c] += x
    return eff


def _rooted_cycle(g, counts: dict):
    """Realize local edge counts as a rooted cycle, folding in nothing."""
    return realization(g, counts, g.root)


def _local_counts(sol, gi, g):
    return {ei: sol[edge_var(gi, ei)] for ei in range(len(g.vass.edges))}


def lambert_pump(obj, s_f, covers=None, k_cap=64, m_cap=100000, return_plan=False):
    """An N-run that is intermediate accepting, built from a solution of the
    characteristic system by embedding it into pumped covering sequences:
    c . u_0^k π_0 w_0^k d_0^k . bridge . u_1^k ... Soundness is by simulation:
    the first verifying k in [k0, k_cap] is returned."""
    dm = obj if isinstance(obj, Dmgts) else None
    mgts = obj.mgts if dm is not None else obj
    cs = build_char(obj if dm is not None else mgts, "full")
    if covers is None:
        covers = []
        for g in mgts.graphs:
            u = covering_sequences(g)
            d = down_covering(g)
            if u is None or d is None:
                raise ArgumentError("lambert_pump needs covering sequences (perfect input)")
            covers.append((u, d))
    sol = s_f.assignment if hasattr(s_f, "assignment") else dict(s_f)
    sup_scaled, m = scaled_support(cs, covers, m_cap)
    mains, fillers = [], []
    for gi, g in enumerate(mgts.graphs):
        u, d = covers[gi]
        psi_u, psi_d = parikh_of(u), parikh_of(d)
        filler_counts = {
            ei: sup_scaled[edge_var(gi, ei)] - psi_u.get(ei, 0) - psi_d.get(ei, 0)
            for ei in range(len(g.vass.edges))
        }
        fillers.append(_rooted_cycle(g, filler_counts))
        main_counts = _local_counts(sol, gi, g)
        try:
            mains.append(_rooted_cycle(g, main_counts))
        except ArgumentError:
            folded = {
                ei: main_counts[ei] + sup_scaled[edge_var(gi, ei)]
                for ei in main_counts
            }
            mains.append(_rooted_cycle(g, folded))
    iv, _ = mgts.combined()
    start_val = {c: sol[io_var(0, "in", c)] for c in mgts.counters}
    k0 = _enable_k0(mgts, sol, covers, mains, fillers)
    from .model import nat_domain
    from .values import ExactOrOmega as _EO

    for k in range(max(1, k0), k_cap + 1):
        seq = []
        for gi, g in enumerate(mgts.graphs):
            u, d = covers[gi]
            block = list(u) * k + list(mains[gi]) + list(fillers[gi]) * k + list(d) * k
            seq.extend(mgts.combined_index(("g", gi, ei)) for ei in block)
            if gi < len(mgts.bridges):
                seq.append(mgts.combined_index(("b", gi)))
        run = Run(GenConfig(iv.init.node, start_val), tuple(seq))
        if isinstance(simulate(iv.vass, run.start, run.edge_seq, nat_domain(iv.vass)), Violation):
            continue
        if intermediate_accepts(mgts, run, [_EO()], nat_domain(iv.vass)):
            if return_plan:
                return PumpPlan(covers, mains, fillers, m, k, run)
            return run
    raise ResourceExhausted(f"no verifying repetition count within {k_cap}")


def _enable_k0(mgts, sol, covers, mains, fillers):
    """A cheap lower bound for the repetition scan: cover each graph's worst
    prefix dip on its ω-decorated counters."""
    k0 = 1
    for gi, g in enumerate(mgts.graphs):
        u, d = covers[gi]
        du = _effect_of_local(g, u)
        dip = {c: 0 for c in g.omega_counters}
        val = {c: 0 for c in g.vass.counters}
        for ei in list(mains[gi]) + list(fillers[gi]) + list(d):
            for c, x in g.vass.edges[ei].update.items():
                val[c] += x
                if c in dip and val[c] < dip[c]:
                    dip[c] = val[c]
        for c in sorted(g.omega_counters):
            gain = du[c]
            start = sol.get(io_var(gi, "in", c), 0)
            if gain >= 1:
                k0 = max(k0, ceil((-dip[c] - start) / gain) + 1)
    return k0


# -- diff / rem and inseparability witnesses ---------------------------------------

@dataclass
class DiffRem:
    diff: tuple
    rem: tuple
    u: tuple
    d: tuple
    w_x: tuple
    w_y: tuple


def build_diff_rem(g, s_x: dict, s_y: dict, u_prime, d_prime, n_states: int, c: int) -> DiffRem:
    """The pigeonhole construction: diff realizes the excess of the Dyck-side
    support solution, rem fills the subject-side block, and w_x = diff^N rem vs
    w_y = diff^{N + c N!} rem drive every DFA with at most n_states states
    through identical state changes."""
    nedges = len(g.vass.edges)
    for ei in range(nedges):
        if s_y.get(ei, 0) - s_x.get(ei, 0) < 1:
            raise ArgumentError("needs (s_y - s_x) >= 1 on every edge (rescale s_y)")
    fact = factorial(n_states)
    diff = realization(g, {ei: s_y.get(ei, 0) - s_x.get(ei, 0) for ei in range(nedges)}, g.root)
    psi_u, psi_d, psi_diff = parikh_of(u_prime), parikh_of(d_prime), parikh_of(diff)
    rem_counts = {}
    for ei in range(nedges):
        k = c * fact * (s_x.get(ei, 0) - psi_u.get(ei, 0) - psi_d.get(ei, 0)) - n_states * psi_diff.get(ei, 0)
        if k < 0:
            raise ArgumentError(f"factor c={c} too small to realize rem")
        rem_counts[ei] = k
    rem = realization(g, rem_counts, g.root)
    u = tuple(u_prime) * (c * fact)
    d = tuple(d_prime) * (c * fact)
    w_x = diff * n_states + rem
    w_y = diff * (n_states + c * fact) + rem
    for (block, side_counts) in ((w_x, s_x), (w_y, s_y)):
        got = parikh_of(u + d + block)
        want = {ei: c * fact * side_counts.get(ei, 0) for ei in range(nedges)}
        if {e: k for e, k in got.items() if k} != {e: k for e, k in want.items() if k}:
            raise StructuralError("diff/rem Parikh identity failed")
    return DiffRem(diff, rem, u, d, w_x, w_y)


@dataclass
class WitnessPair:
    o_x: tuple
    o_y: tuple
    data: dict


def rooted_loops(g, max_len: int):
    """All rooted cycles of local length <= max_len, the empty one included."""
    out = []

    def dfs(node, seq):
        if node == g.root and seq:
            out.append(tuple(seq))
        if len(seq) >= max_len:
            return
        for i, e in sorted(g.vass.out_edges(node)):
            seq.append(i)
            dfs(e.dst, seq)
            seq.pop()

    dfs(g.root, [])
    return [()] + sorted(out)


def find_z_pair(dmgts: Dmgts, dfa: Nfa, loop_len=4, combo_cap=20000):
    """Per-graph rooted loop pairs (σ_i, σ'_i) with ~A-equal labels whose summed
    Parikh vectors solve Char_X resp. Char_Y; None if none within the caps."""
    per_graph = []
    for g in dmgts.graphs:
        loops = rooted_loops(g, loop_len)
        pairs = []
        for a in loops:
            wa = tuple(g.vass.edges[i].label for i in a if g.vass.edges[i].label != EPSILON)
            pa = dfa_profile(dfa, wa)
            for b in loops:
                wb = tuple(g.vass.edges[i].label for i in b if g.vass.edges[i].label != EPSILON)
                if dfa_profile(dfa, wb) == pa:
                    pairs.append((a, b))
        per_graph.append(pairs)
    combos = [[]]
    for pairs in per_graph:
        combos = [c + [p] for c in combos for p in pairs]
        if len(combos) > combo_cap:
            raise ResourceExhausted(f"z-pair combination cap {combo_cap} exceeded")
    for combo in combos:
        if _solves_side(dmgts, [a for a, _ in combo], "x") and _solves_side(
            dmgts, [b for _, b in combo], "y"
        ):
            return combo
    return None


def _solves_side(dmgts: Dmgts, loops, side) -> bool:
    cs = build_char(dmgts, side)
    system = cs.system
    for gi, g in enumerate(dmgts.graphs):
        counts = parikh_of(loops[gi])
        for ei in range(len(g.vass.edges)):
            system = system.with_fixed(edge_var(gi, ei), counts.get(ei, 0))
    return ilp_feasible(system) is not None


def inseparability_witness(dmgts: Dmgts, dfa: Nfa, z_pair=None,
                           k_cap=64, c_cap=64,
                           caps: LanguageCaps = LanguageCaps()) -> WitnessPair:
    """Words o_x ∈ L_X and o_y ∈ L_Y with o_x ~A o_y; such a pair refutes the
    candidate DFA as a separator of L_X from the Dyck language. Membership is
    verified by simulation, never trusted from the construction."""
    if not is_zero_reaching(dmgts):
        raise ArgumentError("inseparability witnesses need a zero-reaching DMGTS")
    short = _short_witness(dmgts, dfa, caps)
    if short is not None:
        return short
    if z_pair is None:
        z_pair = find_z_pair(dmgts, dfa)
    if z_pair is None:
        raise ResourceExhausted("no profile-matched loop pair within the caps")
    mgts = dmgts.mgts
    covers = []
    for g in mgts.graphs:
        u = covering_sequences(g)
        d = down_covering(g)
        if u is None or d is None:
            raise ArgumentError("inseparability witnesses need a perfect DMGTS")
        covers.append((u, d))
    cs_x = build_char(dmgts, "x")
    cs_y = build_char(dmgts, "y")
    sx, _ = scaled_support(cs_x, covers)
    sy, _ = scaled_support(cs_y, covers)
    # rescale the Dyck side so (s_y - s_x) >= 1 on every edge
    t = 1
    for gi, g in enumerate(mgts.graphs):
        for ei in range(len(g.vass.edges)):
            have = sy[edge_var(gi, ei)]
            need = sx[edge_var(gi, ei)] + 1
            if have:
                t = max(t, -(-need // have))
    sy = {v: t * k for v, k in sy.items()}
    n_states = len(dfa.states)
    fact = factorial(n_states)
    sol_x = _pair_solution(dmgts, [a for a, _ in z_pair], "x")
    sol_y = _pair_solution(dmgts, [b for _, b in z_pair], "y")
    for c in range(1, c_cap + 1):
        ok = True
        parts = []
        for gi, g in enumerate(mgts.graphs):
            u, d = covers[gi]
            try:
                parts.append(build_diff_rem(
                    g,
                    {ei: sx[edge_var(gi, ei)] for ei in range(len(g.vass.edges))},
                    {ei: sy[edge_var(gi, ei)] for ei in range(len(g.vass.edges))},
                    u, d, n_states, c,
                ))
            except ArgumentError:
                ok = False
                break
        if not ok:
            continue
        hit = _common_k(dmgts, z_pair, parts, sol_x, sol_y, k_cap)
        if hit is not None:
            o_x, o_y, k = hit
            px, py = dfa_profile(dfa, o_x), dfa_profile(dfa, o_y)
            if px != py:
                raise StructuralError("witness words have unequal profiles")
            return WitnessPair(o_x, o_y, {"k": k, "c": c, "n_states": n_states})
    raise ResourceExhausted(f"no verifying (c, k) within ({c_cap}, {k_cap})")


def _short_witness(dmgts, dfa, caps):
    lx = side_language_bounded(dmgts, "x", 6, "nat", caps).words
    if not lx:
        return None
    rejected = sorted(
        (tuple(a for a, _ in w) for w in lx if not run_word(dfa, tuple(a for a, _ in w))),
        key=lambda w: (len(w), w),
    )
    if not rejected:
        return None
    ly = side_language_bounded(dmgts, "y", 6, "nat", caps).words
    for ox in rejected:
        p = dfa_profile(dfa, ox)
        for wy in sorted(ly, key=lambda w: (len(w), w)):
            oy = tuple(a for a, _ in wy)
            if dfa_profile(dfa, oy) == p:
                return WitnessPair(ox, oy, {"short": True})
    return None


def _pair_solution(dmgts: Dmgts, loops, side):
    cs = build_char(dmgts, side)
    system = cs.system
    for gi, g in enumerate(dmgts.graphs):
        counts = parikh_of(loops[gi])
        for ei in range(len(g.vass.edges)):
            system = system.with_fixed(edge_var(gi, ei), counts.get(ei, 0))
    sol = ilp_feasible(system)
    if sol is None:
        raise ArgumentError("the loop pair does not solve the side system")
    return sol


def _common_k(dmgts, z_pair, parts, sol_x, sol_y, k_cap):
    from .model import nat_domain

    mgts = dmgts.mgts
    iv, _ = mgts.combined()
    orders_x = side_orders(dmgts, "x")
    orders_y = side_orders(dmgts, "y")
    dom_x = CounterDomainSpec(side_domain(dmgts, "x", "nat"))
    dom_y = CounterDomainSpec(side_domain(dmgts, "y", "nat"))

    def build(seq_word_per_graph, sol):
        seq = []
        for gi in range(len(mgts.graphs)):
            seq.extend(mgts.combined_index(("g", gi, ei)) for ei in seq_word_per_graph[gi])
            if gi < len(mgts.bridges):
                seq.append(mgts.combined_index(("b", gi)))
        start = {c: sol[io_var(0, "in", c)] for c in mgts.counters}
        return Run(GenConfig(iv.init.node, start), tuple(seq))

    for k in range(1, k_cap + 1):
        blocks_x, blocks_y = [], []
        for gi, dr in enumerate(parts):
            sig_x, sig_y = z_pair[gi]
            blocks_x.append(tuple(dr.u) * k + tuple(sig_x) + tuple(dr.w_x) * k + tuple(dr.d) * k)
            blocks_y.append(tuple(dr.u) * k + tuple(sig_y) + tuple(dr.w_y) * k + tuple(dr.d) * k)
        run_x = build(blocks_x, sol_x)
        run_y = build(blocks_y, sol_y)
        if isinstance(simulate(iv.vass, run_x.start, run_x.edge_seq, dom_x), Violation):
            continue
        if isinstance(simulate(iv.vass, run_y.start, run_y.edge_seq, dom_y), Violation):
            continue
        if not intermediate_accepts(mgts, run_x, orders_x, dom_x):
            continue
        if not intermediate_accepts(mgts, run_y, orders_y, dom_y):
            continue
        return run_x.word(iv.vass), run_y.word(iv.vass), k
    return None
