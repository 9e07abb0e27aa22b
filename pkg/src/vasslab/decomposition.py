"""The refine step (cases i, ii, iii), observers and their products, DEC-along,
and the top-level decompose loop returning perfect and decided DMGTS sets."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .chareq import build_char, edge_var, io_var, support
from .errors import ArgumentError, InvariantViolation, ResourceExhausted
from .mgts import (
    Dmgts,
    Mgts,
    MgtsContext,
    PrecoveringGraph,
    Update,
    canonical_key,
    perfectness_diagnosis,
    substitute,
    validate_precovering,
)
from .model import Edge, GenConfig, InitVass, Vass
from .solver import UNBOUNDED, enumerate_var_values, ilp_feasible, lp_max
from .structure import fixed_assignment, fixed_counters, rackoff_bound, rank, rank_less
from .values import OMEGA, is_omega


class Bot:
    """The sink value below zero; absorbing under addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "bot"


BOT = Bot()


def ct(l: int, x):
    """The counting abstraction: negative to ⊥, above l to ω, else identity."""
    if x is BOT:
        return BOT
    if x is OMEGA:
        return OMEGA
    if x < 0:
        return BOT
    if x > l:
        return OMEGA
    return x


def ct_add(x, delta):
    if x is BOT:
        return BOT
    if x is OMEGA:
        return OMEGA
    return x + delta


def mod_residue_expansion(k: int, mu: int, mu_new: int) -> list:
    """All residues i in [0, mu_new) with i ≡ k (mod mu); requires mu | mu_new."""
    if mu_new % mu != 0:
        raise ArgumentError("mu must divide mu_new")
    return [i for i in range(mu_new) if (i - k) % mu == 0]


@dataclass(frozen=True)
class Observer:
    """A transition system over the edge indices of its target graph. `step`
    maps (state, edge index) to successor states; `states` may be a lazily
    discovered subset."""

    initial: tuple
    step: callable
    states: tuple = ()

    def successors(self, s, ei):
        return self.step(s, ei)


def identity_observer() -> Observer:
    return Observer(initial=("*",), step=lambda s, ei: (s,), states=("*",))


@dataclass
class ProductGraph:
    """The reachable part of P × O."""

    states: list
    transitions: dict  # state -> sorted list of (edge index, next state)
    initial: list


def observer_product(p: PrecoveringGraph, obs: Observer, state_cap=100000) -> ProductGraph:
    """Simulate the observer along the edges of P, restricted to the part
    reachable from {root} × initial."""
    initial = [(p.root, s) for s in obs.initial]
    states = set(initial)
    transitions = {}
    stack = sorted(initial, key=repr, reverse=True)
    while stack:
        q, s = stack.pop()
        succ = []
        for ei, e in sorted(p.vass.out_edges(q)):
            for s2 in obs.successors(s, ei):
                succ.append((ei, (e.dst, s2)))
        transitions[(q, s)] = sorted(succ, key=repr)
        for _, st in succ:
            if st not in states:
                states.add(st)
                if len(states) > state_cap:
                    raise ResourceExhausted(f"observer product cap {state_cap} exceeded")
                stack.append(st)
    return ProductGraph(sorted(states, key=repr), transitions, sorted(initial, key=repr))


def _product_sccs(prod: ProductGraph) -> dict:
    """state -> frozenset of its strongly connected component (iterative Tarjan)."""
    index = {}
    low = {}
    onstack = {}
    stack = []
    comp = {}
    counter = [0]

    for root in prod.states:
        if root in index:
            continue
        work = [(root, iter(prod.transitions.get(root, ())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for _, w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, iter(prod.transitions.get(w, ()))))
                    advanced = True
                    break
                elif onstack.get(w):
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                scc = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    scc.append(w)
                    if w == v:
                        break
                fs = frozenset(scc)
                for w in scc:
                    comp[w] = fs
    return comp


def _simple_paths(prod: ProductGraph, finals, path_cap, step_cap=2_000_000):
    """State-non-repeating paths from the initial to the final states, in a
    deterministic order (iterative DFS, pruned to states that can reach a
    final). Returns (state list, edge index list) pairs."""
    can_reach = set()
    back = {}
    for u, succ in prod.transitions.items():
        for _, v in succ:
            back.setdefault(v, set()).add(u)
    stack = [s for s in prod.states if finals(s)]
    can_reach.update(stack)
    while stack:
        v = stack.pop()
        for u in back.get(v, ()):
            if u not in can_reach:
                can_reach.add(u)
                stack.append(u)

    out = []
    steps = 0
    for init in prod.initial:
        if init not in can_reach:
            continue
        visited = {init}
        states = [init]
        edges = []
        iters = [iter(prod.transitions.get(init, ()))]
        if finals(init):
            out.append((list(states), list(edges)))
        while iters:
            steps += 1
            if steps > step_cap:
                raise ResourceExhausted(f"simple path step cap {step_cap} exceeded")
            advanced = False
            for ei, nxt in iters[-1]:
                if nxt in visited or nxt not in can_reach:
                    continue
                visited.add(nxt)
                states.append(nxt)
                edges.append(ei)
                iters.append(iter(prod.transitions.get(nxt, ())))
                if finals(nxt):
                    out.append((list(states), list(edges)))
                    if len(out) > path_cap:
                        raise ResourceExhausted(f"simple path cap {path_cap} exceeded")
                advanced = True
                break
            if not advanced:
                iters.pop()
                visited.remove(states.pop())
                if edges:
                    edges.pop()
    return out


def _state_name(pos, q, s, names):
    return f"p{pos}.{q}#{names[s]}"


def dec_along(p: PrecoveringGraph, mu: int, obs: Observer, finals,
              state_cap=100000, path_cap=2000) -> list:
    """Unfold P along the simple accepted paths of P × obs into MGTS: one
    precovering graph per visited product state (its SCC, rooted there, with
    the inherited assignment), joined by the path edges as bridges; the outer
    markings are reset to P's. Returns a deterministic list of Mgts."""
    prod = observer_product(p, obs, state_cap)
    comp = _product_sccs(prod)
    obs_names = {}
    for q, s in prod.states:
        if s not in obs_names:
            obs_names[s] = f"o{len(obs_names)}"

    if callable(finals):
        is_final = lambda st: st[0] == p.root and finals(st[1])
    else:
        fs = set(finals)
        is_final = lambda st: st[0] == p.root and st[1] in fs

    results = []
    for states, eis in _simple_paths(prod, is_final, path_cap):
        graphs = []
        for pos, st in enumerate(states):
            scc = sorted(comp[st], key=repr)
            node_of = {u: _state_name(pos, u[0], u[1], obs_names) for u in scc}
            edges = []
            for u in scc:
                for ei, v in prod.transitions.get(u, ()):
                    if v in comp[st]:
                        e = p.vass.edges[ei]
                        edges.append(Edge(node_of[u], e.label, e.update, node_of[v]))
            root_name = node_of[st]
            marking = dict(p.assignment[st[0]])
            in_val = dict(p.in_marking) if pos == 0 else dict(marking)
            out_val = dict(p.out_marking) if pos == len(states) - 1 else dict(marking)
            base = InitVass(
                Vass(node_of.values(), p.vass.alphabet, p.vass.counters, edges),
                GenConfig(root_name, in_val),
                GenConfig(root_name, out_val),
            )
            assignment = {node_of[u]: dict(p.assignment[u[0]]) for u in scc}
            g = PrecoveringGraph(base, assignment)
            bad = validate_precovering(g)
            if bad:
                raise InvariantViolation(f"dec_along produced an invalid graph: {bad}")
            graphs.append(g)
        bridges = []
        for ei in eis:
            e = p.vass.edges[ei]
            bridges.append(Update(e.label, e.update))
        results.append(Mgts(graphs, bridges))
    return results


@dataclass
class RefineOutcome:
    case: str
    target: dict
    x_set: list
    y_set: list
    y_certificates: list  # "y-infeasible" | "modulo-nonzero", aligned with y_set


@dataclass
class DecideCaps:
    variants: int = 10_000
    observer_states: int = 100_000
    paths: int = 2_000
    refine_steps: int = 200
    ilp_nodes: int = 100_000
    value_enum: int = 512


def _replace_marking(mgts: Mgts, gi: int, io: str, counter, value) -> Mgts:
    g = mgts.graphs[gi]
    in_val = dict(g.in_marking)
    out_val = dict(g.out_marking)
    (in_val if io == "in" else out_val)[counter] = value
    base = InitVass(g.vass, GenConfig(g.root, in_val), GenConfig(g.root, out_val))
    g2 = PrecoveringGraph(base, g.assignment)
    graphs = list(mgts.graphs)
    graphs[gi] = g2
    return Mgts(graphs, mgts.bridges)


def _set_markings(mgts: Mgts, values: dict) -> Mgts:
    """values: (gi, io, counter) -> value; rebuilds the MGTS."""
    graphs = []
    for gi, g in enumerate(mgts.graphs):
        in_val = dict(g.in_marking)
        out_val = dict(g.out_marking)
        for (gj, io, c), v in values.items():
            if gj == gi:
                (in_val if io == "in" else out_val)[c] = v
        base = InitVass(g.vass, GenConfig(g.root, in_val), GenConfig(g.root, out_val))
        graphs.append(PrecoveringGraph(base, g.assignment))
    return Mgts(graphs, mgts.bridges)


def refine_case_i(dmgts: Dmgts, gi: int, side: str, j, io: str,
                  caps: DecideCaps = DecideCaps()) -> RefineOutcome:
    g = dmgts.graphs[gi]
    marking = g.in_marking if io == "in" else g.out_marking
    if not is_omega(marking[j]):
        raise ArgumentError("case (i) needs an ω marking entry")
    cs = build_char(dmgts, side)
    var = io_var(gi, io, j)
    if var in support(cs):
        raise ArgumentError("case (i) needs the io variable outside the support")
    values = enumerate_var_values(cs.system, var, hard_cap=caps.value_enum,
                                  node_budget=caps.ilp_nodes)
    if values is UNBOUNDED:
        raise InvariantViolation("value set unbounded although outside the support")
    target = {"graph": gi, "side": side, "counter": j, "io": io}
    if side == "x":
        x_set = [
            dmgts.with_mgts(_replace_marking(dmgts.mgts, gi, io, j, a), faithful=True)
            for a in sorted(values)
        ]
        return RefineOutcome("i-x", target, x_set, [], [])

    # side Y: grow the modulus and expand all finite Y markings modulo the old one
    finite_entries = [
        v
        for gg in dmgts.graphs
        for m in (gg.in_marking, gg.out_marking)
        for v in m.values()
        if not is_omega(v)
    ]
    l = 1 + max(list(values) + finite_entries, default=0)
    mu_new = l * dmgts.mu
    ys = set(dmgts.y_counters)
    positions = []  # (gi, io, counter) -> iterable of choices
    last = len(dmgts.graphs) - 1
    for gj, gg in enumerate(dmgts.graphs):
        for io2, m in (("in", gg.in_marking), ("out", gg.out_marking)):
            for c in sorted(ys):
                v = m[c]
                if (gj, io2, c) == (gi, io, j):
                    positions.append(((gj, io2, c), list(range(mu_new))))
                elif is_omega(v):
                    continue
                elif gj == 0 and io2 == "in":
                    positions.append(((gj, io2, c), [v]))  # stays zero-reaching
                else:
                    positions.append(((gj, io2, c), mod_residue_expansion(v, dmgts.mu, mu_new)))
    count = 1
    for _, choices in positions:
        count *= len(choices)
        if count > caps.variants:
            raise ResourceExhausted(f"variant cap {caps.variants} exceeded")
    x_set, y_set, y_certs = [], [], []
    assignments = [{}]
    for key, choices in positions:
        assignments = [{**a, key: ch} for a in assignments for ch in choices]
    for a in assignments:
        mg = _set_markings(dmgts.mgts, a)
        member_out = mg.out_marking
        if all(member_out[c] == 0 for c in dmgts.y_counters if not is_omega(member_out[c])) and all(
            not is_omega(member_out[c]) for c in dmgts.y_counters
        ):
            x_set.append(Dmgts(mg, mu_new, dmgts.x_counters, dmgts.y_counters, faithful=True))
        else:
            y_set.append(Dmgts(mg, mu_new, dmgts.x_counters, dmgts.y_counters, faithful=False))
            y_certs.append("modulo-nonzero")
    return RefineOutcome("i-y", target, x_set, y_set, y_certs)


def refine_case_ii(dmgts: Dmgts, gi: int, side: str,
                   caps: DecideCaps = DecideCaps()) -> RefineOutcome:
    g = dmgts.graphs[gi]
    cs = build_char(dmgts, side)
    sup = support(cs)
    eprime = [ei for ei in range(len(g.vass.edges)) if edge_var(gi, ei) not in sup]
    if not eprime:
        raise ArgumentError("case (ii) needs edges outside the support")
    bounds = []
    for ei in eprime:
        m = lp_max(cs.system, edge_var(gi, ei))
        if m is None:
            raise ArgumentError("case (ii) needs a feasible side system")
        if m is UNBOUNDED:
            raise InvariantViolation("edge variable unbounded although outside the support")
        bounds.append(int(m))
    l = max(bounds)
    order = {ei: k for k, ei in enumerate(sorted(eprime))}
    zero = tuple(0 for _ in eprime)

    def step(s, ei):
        if ei not in order:
            return (s,)
        lst = list(s)
        lst[order[ei]] = ct(l, ct_add(s[order[ei]], 1))
        return (tuple(lst),)

    obs = Observer(initial=(zero,), step=step)

    def final_u(s):
        return all(not is_omega(v) for v in s)

    def final_v(s):
        return any(is_omega(v) for v in s)

    ctx = MgtsContext.around(dmgts.mgts, gi)
    u_list = dec_along(g, dmgts.mu, obs, final_u, caps.observer_states, caps.paths)
    x_set = [
        substitute(ctx, Dmgts(m, dmgts.mu, dmgts.x_counters, dmgts.y_counters, faithful=True))
        for m in u_list
    ]
    y_set, y_certs = [], []
    if side == "y":
        v_list = dec_along(g, dmgts.mu, obs, final_v, caps.observer_states, caps.paths)
        for m in v_list:
            y_set.append(
                substitute(ctx, Dmgts(m, dmgts.mu, dmgts.x_counters, dmgts.y_counters,
                                      faithful=True))
            )
            y_certs.append("y-infeasible")
    target = {"graph": gi, "side": side, "edges": sorted(eprime), "bound": l}
    return RefineOutcome(f"ii-{side}", target, x_set, y_set, y_certs)


def _case_iii_trackers(p: PrecoveringGraph, dmgts: Dmgts, caps: DecideCaps):
    """The per-counter observers of case (iii) and their U/V final predicates."""
    finite_in = [v for v in p.in_marking.values() if not is_omega(v)]
    C = max(2, max(finite_in, default=0) + 1)
    B = rackoff_bound(p, sorted(p.omega_counters), C)
    omega_in = {c for c in p.vass.counters if is_omega(p.in_marking[c])}
    ys = set(dmgts.y_counters)

    trackers = []
    for j in sorted(p.omega_counters - omega_in):
        def step(s, ei, j=j):
            e = p.vass.edges[ei]
            return (ct(B, ct_add(s, e.update[j])),)

        obs = Observer(initial=(p.in_marking[j],), step=step)
        out_j = p.out_marking[j]

        def final_u(s, out_j=out_j):
            return s is not BOT and not is_omega(s) and (is_omega(out_j) or s == out_j)

        def final_v(s, j=j, fu=final_u):
            if j not in ys or is_omega(s):
                return False
            return s is BOT or not fu(s)

        trackers.append((j, obs, final_u, final_v))
    return trackers


def refine_case_iii(dmgts: Dmgts, gi: int, direction: str,
                    caps: DecideCaps = DecideCaps()) -> RefineOutcome:
    g = dmgts.graphs[gi]
    work = g if direction == "up" else g.reverse()
    u_mgts, v_mgts, subcase = _case_iii_core(work, dmgts, caps)
    if direction == "down":
        u_mgts = [m.reverse() for m in u_mgts]
        v_mgts = [m.reverse() for m in v_mgts]
    ctx = MgtsContext.around(dmgts.mgts, gi)
    x_set = [
        substitute(ctx, Dmgts(m, dmgts.mu, dmgts.x_counters, dmgts.y_counters, faithful=True))
        for m in u_mgts
    ]
    y_set = [
        substitute(ctx, Dmgts(m, dmgts.mu, dmgts.x_counters, dmgts.y_counters, faithful=True))
        for m in v_mgts
    ]
    target = {"graph": gi, "direction": direction, "subcase": subcase}
    return RefineOutcome(f"iii-{subcase}", target, x_set, y_set,
                         ["y-infeasible"] * len(y_set))


def _case_iii_core(p: PrecoveringGraph, dmgts: Dmgts, caps: DecideCaps):
    """U and V for a precovering graph without covering sequences (in the
    working orientation); returns (U, V, subcase tag)."""
    fixed = fixed_counters(p)
    fixed_fin = [j for j in sorted(fixed) if not is_omega(p.in_marking[j])]

    for j in fixed_fin:
        out_j = p.out_marking[j]
        if not is_omega(out_j) and out_j != p.in_marking[j]:
            raise InvariantViolation(
                "fixed counter with differing finite extremal markings contradicts feasibility"
            )

    # (b) before (c): an all-non-negative fixed assignment enriches; only when
    # none exists does a negative value trigger the edge deletion
    negatives = []
    for j in fixed_fin:
        phi = fixed_assignment(p, j)
        if all(v >= 0 for v in phi.values()):
            if j in p.omega_counters:
                return [Mgts([_enrich(p, j, phi)])], [], "b"
            # concretely decorated counters carry non-negative values already
        else:
            negatives.append((j, phi))
    if negatives:
        j, phi = negatives[0]
        v = min(q for q, val in phi.items() if val < 0)
        ei = min(i for i, e in enumerate(p.vass.edges) if e.dst == v)
        u_graph = _delete_edge_restrict(p, ei)
        # runs through the deleted edge dip counter j below zero; when j is a
        # Dyck counter they are captured by j's own tracker (X-side dips are
        # already excluded by positivity), so only that observer is unfolded
        v_mgts = []
        for j2, obs, _, final_v in _case_iii_trackers(p, dmgts, caps):
            if j2 == j:
                v_mgts.extend(
                    dec_along(p, dmgts.mu, obs, final_v, caps.observer_states, caps.paths)
                )
        return [Mgts([u_graph])], v_mgts, "c"

    u_out = []
    for j, obs, final_u, _ in _case_iii_trackers(p, dmgts, caps):
        u_out.extend(dec_along(p, dmgts.mu, obs, final_u, caps.observer_states, caps.paths))
    return u_out, _common_v(p, dmgts, caps), "d"


def _common_v(p: PrecoveringGraph, dmgts: Dmgts, caps: DecideCaps):
    out = []
    for j, obs, _, final_v in _case_iii_trackers(p, dmgts, caps):
        out.extend(dec_along(p, dmgts.mu, obs, final_v, caps.observer_states, caps.paths))
    return out


def _enrich(p: PrecoveringGraph, j, phi) -> PrecoveringGraph:
    assignment = {q: dict(val) for q, val in p.assignment.items()}
    for q in assignment:
        assignment[q][j] = phi[q]
    out_val = dict(p.out_marking)
    if is_omega(out_val[j]):
        out_val[j] = phi[p.root]
    base = InitVass(p.vass, GenConfig(p.root, dict(p.in_marking)), GenConfig(p.root, out_val))
    g = PrecoveringGraph(base, assignment)
    bad = validate_precovering(g)
    if bad:
        raise InvariantViolation(f"enrichment produced an invalid graph: {bad}")
    return g


def _delete_edge_restrict(p: PrecoveringGraph, ei: int) -> PrecoveringGraph:
    from .mgts import _scc_of

    edges = [e for i, e in enumerate(p.vass.edges) if i != ei]
    comp = _scc_of(p.vass.nodes, [(e.src, e.dst) for e in edges], p.root)
    edges = [e for e in edges if e.src in comp and e.dst in comp]
    vass = Vass(sorted(comp), p.vass.alphabet, p.vass.counters, edges)
    base = InitVass(vass, GenConfig(p.root, dict(p.in_marking)),
                    GenConfig(p.root, dict(p.out_marking)))
    assignment = {q: dict(p.assignment[q]) for q in comp}
    g = PrecoveringGraph(base, assignment)
    bad = validate_precovering(g)
    if bad:
        raise InvariantViolation(f"edge deletion produced an invalid graph: {bad}")
    return g


def refine(dmgts: Dmgts, caps: DecideCaps = DecideCaps()) -> RefineOutcome:
    """Dispatch on the first failing perfectness condition; the outcome's X
    members strictly decrease the rank and inherit the faithful flag."""
    if not dmgts.faithful:
        raise ArgumentError("refine expects a faithful-flagged DMGTS")
    diag = perfectness_diagnosis(dmgts)
    if diag is None:
        raise ArgumentError("refine expects an imperfect DMGTS")
    if diag.case == "i":
        outcome = refine_case_i(dmgts, diag.graph, diag.side, diag.counter, diag.io, caps)
    elif diag.case == "ii":
        outcome = refine_case_ii(dmgts, diag.graph, diag.side, caps)
    elif diag.case == "iii":
        outcome = refine_case_iii(dmgts, diag.graph, diag.direction, caps)
    else:
        raise ArgumentError(f"cannot refine: {diag}")
    parent_rank = rank(dmgts)
    for member in outcome.x_set:
        if not rank_less(rank(member), parent_rank):
            raise InvariantViolation(
                f"refine case {outcome.case} did not decrease the rank: "
                f"{rank(member)} vs {parent_rank}"
            )
    return outcome


@dataclass(frozen=True)
class DecidedMember:
    dmgts: Dmgts
    certificate: str  # "y-infeasible" | "modulo-nonzero"


@dataclass
class DecomposeResult:
    perfect: list
    decided: list  # of DecidedMember
    trace: list


def decompose(dmgts: Dmgts, caps: DecideCaps = DecideCaps()) -> DecomposeResult:
    """Worklist decomposition: perfect members are collected, X-infeasible ones
    dropped, Y-infeasible ones decided, the rest refined (X recursed, Y decided).
    Terminates by rank well-foundedness; caps abort with the partial trace."""
    if not dmgts.faithful:
        raise ArgumentError("decompose expects a faithful-flagged DMGTS")
    worklist = [dmgts]
    perfect, decided, trace = [], [], []
    steps = 0
    while worklist:
        cur = worklist.pop(0)
        cur_rank = rank(cur)
        diag = perfectness_diagnosis(cur)
        if diag is None:
            perfect.append(cur)
            trace.append({"case": "perfect", "rank_before": list(cur_rank)})
            continue
        if ilp_feasible(build_char(cur, "x").system, node_budget=caps.ilp_nodes) is None:
            trace.append({"case": "drop-x-infeasible", "rank_before": list(cur_rank)})
            continue
        if ilp_feasible(build_char(cur, "y").system, node_budget=caps.ilp_nodes) is None:
            decided.append(DecidedMember(cur, "y-infeasible"))
            trace.append({"case": "decide-y-infeasible", "rank_before": list(cur_rank)})
            continue
        steps += 1
        if steps > caps.refine_steps:
            raise ResourceExhausted(
                f"refine step cap {caps.refine_steps} exceeded",
                partial=DecomposeResult(perfect, decided, trace),
            )
        from .solver import STATS

        stats_before = dict(STATS)
        outcome = refine(cur, caps)
        trace.append({
            "case": outcome.case,
            "target": {k: (v if isinstance(v, (int, str, list)) else repr(v))
                       for k, v in outcome.target.items()},
            "rank_before": list(cur_rank),
            "rank_after": [list(rank(m)) for m in outcome.x_set],
            "x": len(outcome.x_set),
            "y": len(outcome.y_set),
            "solver_stats": {k: STATS[k] - stats_before[k] for k in STATS},
        })
        worklist.extend(outcome.x_set)
        decided.extend(
            DecidedMember(m, cert) for m, cert in zip(outcome.y_set, outcome.y_certificates)
        )
    perfect.sort(key=canonical_key)
    decided.sort(key=lambda d: canonical_key(d.dmgts))
    return DecomposeResult(perfect, decided, trace)


def trace_to_jsonl(trace) -> str:
    return "\n".join(json.dumps(entry, sort_keys=True) for entry in trace)
