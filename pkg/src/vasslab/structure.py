"""Graph analyses over precovering graphs: cycle spaces and ranks, covering
sequences via Karp-Miller trees, fixed counters, realization of Parikh vectors
as rooted cycles, and the Rackoff-style bound and cover."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm

from .errors import ArgumentError, ResourceExhausted, StructuralError
from .mgts import Dmgts, Mgts, PrecoveringGraph, is_strongly_connected
from .model import CounterDomainSpec, GenConfig, Run, Violation, simulate
from .values import OMEGA, is_omega


# -- linear algebra over Q -----------------------------------------------------

def _rref(rows):
    """Reduced row echelon form in place; returns pivot column list."""
    rows = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def matrix_rank(rows) -> int:
    if not rows:
        return 0
    _, pivots = _rref(rows)
    return len(pivots)


def kernel_basis(rows, ncols):
    """A basis of {x : rows·x = 0} over Q with integer entries."""
    if not rows:
        rows = [[Fraction(0)] * ncols]
    rref, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for ri, pc in enumerate(pivots):
            vec[pc] = -rref[ri][fc]
        denom = lcm(*(x.denominator for x in vec))
        basis.append([int(x * denom) for x in vec])
    return basis


def _kirchhoff_rows(vass):
    rows = []
    for q in vass.nodes:
        row = [0] * len(vass.edges)
        for i, e in enumerate(vass.edges):
            if e.dst == q:
                row[i] += 1
            if e.src == q:
                row[i] -= 1
        rows.append(row)
    return rows


def cycle_flows(p: PrecoveringGraph):
    """Integer basis of the Kirchhoff flow kernel of the graph."""
    if not is_strongly_connected(p.vass):
        raise StructuralError("cycle space needs a strongly connected graph")
    return kernel_basis(_kirchhoff_rows(p.vass), len(p.vass.edges))


def _flow_effect(vass, flow):
    eff = {c: 0 for c in vass.counters}
    for i, k in enumerate(flow):
        if k:
            for c, x in vass.edges[i].update.items():
                eff[c] += k * x
    return eff


def cycle_space_dim(p: PrecoveringGraph) -> int:
    """Dimension of the span of cycle effects."""
    vass = p.vass
    effects = [
        [_flow_effect(vass, flow)[c] for c in vass.counters] for flow in cycle_flows(p)
    ]
    return matrix_rank(effects)


# -- rank ------------------------------------------------------------------------

def rank(obj) -> tuple:
    """The termination measure: index d - i carries |E| + |Ω(in)| + |Ω(P)| +
    |Ω(out)| for an i-dimensional cycle space; MGTS rank is the sum; the
    modulus of a DMGTS is ignored."""
    mgts = obj.mgts if isinstance(obj, Dmgts) else obj
    if isinstance(mgts, PrecoveringGraph):
        mgts = Mgts([mgts])
    d = len(mgts.counters)
    vec = [0] * (d + 1)
    for g in mgts.graphs:
        i = cycle_space_dim(g)
        entry = (
            len(g.vass.edges)
            + len([c for c in g.in_marking if is_omega(g.in_marking[c])])
            + len(g.omega_counters)
            + len([c for c in g.out_marking if is_omega(g.out_marking[c])])
        )
        vec[d - i] += entry
    return tuple(vec)


def rank_less(r1, r2) -> bool:
    """Lexicographic, index 0 most significant."""
    return tuple(r1) < tuple(r2)


# -- Karp-Miller and covering sequences -------------------------------------------

@dataclass
class KmNode:
    node: str
    valuation: tuple
    parent: "KmNode" = None
    edge: int = None
    depth: int = 0


class KmTree:
    def __init__(self, nodes, counters):
        self.nodes = nodes
        self.counters = counters

    def to_dot(self) -> str:
        lines = ["digraph km {", "  rankdir=TB;"]
        ids = {id(n): f"k{i}" for i, n in enumerate(self.nodes)}
        for n in self.nodes:
            val = ",".join(str(v) for v in n.valuation)
            lines.append(f'  {ids[id(n)]} [label="{n.node}\\n({val})"];')
            if n.parent is not None:
                lines.append(f'  {ids[id(n.parent)]} -> {ids[id(n)]} [label="e{n.edge}"];')
        lines.append("}")
        return "\n".join(lines)


def _dominates(low, high):
    """low <= high with omega on top; returns (True, strict-coordinate set)."""
    strict = set()
    for i, (a, b) in enumerate(zip(low, high)):
        if is_omega(a):
            if not is_omega(b):
                return False, None
        elif is_omega(b) or b > a:
            strict.add(i)
        elif b < a:
            return False, None
    return True, strict


def karp_miller(vass, start_node, start_val, node_cap=20000) -> KmTree:
    counters = vass.counters
    root = KmNode(start_node, tuple(start_val[c] for c in counters))
    tree = [root]
    queue = [root]
    while queue:
        cur = queue.pop(0)
        # duplicate pruning: an identical ancestor means nothing new below
        anc = cur.parent
        dup = False
        while anc is not None:
            if anc.node == cur.node and anc.valuation == cur.valuation:
                dup = True
                break
            anc = anc.parent
        if dup:
            continue
        for i, e in sorted(vass.out_edges(cur.node)):
            val = list(cur.valuation)
            ok = True
            for ci, c in enumerate(counters):
                val[ci] = val[ci] + e.update[c] if not is_omega(val[ci]) else OMEGA
                if not is_omega(val[ci]) and val[ci] < 0:
                    ok = False
                    break
            if not ok:
                continue
            # accelerate against every dominated ancestor
            anc = cur
            while anc is not None:
                if anc.node == e.dst:
                    dom, strict = _dominates(anc.valuation, tuple(val))
                    if dom and strict:
                        for ci in strict:
                            val[ci] = OMEGA
                anc = anc.parent
            child = KmNode(e.dst, tuple(val), cur, i, cur.depth + 1)
            tree.append(child)
            queue.append(child)
            if len(tree) > node_cap:
                raise ResourceExhausted(f"Karp-Miller node cap {node_cap} exceeded")
    return KmTree(tree, counters)


def _pump_targets(p: PrecoveringGraph):
    return sorted(p.omega_counters - frozenset(
        c for c in p.vass.counters if is_omega(p.in_marking[c])
    ))


def covering_sequences(p: PrecoveringGraph, node_cap=20000, witness_cap=200000):
    """A witness σ with (root,c1).σ.(root,c2) an N-run, c1 <= in (ω free) and
    c2 strictly larger on the ω-decorated concretely-initialized counters; None
    if no covering sequence exists. Decision by Karp-Miller, witness by bounded
    search (verified)."""
    pump = _pump_targets(p)
    if not pump:
        return ()
    tree = karp_miller(p.vass, p.root, p.in_marking, node_cap)
    hit = any(
        n.node == p.root and all(is_omega(n.valuation[p.vass.counters.index(c)]) for c in pump)
        for n in tree.nodes
    )
    if not hit:
        return None
    witness = _pump_witness(p, pump, witness_cap)
    if witness is None:
        raise ResourceExhausted("covering sequence exists but witness search hit its cap")
    return witness


def _pump_witness(p: PrecoveringGraph, pump, witness_cap):
    vass = p.vass
    counters = vass.counters
    maxupd = max((abs(x) for e in vass.edges for x in e.update.values()), default=0) or 1
    for depth in (8, 16, 32, 64):
        seed = depth * maxupd + 1
        start = {
            c: (seed if is_omega(p.in_marking[c]) else p.in_marking[c]) for c in counters
        }
        goal = {c: start[c] + 1 for c in pump}
        seen = {}
        frontier = [(p.root, tuple(start[c] for c in counters), ())]
        seen[(p.root, frontier[0][1])] = ()
        steps = 0
        while frontier:
            node, val, path = frontier.pop(0)
            if node == p.root and all(
                val[counters.index(c)] >= goal[c] for c in pump
            ) and path:
                return path
            if len(path) >= depth:
                continue
            for i, e in sorted(vass.out_edges(node)):
                nval = tuple(
                    val[ci] + e.update[c] for ci, c in enumerate(counters)
                )
                if any(v < 0 for v in nval):
                    continue
                steps += 1
                if steps > witness_cap:
                    return None
                key = (e.dst, nval)
                if key in seen:
                    continue
                seen[key] = None
                frontier.append((e.dst, nval, path + (i,)))
    return None


def down_covering(p: PrecoveringGraph, node_cap=20000, witness_cap=200000):
    """Cov↓(P) = rev(Cov(rev(P))): the down witness, reversed, pumps up the
    reversed graph."""
    up = covering_sequences(p.reverse(), node_cap, witness_cap)
    if up is None:
        return None
    return tuple(reversed(up))


# -- fixed counters ---------------------------------------------------------------

def fixed_counters(p: PrecoveringGraph) -> frozenset:
    """Counters with zero effect on every cycle (every Kirchhoff kernel flow)."""
    if not is_strongly_connected(p.vass):
        raise StructuralError("fixed counters need a strongly connected graph")
    flows = cycle_flows(p)
    out = set()
    for c in p.vass.counters:
        if all(_flow_effect(p.vass, flow)[c] == 0 for flow in flows):
            out.add(c)
    return frozenset(out)


def fixed_assignment(p: PrecoveringGraph, j) -> dict:
    """The unique node potential of a fixed counter, propagated from in(j)."""
    if j not in fixed_counters(p):
        raise ArgumentError(f"counter {j!r} is not fixed")
    root_val = p.in_marking[j]
    if is_omega(root_val):
        raise ArgumentError(f"fixed assignment needs a finite in-marking on {j!r}")
    phi = {p.root: root_val}
    queue = [p.root]
    while queue:
        q = queue.pop(0)
        for _, e in p.vass.out_edges(q):
            v = phi[q] + e.update[j]
            if e.dst in phi:
                if phi[e.dst] != v:
                    raise StructuralError("fixed assignment inconsistent; counter not fixed")
            else:
                phi[e.dst] = v
                queue.append(e.dst)
    return phi


# -- realization -------------------------------------------------------------------

def realization(vass_or_graph, parikh: dict, start) -> tuple:
    """An Eulerian-style rooted cycle using edge i exactly parikh[i] times
    (Hierholzer, smallest-edge-id first). The support must be Kirchhoff-balanced
    and connected to `start`."""
    vass = vass_or_graph.vass if isinstance(vass_or_graph, PrecoveringGraph) else vass_or_graph
    remaining = {i: k for i, k in parikh.items() if k > 0}
    for i, k in parikh.items():
        if k < 0 or not 0 <= i < len(vass.edges):
            raise ArgumentError(f"bad Parikh entry {i}: {k}")
    balance = {}
    for i, k in remaining.items():
        e = vass.edges[i]
        balance[e.src] = balance.get(e.src, 0) - k
        balance[e.dst] = balance.get(e.dst, 0) + k
    if any(v != 0 for v in balance.values()):
        raise ArgumentError("Parikh vector is not Kirchhoff-consistent")
    if not remaining:
        return ()
    avail = {}
    for i in sorted(remaining):
        avail.setdefault(vass.edges[i].src, []).append(i)
    node_stack, edge_stack, circuit = [start], [], []
    counts = dict(remaining)
    while node_stack:
        v = node_stack[-1]
        e_id = next((i for i in avail.get(v, []) if counts.get(i, 0) > 0), None)
        if e_id is not None:
            counts[e_id] -= 1
            node_stack.append(vass.edges[e_id].dst)
            edge_stack.append(e_id)
        else:
            node_stack.pop()
            if edge_stack:
                circuit.append(edge_stack.pop())
    if any(v > 0 for v in counts.values()):
        raise ArgumentError("Parikh support is not connected to the start node")
    circuit.reverse()
    return tuple(circuit)


# -- Rackoff-style bound and cover ---------------------------------------------------

def largest_update(p: PrecoveringGraph) -> int:
    return max((abs(x) for e in p.vass.edges for x in e.update.values()), default=0) or 1


def rackoff_bound(p: PrecoveringGraph, jprime, C=None, exponent_mode="factorial") -> int:
    """B = (|nodes| * l * C) ** (|J'| + 1)! with l the largest absolute
    transition effect. exponent_mode="literal" reads the exponent as |J'| + 1
    instead (the typographically ambiguous alternative)."""
    if C is None:
        finite = [v for v in p.in_marking.values() if not is_omega(v)]
        C = max(finite, default=0) + 1
    C = max(2, C)
    base = len(p.vass.nodes) * largest_update(p) * C
    k = len(set(jprime))
    exponent = factorial(k + 1) if exponent_mode == "factorial" else k + 1
    return base ** exponent


def rackoff_cover(p: PrecoveringGraph, run: Run, jprime, C, state_cap=200000):
    """A J'-run from the run's start to its final node with every J' counter
    >= C, found by exact BFS (desk-scale; the inductive cut-and-splice bound is
    not materialized). Verified by simulation before returning."""
    vass = p.vass
    js = sorted(set(jprime))
    start_vals = tuple(run.start.valuation[c] for c in js)
    if any(v < 0 for v in start_vals):
        raise ArgumentError("premise violated: J' start values must be non-negative")
    target_node = run.final_config(vass).node
    seen = {(run.start.node, start_vals): ()}
    frontier = [(run.start.node, start_vals)]
    while frontier:
        node, vals = frontier.pop(0)
        path = seen[(node, vals)]
        if node == target_node and all(v >= C for v in vals):
            chk = simulate(vass, GenConfig(run.start.node, dict(run.start.valuation)),
                           path, CounterDomainSpec(frozenset(js)))
            if isinstance(chk, Violation):
                raise StructuralError("rackoff cover failed verification")
            return path
        for i, e in sorted(vass.out_edges(node)):
            nvals = tuple(v + e.update[c] for v, c in zip(vals, js))
            if any(v < 0 for v in nvals):
                continue
            key = (e.dst, nvals)
            if key in seen:
                continue
            if len(seen) > state_cap:
                raise ResourceExhausted(f"rackoff cover state cap {state_cap} exceeded")
            seen[key] = path + (i,)
            frontier.append(key)
    raise ResourceExhausted("no covering J'-run found within the explored space")
