"""CLI, file I/O, the end-to-end separability pipeline, and the brute-force
reference oracles used by the tests and derived examples.

Exit codes: 0 certified verdict, 2 input error, 3 unknown / resource exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .automata import Nfa, dump_nfa, nfa_to_dot, run_word, strip_hash, union
from .chareq import build_char
from .decomposition import DecideCaps, decompose, trace_to_jsonl
from .errors import ArgumentError, ResourceExhausted, StructuralError
from .mgts import (
    Dmgts,
    LanguageCaps,
    dmgts_from_json,
    fold_to_mgts_list,
    initial_dmgts,
)
from .errors import InvariantViolation
from .model import (
    EPSILON,
    InitVass,
    dyck_alphabet,
    init_vass_from_json,
    language_bounded,
    letter_index,
    nat_domain,
)
from .separator import lift_separator, modulo_automaton
from .solver import ilp_feasible
from .values import is_omega
from .zsep import ZsepCaps, z_separability


@dataclass
class PipelineCaps:
    max_word_len: int = 10
    max_run_len: int = 12
    counter_cap: int = 40
    ilp_nodes: int = 100_000
    observer_states: int = 100_000
    variants: int = 10_000
    pump_k: int = 64

    def decide(self) -> DecideCaps:
        return DecideCaps(
            variants=self.variants,
            observer_states=self.observer_states,
            ilp_nodes=self.ilp_nodes,
        )

    def language(self) -> LanguageCaps:
        return LanguageCaps(max_run_len=self.max_run_len, value_cap=self.counter_cap)

    def zsep(self) -> ZsepCaps:
        return ZsepCaps(ilp_nodes=self.ilp_nodes, language=self.language())


@dataclass
class PipelineReport:
    verdict: str                     # "separable" | "inseparable" | "unknown"
    witness: tuple = None            # a word in both languages, when found
    z_pair: list = None
    separator: Nfa = None
    stages: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    caps: PipelineCaps = None

    def to_json(self):
        doc = {
            "verdict": self.verdict,
            "stages": self.stages,
            "caps": vars(self.caps) if self.caps else None,
        }
        if self.witness is not None:
            doc["witness"] = list(self.witness)
        if self.z_pair is not None:
            doc["z_pair"] = repr(self.z_pair)
        if self.separator is not None:
            doc["separator"] = json.loads(dump_nfa(self.separator))
        return doc


# -- reference oracles -----------------------------------------------------------

@dataclass(frozen=True)
class BfsResult:
    status: str          # "reachable" | "unreachable" | "inconclusive"
    word: tuple = None


def oracle_bfs(iv: InitVass, counter_cap=40, length_cap=12) -> BfsResult:
    """Explicit-state N-reachability with value and length caps. `unreachable`
    is certified only when no branch was pruned by the caps."""
    if any(is_omega(v) for v in iv.init.valuation.values()):
        raise ArgumentError("oracle_bfs needs a finite initial valuation")
    vass = iv.vass
    counters = vass.counters
    start = (iv.init.node, tuple(iv.init.valuation[c] for c in counters))
    seen = {start: ()}
    frontier = [start]
    pruned = False

    def matches_final(node, vals):
        if node != iv.final.node:
            return False
        for c, v in zip(counters, vals):
            want = iv.final.valuation[c]
            if not is_omega(want) and v != want:
                return False
        return True

    depth = 0
    while frontier and depth <= length_cap:
        nxt = []
        for node, vals in frontier:
            if matches_final(node, vals):
                return BfsResult("reachable", seen[(node, vals)])
            for _, e in sorted(vass.out_edges(node)):
                nv = tuple(v + e.update[c] for v, c in zip(vals, counters))
                if any(v < 0 for v in nv):
                    continue
                if any(v > counter_cap for v in nv):
                    pruned = True
                    continue
                key = (e.dst, nv)
                if key in seen:
                    continue
                word = seen[(node, vals)]
                seen[key] = word if e.label == EPSILON else word + (e.label,)
                nxt.append(key)
        frontier = nxt
        depth += 1
    if frontier:
        pruned = True  # length cap cut the search
    return BfsResult("inconclusive" if pruned else "unreachable")


@dataclass(frozen=True)
class PumpSearchResult:
    found: bool
    pruned: bool
    witness: tuple = None


def oracle_pump_search(p, run_len=10, counter_cap=30, seed=None) -> PumpSearchResult:
    """Brute-force search for a covering sequence: a rooted N-run strictly
    increasing all ω-decorated concretely-initialized counters."""
    vass = p.vass
    counters = vass.counters
    pump = sorted(p.omega_counters - frozenset(
        c for c in counters if is_omega(p.in_marking[c])
    ))
    if not pump:
        return PumpSearchResult(True, False, ())
    maxupd = max((abs(x) for e in vass.edges for x in e.update.values()), default=0) or 1
    if seed is None:
        seed = run_len * maxupd
    start = {c: (seed if is_omega(p.in_marking[c]) else p.in_marking[c]) for c in counters}
    goal = {c: start[c] + 1 for c in pump}
    pruned = [False]
    seen = set()

    def dfs(node, vals, path):
        if node == p.root and path and all(
            vals[counters.index(c)] >= goal[c] for c in pump
        ):
            return tuple(path)
        if len(path) >= run_len:
            return None
        key = (node, vals, len(path))
        if key in seen:
            return None
        seen.add(key)
        for i, e in sorted(vass.out_edges(node)):
            nv = tuple(v + e.update[c] for v, c in zip(vals, counters))
            if any(v < 0 for v in nv):
                continue
            if any(v > counter_cap + seed for v in nv):
                pruned[0] = True
                continue
            path.append(i)
            hit = dfs(e.dst, nv, path)
            path.pop()
            if hit is not None:
                return hit
        return None

    hit = dfs(p.root, tuple(start[c] for c in counters), [])
    return PumpSearchResult(hit is not None, pruned[0], hit)


def dyck_words(n: int, max_len: int):
    """All Dyck words over Σ_n up to the length, by prefix-pruned DFS."""
    out = []
    letters = dyck_alphabet(n)

    def dfs(vals, word):
        if all(v == 0 for v in vals):
            out.append(tuple(word))
        if len(word) >= max_len:
            return
        for a in letters:
            i, d = letter_index(a, n)
            if vals[i - 1] + d < 0:
                continue
            vals[i - 1] += d
            word.append(a)
            dfs(vals, word)
            word.pop()
            vals[i - 1] -= d

    dfs([0] * n, [])
    return out


# -- reachability ------------------------------------------------------------------

def reach_decide(iv: InitVass, caps: PipelineCaps = PipelineCaps()):
    """Decomposition-based reachability: wrap as a DMGTS with an empty Dyck
    side; reachable iff some perfect member's system is feasible (the classical
    iff chain). Returns ("reachable", (member, solution)) or ("unreachable",
    None)."""
    counters = iv.vass.counters
    for mgts in fold_to_mgts_list(iv):
        dm = Dmgts(mgts, 1, counters, (), faithful=True)
        res = decompose(dm, caps.decide())
        for member in res.perfect:
            sol = ilp_feasible(build_char(member, "full").system,
                               node_budget=caps.ilp_nodes)
            if sol is not None:
                return "reachable", (member, sol)
    return "unreachable", None


def _bfs_or_inconclusive(iv, caps):
    try:
        return oracle_bfs(iv, caps.counter_cap, caps.max_run_len)
    except ArgumentError:  # ω initial valuations: the explicit search cannot seed
        return BfsResult("inconclusive")


def cmd_reach(iv: InitVass, caps: PipelineCaps = PipelineCaps()) -> dict:
    bfs = _bfs_or_inconclusive(iv, caps)
    verdict, _ = reach_decide(iv, caps)
    if bfs.status == "reachable" and verdict != "reachable":
        raise StructuralError("reachability engines disagree (BFS found a run)")
    return {"verdict": verdict, "bfs": bfs.status,
            "bfs_word": list(bfs.word) if bfs.word is not None else None}


# -- the separability pipeline --------------------------------------------------------

def _mod_certificate_nfa(member: Dmgts) -> Nfa:
    """The separator of a modulo-decided member: words whose effect on the
    certificate counter matches its non-zero out-marking residue."""
    from .zsep import _mod_effect_nfa

    n = len(member.y_counters)
    mu = member.mu
    out = member.mgts.out_marking
    for idx, c in enumerate(member.y_counters, start=1):
        v = out[c]
        if not is_omega(v) and v % mu != 0:
            return strip_hash(_mod_effect_nfa(idx, mu, v % mu, n))
    raise InvariantViolation("modulo-decided member without a non-zero Y out-marking")


def cmd_separate(subject: InitVass, caps: PipelineCaps = PipelineCaps()) -> PipelineReport:
    """Decide L(subject) | Dyck_n: emptiness of the intersection first, then
    decompose the initial DMGTS, then per perfect member the Z-separability
    oracle with lifting; decided members are separable by construction. The
    emitted separator passes the bounded coverage and disjointness checks."""
    report = PipelineReport(verdict="unknown", caps=caps)
    n = len(subject.vass.alphabet) // 2
    if set(subject.vass.alphabet) != set(dyck_alphabet(n)):
        raise ArgumentError("subject must be over a Dyck alphabet")

    nd = initial_dmgts(subject)
    combined, _ = nd.mgts.combined()
    inter = InitVass(combined.vass, combined.init, combined.final)
    bfs = _bfs_or_inconclusive(inter, caps)
    if bfs.status == "reachable":
        report.verdict = "inseparable"
        report.witness = bfs.word
        report.stages.append({"stage": "intersection", "result": "nonempty-bfs"})
        return report
    verdict, hit = reach_decide(inter, caps)
    if verdict == "reachable":
        member, sol = hit
        from .separator import lambert_pump

        run = lambert_pump(member, sol, k_cap=caps.pump_k)
        iv, _ = member.mgts.combined()
        report.verdict = "inseparable"
        report.witness = run.word(iv.vass)
        report.stages.append({"stage": "intersection", "result": "nonempty-decomposition"})
        return report
    report.stages.append({"stage": "intersection", "result": "empty-certified"})

    res = decompose(nd, caps.decide())
    report.trace = res.trace
    report.stages.append({
        "stage": "decompose", "perfect": len(res.perfect), "decided": len(res.decided),
    })

    separators = []
    for member in res.perfect:
        v = z_separability(member, caps.zsep())
        if v.kind == "inseparable":
            report.verdict = "inseparable"
            report.z_pair = v.z_pair
            report.stages.append({"stage": "zsep", "result": "inseparable",
                                  "strategy": v.strategy})
            return report
        if v.kind == "unknown":
            report.stages.append({"stage": "zsep", "result": "unknown", "reason": v.reason})
            return report
        separators.append(lift_separator(v.nfa, member))
        report.stages.append({"stage": "zsep", "result": "separable", "strategy": v.strategy})
    for member in res.decided:
        if member.certificate == "y-infeasible":
            separators.append(strip_hash(modulo_automaton(member.dmgts)))
        else:
            separators.append(_mod_certificate_nfa(member.dmgts))

    alphabet = frozenset(dyck_alphabet(n))
    sep = union(separators, alphabet) if separators else Nfa({"e"}, set(), {"e"}, set(), alphabet)

    subject_words = language_bounded(
        subject, caps.max_word_len, nat_domain(subject.vass),
        max_run_len=caps.max_run_len + caps.max_word_len, value_cap=caps.counter_cap,
    )
    for w in subject_words:
        if not run_word(sep, w):
            report.stages.append({"stage": "verify", "result": "coverage-failed",
                                  "word": list(w)})
            return report
    for w in dyck_words(n, caps.max_word_len):
        if run_word(sep, w):
            report.stages.append({"stage": "verify", "result": "disjointness-failed",
                                  "word": list(w)})
            return report
    report.stages.append({"stage": "verify", "result": "ok",
                          "len": caps.max_word_len})
    report.verdict = "separable"
    report.separator = sep
    return report


# -- CLI ---------------------------------------------------------------------------

def _parse_word(text: str) -> tuple:
    return tuple(text.split()) if text.strip() else ()


def _add_caps(parser):
    parser.add_argument("--max-word-len", type=int, default=10)
    parser.add_argument("--max-run-len", type=int, default=12)
    parser.add_argument("--counter-cap", type=int, default=40)
    parser.add_argument("--ilp-nodes", type=int, default=100_000)
    parser.add_argument("--observer-states", type=int, default=100_000)
    parser.add_argument("--variants", type=int, default=10_000)
    parser.add_argument("--pump-k", type=int, default=64)


def _caps_from(args) -> PipelineCaps:
    return PipelineCaps(
        max_word_len=args.max_word_len,
        max_run_len=args.max_run_len,
        counter_cap=args.counter_cap,
        ilp_nodes=args.ilp_nodes,
        observer_states=args.observer_states,
        variants=args.variants,
        pump_k=args.pump_k,
    )


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"bad JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise ArgumentError(str(exc))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vasslab",
        description="Regular separability of VASS reachability languages from Dyck languages",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("separate", help="decide L(subject) | Dyck_n")
    p.add_argument("--file", required=True)
    _add_caps(p)

    p = sub.add_parser("reach", help="decide N-reachability of an initialized VASS")
    p.add_argument("--file", required=True)
    _add_caps(p)

    p = sub.add_parser("decompose", help="decompose a DMGTS into perfect and decided sets")
    p.add_argument("--file", required=True)
    _add_caps(p)

    p = sub.add_parser("approx", help="k-th regular approximation of a linear set")
    p.add_argument("--base", required=True, help="comma-separated integers")
    p.add_argument("--periods", default="", help="semicolon-separated comma vectors")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--member", help="space-separated word to test")
    p.add_argument("--emit", action="store_true", help="emit the automaton JSON")

    p = sub.add_parser("basicsep", help="family members of the basic separators")
    p.add_argument("--family", choices=["mod", "cov", "drift"], required=True)
    p.add_argument("--mu", type=int, default=2)
    p.add_argument("--v", default="1", help="comma-separated vector")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--member", help="space-separated word to test")

    p = sub.add_parser("counterexample", help="the concatenation-hard family")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--member", help="space-separated word to test")

    p = sub.add_parser("trace", help="emit a decomposition trace")
    p.add_argument("--file", required=True)
    p.add_argument("--out", help="trace JSONL path (default stdout)")
    p.add_argument("--dot", help="write the separator/first-member DOT here")
    _add_caps(p)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ArgumentError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceExhausted as exc:
        print(f"resource-exhausted: {exc}", file=sys.stderr)
        return 3


def _dispatch(args) -> int:
    if args.command == "separate":
        subject = init_vass_from_json(_load_json(args.file))
        report = cmd_separate(subject, _caps_from(args))
        print(json.dumps(report.to_json(), sort_keys=True, indent=2))
        return 0 if report.verdict in ("separable", "inseparable") else 3

    if args.command == "reach":
        iv = init_vass_from_json(_load_json(args.file))
        out = cmd_reach(iv, _caps_from(args))
        print(json.dumps(out, sort_keys=True, indent=2))
        return 0

    if args.command == "decompose":
        dm = dmgts_from_json(_load_json(args.file))
        res = decompose(dm, _caps_from(args).decide())
        print(json.dumps({
            "perfect": len(res.perfect),
            "decided": [d.certificate for d in res.decided],
            "trace": res.trace,
        }, sort_keys=True, indent=2))
        return 0

    if args.command == "approx":
        from .semilinear import LinearSet, approx_automaton, approx_member

        base = tuple(int(x) for x in args.base.split(","))
        periods = tuple(
            tuple(int(x) for x in p.split(","))
            for p in args.periods.split(";")
            if p.strip()
        )
        lin = LinearSet(base, periods)
        if args.member is not None:
            ok = approx_member(lin, args.k, _parse_word(args.member))
            print(json.dumps({"member": ok}))
        if args.emit:
            print(dump_nfa(approx_automaton(lin, args.k)))
        return 0

    if args.command == "basicsep":
        from .semilinear import basic_member, family_cov, family_drift, family_mod

        v = tuple(int(x) for x in args.v.split(","))
        if args.family == "mod":
            desc = family_mod(args.mu, v, args.n)
        elif args.family == "cov":
            desc = family_cov(args.k, args.i, args.n)
        else:
            desc = family_drift(v, args.k)
        out = {"k": desc.k, "chain": [
            {"base": list(l.base), "periods": [list(p) for p in l.periods]}
            for l in desc.chain
        ]}
        if args.member is not None:
            out["member"] = basic_member(desc, _parse_word(args.member))
        print(json.dumps(out, sort_keys=True))
        return 0

    if args.command == "counterexample":
        from .semilinear import counterexample_member, move_word

        if args.member is not None:
            print(json.dumps({"member": counterexample_member(args.ell, _parse_word(args.member))}))
        elif args.i is not None:
            print(" ".join(move_word(args.i, args.ell)))
        else:
            raise ArgumentError("counterexample needs --i or --member")
        return 0

    if args.command == "trace":
        dm = dmgts_from_json(_load_json(args.file))
        res = decompose(dm, _caps_from(args).decide())
        text = trace_to_jsonl(res.trace)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        if args.dot and res.perfect:
            with open(args.dot, "w") as fh:
                fh.write(nfa_to_dot(strip_hash(modulo_automaton(res.perfect[0]))))
        return 0

    raise ArgumentError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
