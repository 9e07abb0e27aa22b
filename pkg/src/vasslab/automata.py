"""Finite automata over plain and #-annotated Dyck alphabets.

Transition labels: None is ε; a plain letter is a str; an annotated letter is
a (letter, hash) pair. Words are tuples of labels without ε.
"""

from __future__ import annotations

import json

from .errors import ArgumentError, StructuralError


def strip_letter(a):
    return a[0] if isinstance(a, tuple) else a


def annotate_word(word, hashes=None):
    """Plain word -> annotated word; `hashes` marks bridge positions."""
    hashes = hashes or set()
    return tuple((a, i in hashes) for i, a in enumerate(word))


class Nfa:
    """Immutable NFA; states are arbitrary hashable ids (tuples self-describe
    product states in DOT output)."""

    def __init__(self, states, transitions, initial, final, alphabet=None):
        self.states = frozenset(states)
        self.transitions = frozenset(transitions)
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        if not self.initial <= self.states or not self.final <= self.states:
            raise StructuralError("extremal states not declared")
        letters = set()
        for p, a, q in self.transitions:
            if p not in self.states or q not in self.states:
                raise StructuralError(f"transition endpoint not declared: {(p, a, q)}")
            if a is not None:
                letters.add(a)
        self.alphabet = frozenset(alphabet) if alphabet is not None else frozenset(letters)
        if not letters <= self.alphabet:
            raise StructuralError("transition labels outside the declared alphabet")
        self._step = {}
        self._eps = {}
        for p, a, q in self.transitions:
            if a is None:
                self._eps.setdefault(p, set()).add(q)
            else:
                self._step.setdefault((p, a), set()).add(q)

    def eps_closure(self, states):
        out = set(states)
        stack = list(states)
        while stack:
            p = stack.pop()
            for q in self._eps.get(p, ()):
                if q not in out:
                    out.add(q)
                    stack.append(q)
        return frozenset(out)

    def step(self, states, letter):
        nxt = set()
        for p in states:
            nxt |= self._step.get((p, letter), set())
        return self.eps_closure(nxt)

    def is_deterministic(self) -> bool:
        if self._eps:
            return False
        return all(len(v) == 1 for v in self._step.values()) and len(self.initial) <= 1

    def is_total(self) -> bool:
        return all((p, a) in self._step for p in self.states for a in self.alphabet)


def run_word(nfa: Nfa, word) -> bool:
    cur = nfa.eps_closure(nfa.initial)
    for a in word:
        cur = nfa.step(cur, a)
        if not cur:
            return False
    return bool(cur & nfa.final)


def is_empty(nfa: Nfa) -> bool:
    cur = nfa.eps_closure(nfa.initial)
    seen = set(cur)
    stack = list(cur)
    while stack:
        p = stack.pop()
        if p in nfa.final:
            return False
        for a in nfa.alphabet:
            for q in nfa.step({p}, a):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    return True


def enumerate_words(nfa: Nfa, max_len: int) -> set:
    """All accepted words of length <= max_len (ε-closure handled)."""
    out = set()
    start = nfa.eps_closure(nfa.initial)
    letters = sorted(nfa.alphabet, key=repr)
    # memo: subset-state -> accepted suffix sets per remaining budget
    memo = {}

    def suffixes(states, budget):
        key = (states, budget)
        if key in memo:
            return memo[key]
        acc = {()} if states & nfa.final else set()
        if budget > 0:
            for a in letters:
                nxt = nfa.step(states, a)
                if nxt:
                    acc |= {(a,) + s for s in suffixes(nxt, budget - 1)}
        memo[key] = acc
        return acc

    out = set(suffixes(start, max_len))
    return out


def universal_nfa(alphabet) -> Nfa:
    return Nfa({"u"}, {("u", a, "u") for a in alphabet}, {"u"}, {"u"}, alphabet)


def empty_nfa(alphabet) -> Nfa:
    return Nfa({"e"}, set(), {"e"}, set(), alphabet)


def product(n1: Nfa, n2: Nfa) -> Nfa:
    """L(product) = L(n1) ∩ L(n2); ε moves interleave freely."""
    if n1.alphabet != n2.alphabet:
        raise StructuralError("product needs a shared alphabet")
    alphabet = n1.alphabet
    initial = {(p, q) for p in n1.initial for q in n2.initial}
    states = set(initial)
    transitions = set()
    stack = list(initial)
    while stack:
        p, q = stack.pop()
        moves = []
        for a in alphabet:
            for p2 in n1._step.get((p, a), ()):
                for q2 in n2._step.get((q, a), ()):
                    moves.append((a, (p2, q2)))
        for p2 in n1._eps.get(p, ()):
            moves.append((None, (p2, q)))
        for q2 in n2._eps.get(q, ()):
            moves.append((None, (p, q2)))
        for a, s2 in moves:
            transitions.add(((p, q), a, s2))
            if s2 not in states:
                states.add(s2)
                stack.append(s2)
    final = {(p, q) for (p, q) in states if p in n1.final and q in n2.final}
    return Nfa(states, transitions, initial, final, alphabet)


def union(nfas, alphabet=None) -> Nfa:
    """Disjoint union; L = ∪ L_i."""
    nfas = list(nfas)
    if alphabet is None:
        alphabet = frozenset().union(*(n.alphabet for n in nfas)) if nfas else frozenset()
    states, transitions, initial, final = set(), set(), set(), set()
    for i, n in enumerate(nfas):
        tag = lambda s, i=i: (i, s)
        states |= {tag(s) for s in n.states}
        transitions |= {(tag(p), a, tag(q)) for p, a, q in n.transitions}
        initial |= {tag(s) for s in n.initial}
        final |= {tag(s) for s in n.final}
    return Nfa(states, transitions, initial, final, alphabet)


def strip_hash(nfa: Nfa) -> Nfa:
    """Drop hash flags from an annotated alphabet; idempotent on plain ones."""
    transitions = {
        (p, None if a is None else strip_letter(a), q) for p, a, q in nfa.transitions
    }
    alphabet = {strip_letter(a) for a in nfa.alphabet}
    return Nfa(nfa.states, transitions, nfa.initial, nfa.final, alphabet)


def dfa_profile(dfa: Nfa, word) -> frozenset:
    """The state-change relation {(p, δ*(p, w))} of a total DFA."""
    if not dfa.is_deterministic() or not dfa.is_total():
        raise ArgumentError("dfa_profile needs a total deterministic automaton")
    pairs = set()
    for p in dfa.states:
        cur = p
        for a in word:
            if a not in dfa.alphabet:
                raise ArgumentError(f"letter {a!r} outside the DFA alphabet")
            (cur,) = dfa._step[(cur, a)]
        pairs.add((p, cur))
    return frozenset(pairs)


def profiles_equal(p, q) -> bool:
    return p == q


def nfa_to_json(nfa: Nfa) -> dict:
    def key(s):
        return s if isinstance(s, str) else repr(s)

    trans = []
    for p, a, q in sorted(nfa.transitions, key=repr):
        if a is None:
            letter, flag = "", False
        elif isinstance(a, tuple):
            letter, flag = a
        else:
            letter, flag = a, False
        trans.append({"from": key(p), "label": letter, "hash": flag, "to": key(q)})
    return {
        "states": sorted(key(s) for s in nfa.states),
        "initial": sorted(key(s) for s in nfa.initial),
        "final": sorted(key(s) for s in nfa.final),
        "transitions": trans,
    }


def nfa_from_json(doc: dict) -> Nfa:
    transitions = set()
    annotated = any(t["hash"] for t in doc["transitions"])
    for t in doc["transitions"]:
        if t["label"] == "":
            a = None
        elif annotated:
            a = (t["label"], bool(t["hash"]))
        else:
            a = t["label"]
        transitions.add((t["from"], a, t["to"]))
    return Nfa(doc["states"], transitions, doc["initial"], doc["final"])


def dump_nfa(nfa: Nfa) -> str:
    return json.dumps(nfa_to_json(nfa), sort_keys=True, indent=2)


def nfa_to_dot(nfa: Nfa, name="nfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    ids = {s: f"s{i}" for i, s in enumerate(sorted(nfa.states, key=repr))}
    for s, sid in ids.items():
        shape = "doublecircle" if s in nfa.final else "circle"
        lines.append(f'  {sid} [label="{s}", shape={shape}];')
    for s in sorted(nfa.initial, key=repr):
        lines.append(f'  init_{ids[s]} [shape=point]; init_{ids[s]} -> {ids[s]};')
    for p, a, q in sorted(nfa.transitions, key=repr):
        label = "ε" if a is None else (f"{a[0]}#" if isinstance(a, tuple) and a[1] else strip_letter(a))
        lines.append(f'  {ids[p]} -> {ids[q]} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
