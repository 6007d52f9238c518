"""Group DFAs intersected with a context-free language, and the link to cf-membership.

Forward direction: with the state sets of the DFAs laid side by side, each
letter a becomes one permutation pi_a of all states.  A word w is accepted by
every DFA iff pi_w sends each initial state into its DFA's final set, so the
question becomes whether the grammar with a replaced by pi_a produces a
permutation with that property.

Backward direction: a grammar over S_m becomes a grammar over fresh letters
a_i (one per distinct terminal pi_i) and m DFAs on states 1..m sharing the
transition function q -> q^pi_i, where DFA i starts and accepts only at i.
A word is accepted by all of them iff its value is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .automata import Dfa, is_group_dfa, letter_permutation
from .cfmember import oracle_semantics
from .errors import CapExceeded, InputError
from .grammar import Cfg
from .perm import Permutation, direct_sum

BARHILLEL_STATE_CAP = 20000


@dataclass(frozen=True)
class AcceptancePredicate:
    """pi(initial[i]) must lie in finals[i] for every i (0-based global states)."""

    initials: tuple[int, ...]
    finals: tuple[frozenset[int], ...]

    def __call__(self, pi: Permutation) -> bool:
        return all(pi.image[q] in f for q, f in zip(self.initials, self.finals))


def reduce_intersection_to_cfm(dfas: Sequence[Dfa], g: Cfg) -> tuple[Cfg, AcceptancePredicate]:
    """The grammar with letters replaced by pi_a, and the predicate on its values."""
    for i, d in enumerate(dfas):
        if not is_group_dfa(d):
            raise InputError(f"DFA {i + 1} is not a group DFA")
    letters = {t for t in g.terminals}
    for t in letters:
        if not isinstance(t, str):
            raise InputError("grammar terminals must be letters")
        for i, d in enumerate(dfas):
            if t not in d.alphabet:
                raise InputError(f"letter {t!r} missing from the alphabet of DFA {i + 1}")
    offsets = []
    total = 0
    for d in dfas:
        offsets.append(total)
        total += d.n_states

    def pi(a: str) -> Permutation:
        return direct_sum(*(letter_permutation(d, a) for d in dfas)) if dfas else Permutation(())

    table = {a: pi(a) for a in sorted(letters)}
    terminal = tuple((x, table[t]) for x, t in g.terminal)
    grammar = Cfg(g.start, g.binary, terminal, g.nonterminals, total)
    pred = AcceptancePredicate(tuple(o + d.initial for o, d in zip(offsets, dfas)),
                               tuple(frozenset(o + f for f in d.finals) for o, d in zip(offsets, dfas)))
    return grammar, pred


def decide_intersection(dfas: Sequence[Dfa], g: Cfg, max_degree: int = 64) -> tuple[bool, Permutation | None]:
    """Enumerate the evaluated language of the reduced grammar and test the predicate."""
    grammar, pred = reduce_intersection_to_cfm(dfas, g)
    if not grammar.terminal:
        return False, None
    lang = oracle_semantics(grammar, max_degree=max(max_degree, grammar.degree))[g.start]
    for pi in sorted(lang, key=lambda p: p.image):
        if pred(pi):
            return True, pi
    return False, None


def reduce_cfm_to_intersection(g: Cfg) -> tuple[Cfg, list[Dfa]]:
    """Letters a1, a2, ... for the distinct terminals and DFAs A_1..A_m."""
    if g.degree is None or any(not isinstance(t, Permutation) for t in g.terminals):
        raise InputError("grammar terminals must be permutations")
    perms = sorted(set(g.terminals), key=lambda p: p.image)
    name = {p: f"a{i + 1}" for i, p in enumerate(perms)}
    letters = tuple(name[p] for p in perms)
    grammar = Cfg(g.start, g.binary, tuple((x, name[t]) for x, t in g.terminal), g.nonterminals)
    m = g.degree
    table = tuple(tuple(p.image[q] for p in perms) for q in range(m))
    dfas = [Dfa(m, letters, table, i, frozenset({i})) for i in range(m)]
    return grammar, dfas


def _product_states(dfas: Sequence[Dfa], letters: Sequence[str], cap: int):
    """Reachable product states and the transition map, letters absent from a DFA lead nowhere."""
    start = tuple(d.initial for d in dfas)
    index = {start: 0}
    states = [start]
    trans: dict[str, list[int]] = {a: [] for a in letters}
    usable = [a for a in letters if all(a in d.alphabet for d in dfas)]
    for a in letters:
        if a not in usable:
            trans[a] = None
    i = 0
    while i < len(states):
        s = states[i]
        for a in usable:
            t = tuple(d.step(q, a) for d, q in zip(dfas, s))
            if t not in index:
                index[t] = len(states)
                states.append(t)
                if len(states) > cap:
                    raise CapExceeded(f"product automaton exceeds {cap} states")
            trans[a].append(index[t])
        i += 1
    finals = [k for k, s in enumerate(states) if all(q in d.finals for d, q in zip(dfas, s))]
    return states, trans, finals


def barhillel_relations(dfas: Sequence[Dfa], g: Cfg, cap: int = BARHILLEL_STATE_CAP):
    """R[A][p, q] is True iff A derives a word leading the product automaton from p to q.

    These are exactly the productive triples (p, A, q) of the Bar-Hillel grammar.
    """
    letters = sorted({t for t in g.terminals})
    states, trans, finals = _product_states(dfas, letters, cap)
    n = len(states)
    rel = {a: np.zeros((n, n), dtype=bool) for a in g.nonterminals}
    for x, t in g.terminal:
        if trans[t] is not None:
            rel[x][np.arange(n), trans[t]] = True
    changed = True
    while changed:
        changed = False
        for a, b, c in g.binary:
            new = rel[a] | ((rel[b].astype(np.int64) @ rel[c].astype(np.int64)) > 0)
            if (new != rel[a]).any():
                rel[a] = new
                changed = True
    return rel, finals


def barhillel_oracle(dfas: Sequence[Dfa], g: Cfg, cap: int = BARHILLEL_STATE_CAP) -> bool:
    """Is L(g) ∩ L(A_1) ∩ ... ∩ L(A_n) non-empty?"""
    if any(not isinstance(t, str) for t in g.terminals):
        raise InputError("grammar terminals must be letters")
    rel, finals = barhillel_relations(dfas, g, cap)
    return bool(rel[g.start][0, finals].any())


def barhillel_grammar(dfas: Sequence[Dfa], g: Cfg, cap: int = BARHILLEL_STATE_CAP) -> tuple[Cfg, list[str]]:
    """The explicit triple grammar with nonterminals "p|A|q"; returns it and its start symbols."""
    letters = sorted({t for t in g.terminals})
    states, trans, finals = _product_states(dfas, letters, cap)
    n = len(states)

    def nt(p: int, a: str, q: int) -> str:
        return f"{p}|{a}|{q}"

    terminal = []
    for x, t in g.terminal:
        if trans[t] is not None:
            for p in range(n):
                terminal.append((nt(p, x, trans[t][p]), t))
    binary = []
    for a, b, c in g.binary:
        for p in range(n):
            for r in range(n):
                for q in range(n):
                    binary.append((nt(p, a, q), nt(p, b, r), nt(r, c, q)))
    starts = [nt(0, g.start, f) for f in finals]
    start = starts[0] if starts else nt(0, g.start, 0)
    return Cfg(start, tuple(binary), tuple(terminal)), starts
