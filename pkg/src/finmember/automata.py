"""DFAs over letters, NFAs labelled with permutations, and group-DFA detection.

States are 0-based internally and 1-based in files.

Why the per-letter test decides "the transformation monoid is a group": if every
letter acts bijectively, the monoid sits inside the finite group S_Q and is
closed under products, hence a subgroup.  If some letter is not injective, the
monoid holds a non-invertible map together with the identity (empty word), and
no group contains both.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .perm import Permutation, parse_perm


@dataclass(frozen=True)
class Dfa:
    n_states: int
    alphabet: tuple[str, ...]
    # table[q][i] = delta(q, alphabet[i])
    table: tuple[tuple[int, ...], ...]
    initial: int
    finals: frozenset[int]

    def __post_init__(self):
        if len(self.table) != self.n_states:
            raise InputError("transition table does not cover every state")
        for row in self.table:
            if len(row) != len(self.alphabet):
                raise InputError("DFA transition function is not total")
            if any(not 0 <= q < self.n_states for q in row):
                raise InputError("transition to an undeclared state")
        if not 0 <= self.initial < self.n_states:
            raise InputError("initial state out of range")
        if any(not 0 <= q < self.n_states for q in self.finals):
            raise InputError("final state out of range")

    def step(self, q: int, letter: str) -> int:
        return self.table[q][self.alphabet.index(letter)]

    def run(self, word, q: int | None = None) -> int:
        q = self.initial if q is None else q
        for a in word:
            q = self.step(q, a)
        return q

    def accepts(self, word) -> bool:
        return self.run(word) in self.finals

    def letter_map(self, letter: str) -> tuple[int, ...]:
        i = self.alphabet.index(letter)
        return tuple(row[i] for row in self.table)


@dataclass(frozen=True)
class GroupNfa:
    """NFA whose transition labels are permutations of a common degree."""

    n_states: int
    degree: int
    transitions: tuple[tuple[int, Permutation, int], ...]
    initial: frozenset[int]
    final: frozenset[int]

    def __post_init__(self):
        for p, g, q in self.transitions:
            if g.degree != self.degree:
                raise InputError(f"label {g} has degree {g.degree}, expected {self.degree}")
            if not (0 <= p < self.n_states and 0 <= q < self.n_states):
                raise InputError("transition uses an undeclared state")
        for q in self.initial | self.final:
            if not 0 <= q < self.n_states:
                raise InputError("initial/final state out of range")

    def is_subgroup_form(self) -> bool:
        return len(self.initial) == 1 and self.initial == self.final


def is_group_dfa(d: Dfa) -> bool:
    return all(len(set(d.letter_map(a))) == d.n_states for a in d.alphabet)


def letter_permutation(d: Dfa, letter: str) -> Permutation:
    """The bijection q -> delta(q, letter) on the states 1..|Q|."""
    image = d.letter_map(letter)
    if len(set(image)) != d.n_states:
        raise InputError(f"letter {letter!r} does not permute the states")
    return Permutation(image)


def transformation_monoid(d: Dfa, cap: int = 100000) -> set[tuple[int, ...]]:
    """All maps Q -> Q induced by words (identity included), by closure."""
    ident = tuple(range(d.n_states))
    gens = [d.letter_map(a) for a in d.alphabet]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for f in frontier:
            for g in gens:
                h = tuple(g[x] for x in f)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
        if len(seen) > cap:
            raise InputError("transformation monoid too large")
    return seen


def monoid_is_group(elements: set[tuple[int, ...]]) -> bool:
    """Group axioms checked on a finite set of maps closed under composition."""
    ident = [e for e in elements
             if all(tuple(e[x] for x in f) == f and tuple(f[x] for x in e) == f for f in elements)]
    if not ident:
        return False
    e = ident[0]
    for f in elements:
        if not any(tuple(g[x] for x in f) == e and tuple(f[x] for x in g) == e for g in elements):
            return False
    return True


# --- file formats -----------------------------------------------------------

def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _states(tokens, n, lineno) -> list[int]:
    out = []
    for t in tokens:
        try:
            q = int(t)
        except ValueError:
            raise InputError(f"line {lineno}: bad state {t!r}") from None
        if n is not None and not 1 <= q <= n:
            raise InputError(f"line {lineno}: state {q} outside 1..{n}")
        out.append(q - 1)
    return out


def parse_dfa(text: str) -> Dfa:
    """Line format: ``states n``, ``alphabet a b`` (optional), ``initial i``,
    ``final j k``, ``trans p a q``."""
    n = None
    alphabet: list[str] = []
    initial = None
    finals: list[int] = []
    trans: dict[tuple[int, str], int] = {}
    for lineno, line in _lines(text):
        parts = line.split()
        key = parts[0]
        if key == "states":
            n = int(parts[1])
        elif key == "alphabet":
            alphabet.extend(x for x in parts[1:] if x not in alphabet)
        elif key == "initial":
            (initial,) = _states(parts[1:2], n, lineno)
        elif key == "final":
            finals.extend(_states(parts[1:], n, lineno))
        elif key == "trans":
            if len(parts) != 4:
                raise InputError(f"line {lineno}: expected 'trans p a q'")
            p, q = _states([parts[1], parts[3]], n, lineno)
            a = parts[2]
            if (p, a) in trans and trans[(p, a)] != q:
                raise InputError(f"line {lineno}: nondeterministic transition")
            trans[(p, a)] = q
            if a not in alphabet:
                alphabet.append(a)
        else:
            raise InputError(f"line {lineno}: unknown directive {key!r}")
    if n is None or initial is None:
        raise InputError("DFA needs 'states' and 'initial' lines")
    table = []
    for q in range(n):
        row = []
        for a in alphabet:
            if (q, a) not in trans:
                raise InputError(f"DFA transition function is not total: no move from {q + 1} on {a!r}")
            row.append(trans[(q, a)])
        table.append(tuple(row))
    return Dfa(n, tuple(alphabet), tuple(table), initial, frozenset(finals))


def format_dfa(d: Dfa) -> str:
    lines = [f"states {d.n_states}", "alphabet " + " ".join(d.alphabet),
             f"initial {d.initial + 1}"]
    if d.finals:
        lines.append("final " + " ".join(str(q + 1) for q in sorted(d.finals)))
    for q in range(d.n_states):
        for i, a in enumerate(d.alphabet):
            lines.append(f"trans {q + 1} {a} {d.table[q][i] + 1}")
    return "\n".join(lines) + "\n"


def parse_group_nfa(text: str) -> GroupNfa:
    """Line format: ``degree m``, ``states n``, ``initial i ...``, ``final j ...``,
    ``trans p (1 2) q``."""
    n = degree = None
    initial: list[int] = []
    final: list[int] = []
    trans = []
    for lineno, line in _lines(text):
        key = line.split()[0]
        if key == "degree":
            degree = int(line.split()[1])
        elif key == "states":
            n = int(line.split()[1])
        elif key == "initial":
            initial.extend(_states(line.split()[1:], n, lineno))
        elif key == "final":
            final.extend(_states(line.split()[1:], n, lineno))
        elif key == "trans":
            body = line[len("trans"):].strip()
            lp, rp = body.find("("), body.rfind(")")
            if degree is None:
                raise InputError(f"line {lineno}: 'degree' must precede transitions")
            if lp < 0 or rp < lp:
                raise InputError(f"line {lineno}: expected 'trans p (cycles) q'")
            p, q = _states([body[:lp].strip(), body[rp + 1:].strip()], n, lineno)
            trans.append((p, parse_perm(body[lp:rp + 1], degree), q))
        else:
            raise InputError(f"line {lineno}: unknown directive {key!r}")
    if n is None or degree is None:
        raise InputError("group NFA needs 'degree' and 'states' lines")
    return GroupNfa(n, degree, tuple(trans), frozenset(initial), frozenset(final))


def format_group_nfa(a: GroupNfa) -> str:
    lines = [f"degree {a.degree}", f"states {a.n_states}"]
    if a.initial:
        lines.append("initial " + " ".join(str(q + 1) for q in sorted(a.initial)))
    if a.final:
        lines.append("final " + " ".join(str(q + 1) for q in sorted(a.final)))
    for p, g, q in a.transitions:
        lines.append(f"trans {p + 1} {g} {q + 1}")
    return "\n".join(lines) + "\n"
