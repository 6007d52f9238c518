"""CNF grammars, derivation trees, Horton-Strahler numbers and the CFG(k) test.

Terminals are either :class:`Permutation` objects (grammars over S_m) or plain
strings (abstract letters).  Grammars must already be in Chomsky normal form:
every production is ``A -> B C`` or ``A -> t``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Union

from .errors import InputError
from .perm import Permutation, parse_perm

Terminal = Union[Permutation, str]


@dataclass(frozen=True)
class Cfg:
    start: str
    binary: tuple[tuple[str, str, str], ...]
    terminal: tuple[tuple[str, Terminal], ...]
    nonterminals: tuple[str, ...] = ()
    degree: int | None = None

    def __post_init__(self):
        names = list(self.nonterminals)
        seen = set(names)
        for prod in [(self.start,), *self.binary, *((a,) for a, _ in self.terminal)]:
            for x in prod:
                if x not in seen:
                    seen.add(x)
                    names.append(x)
        object.__setattr__(self, "nonterminals", tuple(names))
        for a, t in self.terminal:
            if isinstance(t, Permutation):
                if self.degree is None:
                    object.__setattr__(self, "degree", t.degree)
                elif t.degree != self.degree:
                    raise InputError(f"terminal {t} has degree {t.degree}, expected {self.degree}")
            elif not isinstance(t, str):
                raise InputError(f"terminal of unsupported type: {t!r}")

    @property
    def terminals(self) -> list[Terminal]:
        out: list[Terminal] = []
        for _, t in self.terminal:
            if t not in out:
                out.append(t)
        return out

    def binary_for(self, a: str) -> list[tuple[str, str]]:
        return [(b, c) for x, b, c in self.binary if x == a]

    def terminal_for(self, a: str) -> list[Terminal]:
        return [t for x, t in self.terminal if x == a]

    def with_start(self, start: str) -> Cfg:
        return Cfg(start, self.binary, self.terminal, self.nonterminals, self.degree)

    def restrict(self, removed: frozenset[str] | set[str], start: str) -> Cfg:
        """Drop the nonterminals in ``removed`` and every production mentioning one."""
        binary = tuple(p for p in self.binary if not removed.intersection(p))
        terminal = tuple(p for p in self.terminal if p[0] not in removed)
        keep = tuple(x for x in self.nonterminals if x not in removed)
        return Cfg(start, binary, terminal, keep, self.degree)

    def size(self) -> int:
        return len(self.binary) + len(self.terminal)


# --- file format ------------------------------------------------------------

_PROD_RE = re.compile(r"^prod\s+(\S+)\s*->\s*(.+)$")


def parse_grammar(text: str) -> Cfg:
    """Parse the line format::

        degree 4            # required when terminals are permutations
        start S
        prod S -> A B
        prod A -> (1 2)(3 4)
        prod B -> 'x'
    """
    degree = None
    start = None
    binary = []
    terminal_src = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("degree"):
            degree = _int_field(line, lineno)
        elif line.startswith("start"):
            parts = line.split()
            if len(parts) != 2:
                raise InputError(f"line {lineno}: expected 'start S'")
            start = parts[1]
        elif line.startswith("prod"):
            m = _PROD_RE.match(line)
            if not m:
                raise InputError(f"line {lineno}: expected 'prod A -> ...'")
            lhs, rhs = m.group(1), m.group(2).strip()
            if rhs.startswith("'") or rhs.startswith('"'):
                if len(rhs) < 3 or rhs[-1] != rhs[0]:
                    raise InputError(f"line {lineno}: bad letter {rhs}")
                terminal_src.append((lhs, rhs[1:-1], lineno))
            elif rhs.startswith("("):
                terminal_src.append((lhs, ("perm", rhs), lineno))
            else:
                parts = rhs.split()
                if len(parts) != 2:
                    raise InputError(f"line {lineno}: not in Chomsky normal form: {rhs!r}")
                binary.append((lhs, parts[0], parts[1]))
        else:
            raise InputError(f"line {lineno}: unknown directive {line!r}")
    if start is None:
        raise InputError("grammar has no 'start' line")
    terminal = []
    for lhs, t, lineno in terminal_src:
        if isinstance(t, tuple):
            if degree is None:
                raise InputError(f"line {lineno}: permutation terminal needs a 'degree' header")
            terminal.append((lhs, parse_perm(t[1], degree)))
        else:
            terminal.append((lhs, t))
    return Cfg(start, tuple(binary), tuple(terminal), degree=degree)


def format_grammar(g: Cfg) -> str:
    lines = []
    if g.degree is not None:
        lines.append(f"degree {g.degree}")
    lines.append(f"start {g.start}")
    for a, b, c in g.binary:
        lines.append(f"prod {a} -> {b} {c}")
    for a, t in g.terminal:
        lines.append(f"prod {a} -> {t}" if isinstance(t, Permutation) else f"prod {a} -> '{t}'")
    return "\n".join(lines) + "\n"


def _int_field(line: str, lineno: int) -> int:
    parts = line.split()
    try:
        return int(parts[1])
    except (IndexError, ValueError):
        raise InputError(f"line {lineno}: expected an integer in {line!r}") from None


# --- derivation trees -------------------------------------------------------

@dataclass(frozen=True)
class DerivationTree:
    """Node labelled with a nonterminal.

    ``children`` is ``(t,)`` for a production ``A -> t`` (t a terminal),
    ``(left, right)`` for ``A -> B C``, or ``()`` for an open leaf of a partial tree.
    """

    label: str
    children: tuple = ()

    def is_open(self) -> bool:
        return not self.children

    def subtrees(self) -> tuple[DerivationTree, ...]:
        return tuple(c for c in self.children if isinstance(c, DerivationTree))

    def node_count(self) -> int:
        """Nonterminal-labelled nodes (terminal leaves are not counted)."""
        return 1 + sum(c.node_count() for c in self.subtrees())

    def leaf_count(self) -> int:
        subs = self.subtrees()
        return 1 if not subs else sum(c.leaf_count() for c in subs)

    def height(self) -> int:
        """Edges on the longest root-to-leaf path, terminal leaves removed."""
        subs = self.subtrees()
        return 0 if not subs else 1 + max(c.height() for c in subs)

    def is_acyclic(self, ancestors: frozenset[str] = frozenset()) -> bool:
        if self.label in ancestors:
            return False
        below = ancestors | {self.label}
        return all(c.is_acyclic(below) for c in self.subtrees())

    def yield_(self) -> list[Terminal]:
        if len(self.children) == 1:
            return [self.children[0]]
        return [t for c in self.subtrees() for t in c.yield_()]

    def matches(self, g: Cfg) -> bool:
        """Every inner node applies a production of ``g``."""
        if not self.children:
            return True
        if len(self.children) == 1:
            return self.children[0] in g.terminal_for(self.label)
        left, right = self.children
        return ((left.label, right.label) in g.binary_for(self.label)
                and left.matches(g) and right.matches(g))


def horton_strahler(tree: DerivationTree) -> int:
    """Horton-Strahler number after stripping terminal leaves.

    A single node has number 0; equal children give 1 + that value, unequal
    children give the maximum.
    """
    subs = tree.subtrees()
    if not subs:
        return 0
    if len(subs) != 2 or len(tree.children) != 2:
        raise InputError(f"node {tree.label!r} is not binary")
    a, b = horton_strahler(subs[0]), horton_strahler(subs[1])
    return a + 1 if a == b else max(a, b)


def combine_hs(a: int, b: int) -> int:
    return a + 1 if a == b else max(a, b)


# --- emptiness --------------------------------------------------------------

def cfg_emptiness(g: Cfg, start: str | None = None) -> tuple[bool, DerivationTree | None]:
    """Return ``(nonempty, witness)``; the witness is an acyclic derivation tree.

    Productive nonterminals are found by the usual fixpoint; each one is
    witnessed by the production that made it productive, whose children became
    productive in strictly earlier rounds, so the witness cannot repeat a label
    along a path.
    """
    start = g.start if start is None else start
    how: dict[str, tuple] = {}
    for a, t in g.terminal:
        how.setdefault(a, (t,))
    changed = True
    while changed:
        changed = False
        fresh = {}
        for a, b, c in g.binary:
            if a not in how and a not in fresh and b in how and c in how:
                fresh[a] = (b, c)
        if fresh:
            how.update(fresh)
            changed = True
    if start not in how:
        return False, None

    def build(a: str) -> DerivationTree:
        h = how[a]
        if len(h) == 1:
            return DerivationTree(a, h)
        return DerivationTree(a, (build(h[0]), build(h[1])))

    return True, build(start)


# --- CFG(k) -----------------------------------------------------------------

def _achievable_table(g: Cfg):
    binary = {a: g.binary_for(a) for a in g.nonterminals}
    has_terminal = {a: bool(g.terminal_for(a)) for a in g.nonterminals}

    @lru_cache(maxsize=None)
    def ach(a: str, forbidden: frozenset[str]) -> frozenset[int]:
        out = {0} if has_terminal[a] else set()
        below = forbidden | {a}
        for b, c in binary[a]:
            if b in below or c in below:
                continue
            left, right = ach(b, below), ach(c, below)
            for s1 in left:
                for s2 in right:
                    out.add(combine_hs(s1, s2))
        return frozenset(out)

    return ach


def acyclic_hs_values(g: Cfg, start: str | None = None) -> frozenset[int]:
    """All Horton-Strahler numbers of complete acyclic derivation trees rooted at start.

    Dynamic program over (nonterminal, forbidden ancestors); 2^|N| * poly time.
    """
    start = g.start if start is None else start
    return _achievable_table(g)(start, frozenset())


def max_acyclic_hs(g: Cfg) -> int | None:
    """Largest HS number of an acyclic derivation tree, or None if there is none."""
    vals = acyclic_hs_values(g)
    return max(vals) if vals else None


def count_acyclic_trees(g: Cfg, start: str | None = None) -> int:
    start = g.start if start is None else start

    @lru_cache(maxsize=None)
    def cnt(a: str, forbidden: frozenset[str]) -> int:
        below = forbidden | {a}
        n = len(g.terminal_for(a))
        for b, c in g.binary_for(a):
            if b not in below and c not in below:
                n += cnt(b, below) * cnt(c, below)
        return n

    return cnt(start, frozenset())


def enumerate_acyclic_trees(g: Cfg, start: str | None = None,
                            forbidden: frozenset[str] = frozenset()) -> Iterator[DerivationTree]:
    """Every complete acyclic derivation tree rooted at ``start`` (none reuse ``forbidden``)."""
    start = g.start if start is None else start
    if start in forbidden:
        return
    for t in g.terminal_for(start):
        yield DerivationTree(start, (t,))
    below = forbidden | {start}
    for b, c in g.binary_for(start):
        if b in below or c in below:
            continue
        rights = list(enumerate_acyclic_trees(g, c, below))
        for left in enumerate_acyclic_trees(g, b, below):
            for right in rights:
                yield DerivationTree(start, (left, right))


def _trees_up_to(g: Cfg, a: str, ancestors: frozenset[str], budget: int,
                 partial: bool) -> Iterator[tuple[DerivationTree, int]]:
    """Acyclic trees rooted at ``a`` with at most ``budget`` nodes, with their sizes.

    With ``partial`` every leaf is an open nonterminal leaf (completion is checked
    separately); otherwise leaves close with a terminal production.
    """
    if budget < 1 or a in ancestors:
        return
    if partial:
        yield DerivationTree(a), 1
    else:
        for t in g.terminal_for(a):
            yield DerivationTree(a, (t,)), 1
    if budget < 3:
        return
    below = ancestors | {a}
    for b, c in g.binary_for(a):
        if b in below or c in below:
            continue
        for left, n1 in _trees_up_to(g, b, below, budget - 2, partial):
            for right, n2 in _trees_up_to(g, c, below, budget - 1 - n1, partial):
                yield DerivationTree(a, (left, right)), 1 + n1 + n2


def _open_leaves(tree: DerivationTree, ancestors: tuple[str, ...] = ()):
    if tree.is_open():
        yield tree.label, ancestors
        return
    for c in tree.subtrees():
        yield from _open_leaves(c, ancestors + (tree.label,))


def check_cfg_k(g: Cfg, k: int, mode: str = "dp") -> bool:
    """Is every acyclic derivation tree (rooted at the start symbol) of HS <= k?

    ``mode="dp"`` uses :func:`max_acyclic_hs`.  ``mode="certificate"`` runs the
    two-case certificate search: a small complete tree with HS > k, or a partial
    tree of size in (2|N|^k, 2|N|^k + 2] whose open leaves all complete inside
    the grammar with their ancestors removed.  It is exponential; tiny grammars only.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if mode == "dp":
        m = max_acyclic_hs(g)
        return m is None or m <= k
    if mode != "certificate":
        raise InputError(f"unknown mode {mode!r}")

    bound = 2 * len(g.nonterminals) ** k
    for tree, _ in _trees_up_to(g, g.start, frozenset(), bound, partial=False):
        if horton_strahler(tree) > k:
            return False

    completable: dict[tuple[str, frozenset[str]], bool] = {}

    def completes(a: str, ancestors: tuple[str, ...]) -> bool:
        removed = frozenset(ancestors)
        key = (a, removed)
        if key not in completable:
            completable[key] = cfg_emptiness(g.restrict(removed, a))[0]
        return completable[key]

    for tree, size in _trees_up_to(g, g.start, frozenset(), bound + 2, partial=True):
        if size > bound and all(completes(a, anc) for a, anc in _open_leaves(tree)):
            return False
    return True


def words_up_to(g: Cfg, max_len: int, cap: int = 200000) -> dict[str, set[tuple]]:
    """Terminal words of length <= max_len derivable from each nonterminal.

    Bounded brute force used as an oracle for emptiness and intersection tests.
    """
    from .errors import CapExceeded

    by_len: dict[str, list[set[tuple]]] = {a: [set() for _ in range(max_len + 1)]
                                            for a in g.nonterminals}
    for a, t in g.terminal:
        if max_len >= 1:
            by_len[a][1].add((t,))
    for n in range(2, max_len + 1):
        # length-n words only combine strictly shorter words, so one pass suffices
        for a, b, c in g.binary:
            for i in range(1, n):
                for u, v in product(by_len[b][i], by_len[c][n - i]):
                    by_len[a][n].add(u + v)
                    if len(by_len[a][n]) > cap:
                        raise CapExceeded("word enumeration cap exceeded")
    return {a: set().union(*levels) for a, levels in by_len.items()}
