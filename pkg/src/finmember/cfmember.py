"""Context-free membership for permutation groups: the Delta/Gamma fixed point.

For each nonterminal A we look for the subgroup G_A of G x Ĝ generated by the
"sandwiches" (u, v) of all derivations A =>* u A v.  Delta turns a tuple of
subgroups into languages (acyclic trees whose nodes may be wrapped in a
sandwich), Gamma turns languages back into subgroups (a loop automaton on the
nonterminals, read off with the spanning-tree technique).  Iterating from the
trivial tuple reaches G_A, and then Delta gives the exact languages.

Ĝ has the reversed product.  Pairs are embedded into S_2m as g ⊔ h^-1, which
turns the reversed second factor into an ordinary one, so a stabilizer chain
on 2m points represents each subgroup.

Internally group elements are indices into an explicit multiplication table of
the group generated by the terminals; Delta's sets are boolean masks over it.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .automata import GroupNfa
from .bsgs import Bsgs, closure, schreier_sims
from .errors import CapExceeded, InputError, InvariantBreach
from .grammar import Cfg, DerivationTree
from .perm import Permutation, compose, direct_sum, inverse
from .rational import spanning_tree_generators, trim_and_symmetrize

DEFAULT_MAX_DEGREE = 5
DEFAULT_MAX_ELEMENTS = 5040

SubgroupTuple = dict[str, Bsgs]
LanguageTuple = dict[str, frozenset[Permutation]]


@dataclass(frozen=True)
class GroupPair:
    """Element (g, h) of G x Ĝ; ``(g1,h1)(g2,h2) = (g1 g2, h2 h1)``."""

    g: Permutation
    h: Permutation

    def __post_init__(self):
        if self.g.degree != self.h.degree:
            raise InputError("pair components must have the same degree")

    @classmethod
    def identity(cls, degree: int) -> GroupPair:
        e = Permutation.identity(degree)
        return cls(e, e)

    def __mul__(self, other: GroupPair) -> GroupPair:
        return GroupPair(compose(self.g, other.g), compose(other.h, self.h))

    def inverse(self) -> GroupPair:
        return GroupPair(inverse(self.g), inverse(self.h))

    def sandwich(self, x: Permutation) -> Permutation:
        """g x h."""
        return compose(compose(self.g, x), self.h)

    def embed(self) -> Permutation:
        return direct_sum(self.g, inverse(self.h))

    @classmethod
    def unembed(cls, p: Permutation) -> GroupPair:
        if p.degree % 2:
            raise InputError("embedded pairs have even degree")
        m = p.degree // 2
        if any(x >= m for x in p.image[:m]):
            raise InputError(f"{p} does not preserve the two blocks")
        g = Permutation(p.image[:m])
        h_inv = Permutation(tuple(x - m for x in p.image[m:]))
        return cls(g, inverse(h_inv))


@dataclass(frozen=True)
class LoopWitness:
    """A cycle A = A_1 -> ... -> A_{n+1} = A in the production graph.

    ``productions[i] = (A_i, A_{i,0}, A_{i,1})`` and ``directions[i]`` says which
    child the path continues into.
    """

    productions: tuple[tuple[str, str, str], ...]
    directions: tuple[int, ...]

    def __post_init__(self):
        if len(self.productions) != len(self.directions) or not self.productions:
            raise InputError("a loop needs matching, non-empty production/direction lists")
        for i, ((a, *kids), d) in enumerate(zip(self.productions, self.directions)):
            if d not in (0, 1):
                raise InputError("directions are 0 or 1")
            nxt = self.productions[(i + 1) % len(self.productions)][0]
            if kids[d] != nxt:
                raise InputError("productions do not chain into a loop")

    @property
    def root(self) -> str:
        return self.productions[0][0]

    def product(self, siblings: Sequence[Permutation], degree: int) -> GroupPair:
        """M(p,d) with ``siblings[i]`` the value chosen for the sibling at step i.

        Going left (d=0) the sibling value multiplies the right side; going right
        it multiplies the left side.
        """
        acc = GroupPair.identity(degree)
        e = Permutation.identity(degree)
        for d, x in zip(self.directions, siblings):
            acc = acc * (GroupPair(e, x) if d == 0 else GroupPair(x, e))
        return acc


# --- explicit group tables --------------------------------------------------

class GroupTable:
    """All elements of a permutation group with an index-based product table."""

    def __init__(self, generators: Sequence[Permutation], degree: int,
                 max_elements: int = DEFAULT_MAX_ELEMENTS):
        elems = sorted(closure(list(generators), degree, cap=max_elements),
                       key=lambda p: p.image)
        self.degree = degree
        self.elements: list[Permutation] = elems
        self.index: dict[Permutation, int] = {p: i for i, p in enumerate(elems)}
        n = len(elems)
        img = np.array([p.image for p in elems], dtype=np.int64).reshape(n, degree)
        weights = degree ** np.arange(degree, dtype=np.int64)
        keys = img @ weights
        order = np.argsort(keys)
        sorted_keys = keys[order]
        mul = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            # row i: (e_i e_j)(x) = e_j(e_i(x))
            prod = img[:, img[i]]
            mul[i] = order[np.searchsorted(sorted_keys, prod @ weights)]
        self.mul = mul
        self.identity = self.index[Permutation.identity(degree)]
        self.inv = np.empty(n, dtype=np.int32)
        rows, cols = np.nonzero(mul == self.identity)
        self.inv[rows] = cols

    def __len__(self) -> int:
        return len(self.elements)

    def mask(self, perms) -> np.ndarray:
        out = np.zeros(len(self), dtype=bool)
        for p in perms:
            out[self.index[p]] = True
        return out

    def members(self, mask: np.ndarray) -> frozenset[Permutation]:
        return frozenset(self.elements[i] for i in np.flatnonzero(mask))

    def sandwich_map(self, a: int, b: int) -> np.ndarray:
        """x -> a x b as an index array."""
        return self.mul[self.mul[a], b]

    def product_set(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros(len(self), dtype=bool)
        ix, iy = np.flatnonzero(x), np.flatnonzero(y)
        if ix.size and iy.size:
            out[self.mul[np.ix_(ix, iy)].ravel()] = True
        return out


def _orbit(mask: np.ndarray, maps: Sequence[np.ndarray]) -> np.ndarray:
    """Closure of a set of elements under the given index maps."""
    cur = mask.copy()
    size = int(cur.sum())
    while maps and size:
        for f in maps:
            cur[f[cur]] = True
        new = int(cur.sum())
        if new == size:
            break
        size = new
    return cur


def _check_degree(g: Cfg, max_degree: int) -> int:
    if g.degree is None:
        raise InputError("grammar has no permutation terminals (degree unknown)")
    if any(not isinstance(t, Permutation) for t in g.terminals):
        raise InputError("grammar mixes letters and permutations")
    if g.degree > max_degree:
        raise CapExceeded(f"degree {g.degree} exceeds the cap {max_degree} "
                          "(raise --max-degree to override)")
    return g.degree


def _pair_generators(s: Mapping[str, Bsgs], a: str) -> list[GroupPair]:
    h = s.get(a)
    if h is None:
        return []
    return [GroupPair.unembed(p) for p in h.strong_generators if not p.is_identity()]


def trivial_tuple(g: Cfg) -> SubgroupTuple:
    m = g.degree
    return {a: schreier_sims([], 2 * m, certificates=False) for a in g.nonterminals}


def _table_for(g: Cfg, s: Mapping[str, Bsgs], max_elements: int) -> GroupTable:
    gens = list(g.terminals)
    for a in g.nonterminals:
        for pair in _pair_generators(s, a):
            gens.extend([pair.g, pair.h])
    return GroupTable(gens, g.degree, max_elements)


class _Delta:
    """Memoized Delta over (nonterminal, forbidden ancestors) on one table."""

    def __init__(self, g: Cfg, s: Mapping[str, Bsgs], table: GroupTable):
        self.g = g
        self.table = table
        self.pairs = {a: [(table.index[p.g], table.index[p.h]) for p in _pair_generators(s, a)]
                      for a in g.nonterminals}
        self.maps = {a: [table.sandwich_map(x, y) for x, y in self.pairs[a]]
                     for a in g.nonterminals}
        self.memo: dict[tuple[str, frozenset[str]], np.ndarray] = {}

    def lang(self, a: str, forbidden: frozenset[str] = frozenset()) -> np.ndarray:
        key = (a, forbidden)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        t = self.table
        base = t.mask(self.g.terminal_for(a))
        below = forbidden | {a}
        for b, c in self.g.binary_for(a):
            if b in below or c in below:
                continue
            lb = self.lang(b, below)
            if lb.any():
                lc = self.lang(c, below)
                base |= t.product_set(lb, lc)
        out = _orbit(base, self.maps[a])
        self.memo[key] = out
        return out

    def certificate(self, a: str, target: int, forbidden: frozenset[str] = frozenset()):
        """Decorated acyclic tree evaluating to ``target``; decorations keyed by path."""
        t = self.table
        # z = k1 target k2 with (k1, k2) a product of generators of H_a
        seen = {target: (t.identity, t.identity)}
        queue = deque([target])
        terminals = {t.index[p]: p for p in self.g.terminal_for(a)}
        below = forbidden | {a}
        kids = [(b, c) for b, c in self.g.binary_for(a) if b not in below and c not in below]
        while queue:
            z = queue.popleft()
            k1, k2 = seen[z]
            deco = (int(t.inv[k1]), int(t.inv[k2]))
            if z in terminals:
                return DerivationTree(a, (terminals[z],)), {(): deco}
            for b, c in kids:
                lb, lc = self.lang(b, below), self.lang(c, below)
                for x in np.flatnonzero(lb):
                    y = int(t.mul[t.inv[x], z])
                    if lc[y]:
                        left, dl = self.certificate(b, int(x), below)
                        right, dr = self.certificate(c, y, below)
                        decos = {(): deco}
                        decos.update({(0,) + p: v for p, v in dl.items()})
                        decos.update({(1,) + p: v for p, v in dr.items()})
                        return DerivationTree(a, (left, right)), decos
            for x, y in self.pairs[a]:
                nz = int(t.mul[t.mul[x, z], y])
                if nz not in seen:
                    seen[nz] = (int(t.mul[x, k1]), int(t.mul[k2, y]))
                    queue.append(nz)
        raise InvariantBreach("certificate search failed for a member of Delta")


def delta(g: Cfg, s: Mapping[str, Bsgs], max_degree: int = DEFAULT_MAX_DEGREE,
          max_elements: int = DEFAULT_MAX_ELEMENTS) -> LanguageTuple:
    """Union of L(T) over acyclic derivation trees T rooted at each nonterminal.

    A node labelled B with value x contributes every h1 x h2, (h1,h2) in s(B).
    That set is the orbit of x under the generators of s(B) acting by
    x -> h1 x h2, so only the strong generators are ever used.
    """
    _check_degree(g, max_degree)
    table = _table_for(g, s, max_elements)
    d = _Delta(g, s, table)
    return {a: table.members(d.lang(a)) for a in g.nonterminals}


def loop_automaton(g: Cfg, t: Mapping[str, frozenset[Permutation]], root: str) -> GroupNfa:
    """The automaton over G x Ĝ (embedded in S_2m) whose loops at ``root`` are sandwiches."""
    m = g.degree
    names = list(g.nonterminals)
    pos = {a: i for i, a in enumerate(names)}
    e = Permutation.identity(m)
    trans = []
    for b, c, d in g.binary:
        for h in sorted(t.get(d, ()), key=lambda p: p.image):
            trans.append((pos[b], GroupPair(e, h).embed(), pos[c]))
        for x in sorted(t.get(c, ()), key=lambda p: p.image):
            trans.append((pos[b], GroupPair(x, e).embed(), pos[d]))
    q0 = frozenset({pos[root]})
    return GroupNfa(len(names), 2 * m, tuple(trans), q0, q0)


def gamma(g: Cfg, t: Mapping[str, frozenset[Permutation]]) -> SubgroupTuple:
    """Subgroup generated by the loop automaton at each nonterminal."""
    if g.degree is None:
        raise InputError("grammar has no permutation terminals (degree unknown)")
    out = {}
    for a in g.nonterminals:
        gens = spanning_tree_generators(trim_and_symmetrize(loop_automaton(g, t, a)))
        out[a] = _subgroup(gens, 2 * g.degree)
    return out


def _subgroup(gens: Sequence[Permutation], degree: int) -> Bsgs:
    # Many spanning-tree generators are redundant; grow the chain only on new ones.
    kept: list[Permutation] = []
    group = schreier_sims([], degree, certificates=False)
    for x in gens:
        if not group.contains(x):
            kept.append(x)
            group = schreier_sims(kept, degree, certificates=False)
    return group


def tuple_leq(s: Mapping[str, Bsgs], t: Mapping[str, Bsgs]) -> bool:
    return all(s[a].is_subgroup_of(t[a]) for a in s)


def tuple_equal(s: Mapping[str, Bsgs], t: Mapping[str, Bsgs]) -> bool:
    return all(s[a].order() == t[a].order() and s[a].is_subgroup_of(t[a])
               and t[a].is_subgroup_of(s[a]) for a in s)


@dataclass
class FixedPoint:
    subgroups: SubgroupTuple
    iterations: int
    history: list[dict[str, int]]  # subgroup orders after each step, starting from s_0
    bound: int


def iteration_bound(g: Cfg) -> int:
    """2 |N| floor(log2 m!)."""
    return 2 * len(g.nonterminals) * int(math.log2(math.factorial(g.degree)))


def fixed_point(g: Cfg, max_degree: int = DEFAULT_MAX_DEGREE,
                max_elements: int = DEFAULT_MAX_ELEMENTS) -> FixedPoint:
    _check_degree(g, max_degree)
    s = trivial_tuple(g)
    history = [{a: s[a].order() for a in g.nonterminals}]
    bound = iteration_bound(g)
    steps = 0
    while True:
        nxt = gamma(g, delta(g, s, max_degree, max_elements))
        if not tuple_leq(s, nxt):
            raise InvariantBreach("iterates are not monotone")
        if tuple_equal(s, nxt):
            return FixedPoint(s, steps, history, bound)
        steps += 1
        if steps > bound:
            raise InvariantBreach(f"no fixed point after {bound} strict growth steps")
        s = nxt
        history.append({a: s[a].order() for a in g.nonterminals})


@dataclass
class Membership:
    member: bool
    fixed: FixedPoint
    tree: DerivationTree | None = None
    decorations: dict[tuple[int, ...], GroupPair] | None = None


def cf_membership(g: Cfg, target: Permutation, max_degree: int = DEFAULT_MAX_DEGREE,
                  max_elements: int = DEFAULT_MAX_ELEMENTS,
                  fixed: FixedPoint | None = None) -> Membership:
    """Is ``target`` the value of some word of L(g)?  Yes-answers carry a decorated tree."""
    _check_degree(g, max_degree)
    if target.degree != g.degree:
        raise InputError("target degree does not match the grammar")
    fixed = fixed_point(g, max_degree, max_elements) if fixed is None else fixed
    table = _table_for(g, fixed.subgroups, max_elements)
    d = _Delta(g, fixed.subgroups, table)
    idx = table.index.get(target)
    if idx is None or not d.lang(g.start)[idx]:
        return Membership(False, fixed)
    tree, decos = d.certificate(g.start, idx)
    pairs = {p: GroupPair(table.elements[x], table.elements[y]) for p, (x, y) in decos.items()}
    return Membership(True, fixed, tree, pairs)


def evaluate_decorated_tree(tree: DerivationTree, decorations: Mapping[tuple[int, ...], GroupPair],
                            s: Mapping[str, Bsgs], path: tuple[int, ...] = ()) -> Permutation:
    """g_v = h1 g h2 at a terminal node, h1 g_v1 g_v2 h2 at a binary one.

    Each decoration must lie in the subgroup of its node's label; missing
    decorations mean (1, 1).
    """
    if tree.is_open():
        raise InputError("cannot evaluate an open leaf")
    if len(tree.children) == 1:
        inner = tree.children[0]
        if not isinstance(inner, Permutation):
            raise InputError("terminal leaf is not a permutation")
    else:
        left, right = tree.children
        inner = compose(evaluate_decorated_tree(left, decorations, s, path + (0,)),
                        evaluate_decorated_tree(right, decorations, s, path + (1,)))
    pair = decorations.get(path)
    if pair is None:
        return inner
    group = s.get(tree.label)
    if group is None or not group.contains(pair.embed()):
        raise InputError(f"decoration at {path} is not in the subgroup of {tree.label!r}")
    return pair.sandwich(inner)


def oracle_semantics(g: Cfg, max_degree: int = DEFAULT_MAX_DEGREE) -> LanguageTuple:
    """Least fixpoint of L(A) ⊇ {g : A -> g} ∪ L(B) L(C), computed semi-naively."""
    _check_degree(g, max_degree)
    lang: dict[str, set[Permutation]] = {a: set() for a in g.nonterminals}
    fresh: dict[str, set[Permutation]] = {a: set() for a in g.nonterminals}
    for a, t in g.terminal:
        lang[a].add(t)
        fresh[a].add(t)
    while any(fresh.values()):
        new: dict[str, set[Permutation]] = {a: set() for a in g.nonterminals}
        for a, b, c in g.binary:
            pairs = set()
            for x in fresh[b]:
                for y in lang[c]:
                    pairs.add((x, y))
            for x in lang[b]:
                for y in fresh[c]:
                    pairs.add((x, y))
            for x, y in pairs:
                z = compose(x, y)
                if z not in lang[a]:
                    new[a].add(z)
        for a in g.nonterminals:
            lang[a] |= new[a]
        fresh = new
    return {a: frozenset(v) for a, v in lang.items()}
