"""Deterministic Schreier-Sims, membership, generator reduction and SLPs.

Every transversal element and strong generator remembers how it was built from
the input generators, as a node of a shared straight-line program.  That is what
lets :func:`factor_as_slp` hand out membership certificates that a black-box
verifier can replay using only products of the *input* generators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import InputError
from .perm import Permutation, compose, inverse, order

# A definition is either a generator index or a pair (j, k) of earlier definitions.
SlpDef = Union[int, tuple[int, int]]


@dataclass(frozen=True)
class Slp:
    """Straight-line program: ``definitions[i]`` is a generator index or ``(j, k)``
    meaning x_i := x_j x_k with j, k < i.  The program produces its last variable;
    the empty program produces the identity."""

    definitions: tuple[SlpDef, ...]
    claimed_result: Permutation

    def __len__(self) -> int:
        return len(self.definitions)

    def check_acyclic(self) -> None:
        for i, d in enumerate(self.definitions):
            if isinstance(d, tuple):
                j, k = d
                if not (0 <= j < i and 0 <= k < i):
                    raise InputError(f"malformed back-reference {d} at definition {i}")
            elif not isinstance(d, int) or d < 0:
                raise InputError(f"malformed definition {d!r} at {i}")


def eval_slp(program: Slp, generators: Sequence[Permutation]) -> Permutation:
    program.check_acyclic()
    values: list[Permutation] = []
    for d in program.definitions:
        if isinstance(d, tuple):
            values.append(compose(values[d[0]], values[d[1]]))
        else:
            if d >= len(generators):
                raise InputError(f"generator index {d} out of range")
            values.append(generators[d])
    if not values:
        return Permutation.identity(program.claimed_result.degree)
    return values[-1]


class _SlpBuilder:
    """Grows one shared SLP; nodes with equal values are merged.

    ``None`` stands for the identity (empty product), which an SLP over a
    generating set cannot name directly.
    """

    def __init__(self, generators: Sequence[Permutation]):
        self.generators = list(generators)
        self.defs: list[SlpDef] = []
        self.values: list[Permutation] = []
        self._by_value: dict[Permutation, int] = {}

    def copy(self) -> _SlpBuilder:
        other = _SlpBuilder(self.generators)
        other.defs = list(self.defs)
        other.values = list(self.values)
        other._by_value = dict(self._by_value)
        return other

    def _add(self, d: SlpDef, value: Permutation) -> int | None:
        if value.is_identity():
            return None
        hit = self._by_value.get(value)
        if hit is not None:
            return hit
        self.defs.append(d)
        self.values.append(value)
        self._by_value[value] = len(self.defs) - 1
        return len(self.defs) - 1

    def gen(self, index: int) -> int | None:
        return self._add(index, self.generators[index])

    def mul(self, x: int | None, y: int | None) -> int | None:
        if x is None:
            return y
        if y is None:
            return x
        return self._add((x, y), compose(self.values[x], self.values[y]))

    def power(self, x: int | None, e: int) -> int | None:
        if x is None or e == 0:
            return None
        result, base = None, x
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def inv(self, x: int | None) -> int | None:
        if x is None:
            return None
        return self.power(x, order(self.values[x]) - 1)

    def extract(self, node: int | None, degree: int) -> Slp:
        """The sub-program needed for ``node``, renumbered."""
        if node is None:
            return Slp((), Permutation.identity(degree))
        needed = set()
        stack = [node]
        while stack:
            i = stack.pop()
            if i in needed:
                continue
            needed.add(i)
            d = self.defs[i]
            if isinstance(d, tuple):
                stack.extend(d)
        order_ = sorted(needed)
        renum = {old: new for new, old in enumerate(order_)}
        defs: list[SlpDef] = []
        for old in order_:
            d = self.defs[old]
            defs.append((renum[d[0]], renum[d[1]]) if isinstance(d, tuple) else d)
        return Slp(tuple(defs), self.values[node])


@dataclass
class _Level:
    point: int
    # point -> (coset representative u with base_point^u = point, its SLP node)
    transversal: dict[int, tuple[Permutation, int | None]] = field(default_factory=dict)


class Bsgs:
    """Base and strong generating set of ``<generators>``.

    ``strong_generators`` starts with the input generators (identity included, so
    indices line up) followed by the Schreier residues that were added.  Points in
    ``base`` are 0-based.
    """

    def __init__(self, degree: int, generators: tuple[Permutation, ...],
                 base: tuple[int, ...], strong_generators: tuple[Permutation, ...],
                 levels: list[_Level], builder: _SlpBuilder):
        self.degree = degree
        self.generators = generators
        self.base = base
        self.strong_generators = strong_generators
        self._levels = levels
        self._builder = builder

    @property
    def transversals(self) -> list[dict[int, Permutation]]:
        return [{pt: u for pt, (u, _) in lv.transversal.items()} for lv in self._levels]

    def order(self) -> int:
        n = 1
        for lv in self._levels:
            n *= len(lv.transversal)
        return n

    def sift(self, a: Permutation) -> tuple[Permutation, int]:
        """Residue of ``a`` and the level where sifting stopped (len(base) if it ran through)."""
        g = a
        for i, lv in enumerate(self._levels):
            beta = g.image[lv.point]
            rep = lv.transversal.get(beta)
            if rep is None:
                return g, i
            g = compose(g, inverse(rep[0]))
        return g, len(self._levels)

    def contains(self, a: Permutation) -> bool:
        if a.degree != self.degree:
            raise InputError(f"degree mismatch: {a.degree} vs {self.degree}")
        h, _ = self.sift(a)
        return h.is_identity()

    def __contains__(self, a: Permutation) -> bool:
        return self.contains(a)

    def elements(self):
        """Iterate over all group elements, each once, as products u_k ... u_1 u_0."""
        def rec(i: int, acc: Permutation):
            if i == len(self._levels):
                yield acc
                return
            for u, _ in self._levels[i].transversal.values():
                yield from rec(i + 1, compose(u, acc))
        yield from rec(0, Permutation.identity(self.degree))

    def is_subgroup_of(self, other: Bsgs) -> bool:
        return all(other.contains(s) for s in self.strong_generators)

    def same_group(self, other: Bsgs) -> bool:
        return self.order() == other.order() and self.is_subgroup_of(other)


def _fixes(g: Permutation, points) -> bool:
    return all(g.image[p] == p for p in points)


def _first_moved(g: Permutation) -> int:
    for i, j in enumerate(g.image):
        if i != j:
            return i
    raise ValueError("identity moves no point")


class _NoWords(_SlpBuilder):
    """Stand-in builder when certificates are not wanted (much faster)."""

    def gen(self, index):
        return None

    def mul(self, x, y):
        return None

    def inv(self, x):
        return None


def schreier_sims(generators: Sequence[Permutation], degree: int | None = None,
                  certificates: bool = True) -> Bsgs:
    """Deterministic Schreier-Sims (no random Schreier generators, no Monte Carlo).

    With ``certificates=False`` no straight-line programs are recorded and
    :func:`factor_as_slp` is unavailable on the result.
    """
    gens = tuple(generators)
    if degree is None:
        if not gens:
            raise InputError("empty generator list needs an explicit degree")
        degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise InputError(f"degree mismatch: {g.degree} vs {degree}")

    builder = _SlpBuilder(gens) if certificates else _NoWords(gens)
    strong: list[tuple[Permutation, int | None]] = []
    base: list[int] = []
    for idx, g in enumerate(gens):
        node = builder.gen(idx)
        if g.is_identity():
            continue
        strong.append((g, node))
        if _fixes(g, base):
            base.append(_first_moved(g))

    levels: list[_Level] = [_Level(b) for b in base]

    def gens_at(i: int):
        return [(s, n) for s, n in strong if _fixes(s, base[:i])]

    def build_transversal(i: int) -> None:
        lv = levels[i]
        lv.transversal = {lv.point: (Permutation.identity(degree), None)}
        queue = [lv.point]
        sg = gens_at(i)
        for beta in queue:
            u, un = lv.transversal[beta]
            for s, sn in sg:
                gamma = s.image[beta]
                if gamma not in lv.transversal:
                    lv.transversal[gamma] = (compose(u, s), builder.mul(un, sn))
                    queue.append(gamma)

    def sift_from(g: Permutation, node, start: int):
        for i in range(start, len(levels)):
            lv = levels[i]
            rep = lv.transversal.get(g.image[lv.point])
            if rep is None:
                return g, node, i
            g = compose(g, inverse(rep[0]))
            node = builder.mul(node, builder.inv(rep[1]))
        return g, node, len(levels)

    i = len(levels) - 1
    while i >= 0:
        build_transversal(i)
        lv = levels[i]
        restarted = False
        for beta in list(lv.transversal):
            u, un = lv.transversal[beta]
            for s, sn in gens_at(i):
                gamma = s.image[beta]
                v, vn = lv.transversal[gamma]
                schreier = compose(compose(u, s), inverse(v))
                if schreier.is_identity():
                    continue
                snode = builder.mul(builder.mul(un, sn), builder.inv(vn))
                h, hn, j = sift_from(schreier, snode, i + 1)
                if j == len(levels) and h.is_identity():
                    continue
                if j == len(levels):
                    base.append(_first_moved(h))
                    levels.append(_Level(base[-1]))
                    levels[j].transversal = {base[-1]: (Permutation.identity(degree), None)}
                strong.append((h, hn))
                i = j
                restarted = True
                break
            if restarted:
                break
        if not restarted:
            i -= 1

    strong_perms = tuple(gens) + tuple(s for s, _ in strong[_count_nonidentity(gens):])
    return Bsgs(degree, gens, tuple(base), strong_perms, levels, builder)


def _count_nonidentity(gens) -> int:
    return sum(1 for g in gens if not g.is_identity())


def contains(group: Bsgs, a: Permutation) -> bool:
    return group.contains(a)


def reduce_generators(generators: Sequence[Permutation]) -> list[Permutation]:
    """Greedy subset S' with <S'> = <S>: keep a generator iff it enlarges the group.

    Each kept generator at least doubles the order, so |S'| <= log2 |<S>|.
    """
    if not generators:
        return []
    degree = generators[0].degree
    kept: list[Permutation] = []
    current = schreier_sims([], degree, certificates=False)
    for g in generators:
        if not current.contains(g):
            kept.append(g)
            current = schreier_sims(kept, certificates=False)
    return kept


def factor_as_slp(group: Bsgs, a: Permutation) -> Slp:
    """Certificate for ``a in group``: an SLP over ``group.generators`` producing a.

    Raises InputError if ``a`` is not a member.
    """
    if a.degree != group.degree:
        raise InputError(f"degree mismatch: {a.degree} vs {group.degree}")
    if isinstance(group._builder, _NoWords):
        raise InputError("group was built with certificates=False")
    builder = group._builder.copy()
    reps = []
    g = a
    for lv in group._levels:
        rep = lv.transversal.get(g.image[lv.point])
        if rep is None:
            raise InputError(f"{a} is not in the group")
        reps.append(rep)
        g = compose(g, inverse(rep[0]))
    if not g.is_identity():
        raise InputError(f"{a} is not in the group")
    # a = u_k ... u_1 u_0
    node = None
    for _, un in reversed(reps):
        node = builder.mul(node, un)
    slp = builder.extract(node, group.degree)
    if slp.claimed_result != a:
        raise AssertionError("factorization does not reproduce the element")
    return slp


def closure(generators: Sequence[Permutation], degree: int, cap: int = 10**6) -> set[Permutation]:
    """Brute-force subgroup enumeration by breadth-first multiplication.

    Independent of the stabilizer chain; used as the oracle in tests.
    """
    from .errors import CapExceeded

    ident = Permutation.identity(degree)
    seen = {ident}
    frontier = [ident]
    gens = [g for g in generators if not g.is_identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise CapExceeded(f"closure exceeds {cap} elements")
        frontier = nxt
    return seen
