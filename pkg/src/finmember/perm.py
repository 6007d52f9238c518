"""Permutations of {1..m} with left-to-right multiplication.

Convention (used everywhere in this package): ``a * b`` means "apply a, then b",
i.e. ``i^(ab) = (i^a)^b``.  Most libraries (sympy, GAP's ``OnPoints`` aside)
compose right-to-left; ours does not.

Points are 1-based in text (cycle notation) and 0-based in ``Permutation.image``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .errors import InputError


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``range(degree)``; ``image[i]`` is the image of point i."""

    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise InputError(f"not a permutation: {self.image!r}")

    @property
    def degree(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> Permutation:
        """Build from 1-based cycles; the product is taken left to right."""
        result = cls.identity(degree)
        for cycle in cycles:
            img = list(range(degree))
            for x, y in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                if not 1 <= x <= degree:
                    raise InputError(f"point {x} outside 1..{degree}")
                img[x - 1] = y - 1
            result = result * cls(tuple(img))
        return result

    @classmethod
    def cycle(cls, length: int, degree: int | None = None, offset: int = 0) -> Permutation:
        """The cycle (offset+1, ..., offset+length) on ``degree`` points.

        ``Permutation.cycle(p)`` is the cycle written [p] in the literature on
        knapsack hardness: i -> i+1 for i < p and p -> 1.
        """
        degree = length + offset if degree is None else degree
        img = list(range(degree))
        for i in range(length):
            img[offset + i] = offset + (i + 1) % length
        return cls(tuple(img))

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __pow__(self, e: int) -> Permutation:
        return power(self, e)

    def __invert__(self) -> Permutation:
        return inverse(self)

    def __call__(self, point: int) -> int:
        """Image of a 1-based point."""
        return self.image[point - 1] + 1

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.image))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, 1-based, each starting at its least point."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] or self.image[start] == start:
                continue
            cyc = [start]
            seen[start] = True
            j = self.image[start]
            while j != start:
                seen[j] = True
                cyc.append(j)
                j = self.image[j]
            out.append(tuple(x + 1 for x in cyc))
        return out

    def cycle_lengths(self) -> list[int]:
        return [len(c) for c in self.cycles()]

    def order(self) -> int:
        return order(self)

    def __str__(self) -> str:
        return format_perm(self)

    def __repr__(self) -> str:
        return f"Permutation({self.degree}, {format_perm(self)!r})"


def _raw(image: tuple[int, ...]) -> Permutation:
    """Construct without the bijection check (caller guarantees validity)."""
    p = object.__new__(Permutation)
    object.__setattr__(p, "image", image)
    return p


def _check_degrees(a: Permutation, b: Permutation) -> None:
    if a.degree != b.degree:
        raise InputError(f"degree mismatch: {a.degree} vs {b.degree}")


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Left-to-right product ab: first a, then b."""
    _check_degrees(a, b)
    bi = b.image
    return _raw(tuple(bi[x] for x in a.image))


def compose_all(perms: Iterable[Permutation], degree: int) -> Permutation:
    return reduce(compose, perms, Permutation.identity(degree))


def inverse(a: Permutation) -> Permutation:
    inv = [0] * a.degree
    for i, j in enumerate(a.image):
        inv[j] = i
    return _raw(tuple(inv))


def order(a: Permutation) -> int:
    """Least e > 0 with a^e = 1 (lcm of cycle lengths; Python ints do not overflow)."""
    return math.lcm(1, *a.cycle_lengths())


def power(a: Permutation, e: int) -> Permutation:
    """a^e for any integer e, with the exponent reduced modulo order(a)."""
    e %= order(a)
    # Walking each cycle is cheaper than square-and-multiply once e is reduced.
    img = list(range(a.degree))
    seen = [False] * a.degree
    for start in range(a.degree):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = a.image[start]
        while j != start:
            seen[j] = True
            cyc.append(j)
            j = a.image[j]
        n = len(cyc)
        for k, x in enumerate(cyc):
            img[x] = cyc[(k + e) % n]
    return _raw(tuple(img))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, degree: int) -> Permutation:
    """Parse 1-based cycle notation, e.g. ``"(1 2 3)(4 5)"``; ``"()"`` is the identity.

    Commas are accepted as separators as well as spaces.
    """
    s = text.strip()
    if not s:
        raise InputError("empty permutation text")
    pos = 0
    cycles = []
    for m in _CYCLE_RE.finditer(s):
        if s[pos:m.start()].strip():
            raise InputError(f"could not parse permutation {text!r}")
        pos = m.end()
        body = m.group(1).replace(",", " ").split()
        try:
            pts = [int(x) for x in body]
        except ValueError:
            raise InputError(f"could not parse permutation {text!r}") from None
        if len(set(pts)) != len(pts):
            raise InputError(f"repeated point in cycle of {text!r}")
        if pts:
            cycles.append(pts)
    if s[pos:].strip() or pos == 0:
        raise InputError(f"could not parse permutation {text!r}")
    return Permutation.from_cycles(degree, cycles)


def format_perm(a: Permutation) -> str:
    cycles = a.cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


def direct_sum(*perms: Permutation) -> Permutation:
    """Disjoint union: the i-th permutation acts on the i-th block of points."""
    img: list[int] = []
    for p in perms:
        off = len(img)
        img.extend(x + off for x in p.image)
    return _raw(tuple(img))
