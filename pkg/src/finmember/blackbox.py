"""Black-box groups: elements are bit strings, reachable only through oracles.

A box exposes ``valid``, ``inv``, ``prod`` and ``id`` (identity test with a
witness).  Several strings may name the same element, so equality of x and y is
tested as id(x y^-1).
"""
from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

from .bsgs import Slp
from .errors import CapExceeded, InputError
from .perm import Permutation, compose, inverse

BB_CLOSURE_CAP = 10 ** 5


class CertificateError(InputError):
    """The certificate is malformed (too long, bad references), not a proof of non-membership."""


class BlackBox(ABC):
    b: int  # code length
    c: int  # witness length

    @abstractmethod
    def valid(self, x: str) -> bool: ...

    @abstractmethod
    def inv(self, x: str) -> str: ...

    @abstractmethod
    def prod(self, x: str, y: str) -> str: ...

    @abstractmethod
    def id(self, x: str, w: str) -> bool: ...

    def witnesses(self):
        return ("".join(bits) for bits in itertools.product("01", repeat=self.c))

    def is_identity(self, x: str) -> bool:
        """Does some witness make ``id`` accept?"""
        return any(self.id(x, w) for w in self.witnesses())

    def equal(self, x: str, y: str) -> bool:
        return self.is_identity(self.prod(x, self.inv(y)))


class PermutationBlackBox(BlackBox):
    """S_m with each point's image written in ceil(log2 m) bits.

    In redundancy mode every code carries ceil(log2 m) extra pad bits that do
    not affect the element; ``prod`` and ``inv`` vary the pad, so one element
    shows up under many names.
    """

    def __init__(self, degree: int, redundant: bool = False):
        if degree < 1:
            raise InputError("degree must be positive")
        self.degree = degree
        self.width = max(1, math.ceil(math.log2(degree)))
        self.redundant = redundant
        self.pad = self.width if redundant else 0
        self.b = degree * self.width + self.pad
        self.c = 1
        # pure memo of code -> element (None if invalid); answers never change
        self._memo: dict[str, Permutation | None] = {}

    # -- encoding --
    def encode(self, a: Permutation, pad: int = 0) -> str:
        if a.degree != self.degree:
            raise InputError("degree mismatch")
        body = "".join(format(x, f"0{self.width}b") for x in a.image)
        if self.pad:
            body += format(pad % (1 << self.pad), f"0{self.pad}b")
        return body

    def _pad_of(self, x: str) -> int:
        return int(x[-self.pad:], 2) if self.pad else 0

    def decode(self, x: str) -> Permutation:
        a = self._lookup(x)
        if a is None:
            raise InputError(f"{x!r} is not a valid code")
        return a

    def _lookup(self, x: str) -> Permutation | None:
        try:
            return self._memo[x]
        except KeyError:
            pass
        a = None
        if len(x) == self.b and not set(x) - {"0", "1"}:
            w = self.width
            img = tuple(int(x[i * w:(i + 1) * w], 2) for i in range(self.degree))
            if sorted(img) == list(range(self.degree)):
                a = Permutation(img)
        self._memo[x] = a
        return a

    # -- oracles --
    def valid(self, x: str) -> bool:
        return self._lookup(x) is not None

    def inv(self, x: str) -> str:
        return self.encode(inverse(self.decode(x)), self._pad_of(x) + 1)

    def prod(self, x: str, y: str) -> str:
        return self.encode(compose(self.decode(x), self.decode(y)),
                           self._pad_of(x) + 2 * self._pad_of(y) + 1)

    def id(self, x: str, w: str) -> bool:
        # deterministic: the witness is carried but not consulted
        if len(w) != self.c:
            return False
        return self.valid(x) and self.decode(x).is_identity()


@dataclass(frozen=True)
class BbCertificate:
    program: Slp
    witness: str = "0"


def certificate_bound(box: BlackBox) -> int:
    return (box.b + 1) ** 2


def bb_subgroup_verify(box: BlackBox, target: str, generators: Sequence[str],
                       cert: BbCertificate) -> bool:
    """Replay the program with ``prod`` only, then ask id(value * target^-1, witness).

    The empty program stands for the identity, so it proves that target is 1.
    """
    defs = cert.program.definitions
    if len(defs) > certificate_bound(box):
        raise CertificateError(f"program of length {len(defs)} exceeds (b+1)^2 = {certificate_bound(box)}")
    try:
        cert.program.check_acyclic()
    except InputError as exc:
        raise CertificateError(str(exc)) from None
    if not box.valid(target) or not all(box.valid(x) for x in generators):
        return False
    values: list[str] = []
    for d in defs:
        if isinstance(d, tuple):
            values.append(box.prod(values[d[0]], values[d[1]]))
        else:
            if d >= len(generators):
                raise CertificateError(f"generator index {d} out of range")
            values.append(generators[d])
    if not values:
        return box.id(target, cert.witness)
    return box.id(box.prod(values[-1], box.inv(target)), cert.witness)


def bb_exhaustive_decide(box: BlackBox, target: str, generators: Sequence[str],
                         cap: int = BB_CLOSURE_CAP) -> bool:
    """Breadth-first closure of the generators using only the oracles.

    New codes are compared to every stored one with the identity test, so
    duplicate names of one element are collapsed.
    """
    if box.is_identity(target):
        return True
    found: list[str] = []
    inverses: list[str] = []

    def known(x: str) -> bool:
        return any(box.is_identity(box.prod(x, yi)) for yi in inverses)

    frontier = []
    for g in generators:
        if not known(g):
            found.append(g)
            inverses.append(box.inv(g))
            frontier.append(g)
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = box.prod(x, g)
                if not known(y):
                    found.append(y)
                    inverses.append(box.inv(y))
                    nxt.append(y)
                    if len(found) > cap:
                        raise CapExceeded(f"closure exceeds {cap} elements")
        frontier = nxt
    return known(target)


def single_mutations(program: Slp, n_generators: int):
    """Every program differing from ``program`` in one definition.

    A generator index may become any other index; a product (j, k) may swap its
    factors or redirect one reference to any other earlier definition.
    """
    defs = list(program.definitions)
    for i, d in enumerate(defs):
        if isinstance(d, tuple):
            j, k = d
            options = {(k, j)} | {(x, k) for x in range(i)} | {(j, x) for x in range(i)}
            options.discard(d)
        else:
            options = set(range(n_generators)) - {d}
        for new in sorted(options, key=lambda o: (isinstance(o, tuple), o)):
            yield Slp(tuple(defs[:i] + [new] + defs[i + 1:]), program.claimed_result)
