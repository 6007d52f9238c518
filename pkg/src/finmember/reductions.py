"""Hardness reductions into subset sum / knapsack over permutation groups, with oracles.

* exact 3-hitting set -> subset sum over Z_3^d -> subset sum over S_3d
* exact 3-hitting set -> 3-knapsack over a symmetric group (cycles of prime length)
* membership in G H G (G, H abelian) -> knapsack

[p] is the cycle (1 2 ... p) on the first p points of whatever block it lives in.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sympy import prime
from sympy.ntheory.modular import crt

from .bsgs import closure
from .errors import CapExceeded, InputError, InvariantBreach
from .knapsack import KnapsackInstance
from .perm import Permutation, compose, compose_all, direct_sum, inverse, power

X3HS_MAX_N = 20


# --- exact 3-hitting set ------------------------------------------------------

@dataclass(frozen=True)
class X3hsInstance:
    """Ground set {1..n} and a family of 3-element subsets (stored as sorted triples)."""

    n: int
    family: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n < 0:
            raise InputError("n must be non-negative")
        fam = []
        for c in self.family:
            c = tuple(sorted(c))
            if len(c) != 3 or len(set(c)) != 3:
                raise InputError(f"{c} is not a set of three distinct elements")
            if not all(1 <= x <= self.n for x in c):
                raise InputError(f"{c} leaves the ground set 1..{self.n}")
            fam.append(c)
        object.__setattr__(self, "family", tuple(fam))

    @property
    def d(self) -> int:
        return len(self.family)


def parse_x3hs(text: str) -> X3hsInstance:
    """First line n, then one triple per line."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if line:
            try:
                rows.append([int(x) for x in line.split()])
            except ValueError:
                raise InputError(f"bad line {raw!r}") from None
    if not rows or len(rows[0]) != 1:
        raise InputError("first line must hold n alone")
    for r in rows[1:]:
        if len(r) != 3:
            raise InputError(f"expected a triple, got {r}")
    return X3hsInstance(rows[0][0], tuple(tuple(r) for r in rows[1:]))


def format_x3hs(inst: X3hsInstance) -> str:
    return "\n".join([str(inst.n)] + [" ".join(map(str, c)) for c in inst.family]) + "\n"


def _one_in_three(n: int, clauses: Sequence[Sequence[int]], cap: int = X3HS_MAX_N):
    """Least-lexicographic 0/1 assignment with exactly one true literal per clause.

    Clauses may repeat a variable; a repeated variable counts with multiplicity.
    """
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds the brute-force cap {cap}")
    # increasing size, then lexicographic: the empty set first, then {1}, {2}, ...
    for size in range(n + 1):
        for chosen in itertools.combinations(range(1, n + 1), size):
            s = set(chosen)
            if all(sum(x in s for x in c) == 1 for c in clauses):
                return frozenset(chosen)
    return None


def solve_x3hs(inst: X3hsInstance, cap: int = X3HS_MAX_N) -> frozenset[int] | None:
    """A' with |A' ∩ C| = 1 for every C, by enumeration (smallest, then lexicographically least)."""
    return _one_in_three(inst.n, inst.family, cap)


# --- Z_3 subset sum -------------------------------------------------------------

@dataclass(frozen=True)
class Z3Vector:
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) % 3 for x in self.entries))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __add__(self, other: Z3Vector) -> Z3Vector:
        if self.dim != other.dim:
            raise InputError("dimension mismatch")
        return Z3Vector(tuple(a + b for a, b in zip(self.entries, other.entries)))

    @classmethod
    def zero(cls, d: int) -> Z3Vector:
        return cls((0,) * d)


def reduce_x3hs_to_subsetsum_z3(inst: X3hsInstance) -> tuple[Z3Vector, list[Z3Vector]]:
    """X_i has a 1 in coordinate j iff i is in C_j; the target is all ones."""
    items = [Z3Vector(tuple(int(i in c) for c in inst.family)) for i in range(1, inst.n + 1)]
    return Z3Vector((1,) * inst.d), items


def solve_z3_subsetsum(target: Z3Vector, items: Sequence[Z3Vector], cap: int = X3HS_MAX_N):
    """Brute force over y in {0,1}^n; returns the first bit vector found or None."""
    if len(items) > cap:
        raise CapExceeded(f"{len(items)} items exceed the brute-force cap {cap}")
    for bits in itertools.product((0, 1), repeat=len(items)):
        acc = Z3Vector.zero(target.dim)
        for b, x in zip(bits, items):
            if b:
                acc = acc + x
        if acc == target:
            return bits
    return None


def embed_z3_in_sym(v: Z3Vector) -> Permutation:
    """Coordinate e becomes a power of the 3-cycle on points 3e-2, 3e-1, 3e."""
    three = Permutation.cycle(3)
    if not v.entries:
        return Permutation.identity(0)
    return direct_sum(*(power(three, c) for c in v.entries))


def z3_subsetsum_as_permutations(target: Z3Vector, items: Sequence[Z3Vector]) -> KnapsackInstance:
    return KnapsackInstance(3 * target.dim, embed_z3_in_sym(target),
                            tuple(embed_z3_in_sym(x) for x in items), domain="binary")


# --- cycles of prime length -----------------------------------------------------

def cycle_product_form(p: int, q: int) -> Permutation:
    """[q][p] written out: (1,3,5,...,q, 2,4,...,q-1, q+1, q+2, ..., p)."""
    if q % 2 == 0 or not 0 < q < p:
        raise InputError("need q odd and p > q > 0")
    pts = list(range(1, q + 1, 2)) + list(range(2, q, 2)) + list(range(q + 1, p + 1))
    c = Permutation.from_cycles(p, [pts])
    if c != compose(Permutation.cycle(q, p), Permutation.cycle(p)):
        raise InvariantBreach(f"explicit form of [{q}][{p}] is wrong")
    return c


def is_single_cycle(a: Permutation, length: int) -> bool:
    return a.cycle_lengths() == [length]


def lemma_equation_holds(p: int, q: int, x1: int, x2: int) -> bool:
    """[p]^-x2 [q]^x1 ([p][q])^x2 = [q] = [q]^x1 [p]^-x2 ([p][q])^x2 on p points."""
    cp, cq = Permutation.cycle(p), Permutation.cycle(q, p)
    pq = compose(cp, cq)
    left = compose_all([power(cp, -x2), power(cq, x1), power(pq, x2)], p)
    right = compose_all([power(cq, x1), power(cp, -x2), power(pq, x2)], p)
    return left == cq == right


# --- 3-knapsack ---------------------------------------------------------------

def odd_primes(count: int) -> list[int]:
    return [prime(k) for k in range(2, count + 2)]


@dataclass(frozen=True)
class Block:
    name: str
    start: int  # 0-based first point
    size: int


@dataclass(frozen=True)
class ThreeKnapsack:
    """g, g1, g2, g3 plus the layout they were built from."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]  # alpha(i, k), 1-based
    p: tuple[int, ...]
    r: tuple[int, ...]
    q: tuple[int, ...]
    g: Permutation
    gens: tuple[Permutation, Permutation, Permutation]
    blocks: tuple[Block, ...]

    @property
    def P(self) -> int:
        return max(self.p)

    @property
    def degree(self) -> int:
        return self.g.degree

    def as_knapsack(self) -> KnapsackInstance:
        return KnapsackInstance(self.degree, self.g, self.gens, k=3)

    def evaluate(self, z: Sequence[int]) -> Permutation:
        return compose_all((power(a, e) for a, e in zip(self.gens, z)), self.degree)

    def verify(self, z: Sequence[int]) -> bool:
        return self.evaluate(z) == self.g

    def exponents_for(self, chosen: frozenset[int] | set[int]) -> tuple[int, int, int]:
        """CRT-built exponents from a hitting set (z3 mod r_j is free; we take 0)."""
        sigma = {j: int(j in chosen) for j in range(1, self.n + 1)}
        residues: list[list[int]] = [[], [], []]
        moduli: list[list[int]] = [[], [], []]
        for j in range(1, self.n + 1):
            pj, rj = self.p[j - 1], self.r[j - 1]
            for k in range(3):
                residues[k].append(sigma[j])
                moduli[k].append(pj)
            for k, val in ((0, 1 - sigma[j]), (1, 1 - sigma[j]), (2, 0)):
                residues[k].append(val)
                moduli[k].append(rj)
        for i, clause in enumerate(self.clauses):
            for k in range(3):
                residues[k].append(sigma[clause[k]])
                moduli[k].append(self.q[i])
        out = []
        for k in range(3):
            sol = crt(moduli[k], residues[k])
            if sol is None:
                raise InvariantBreach("CRT system is inconsistent")
            out.append(int(sol[0]))
        return tuple(out)

    def report(self) -> dict:
        return {
            "degree": self.degree,
            "p": list(self.p), "r": list(self.r), "q": list(self.q),
            "blocks": [{"name": b.name, "start": b.start + 1, "size": b.size} for b in self.blocks],
        }


def _cyc(n: int, degree: int | None = None) -> Permutation:
    return Permutation.cycle(n, degree)


def build_3knapsack(n: int, clauses: Sequence[Sequence[int]]) -> ThreeKnapsack:
    """The four elements for clause list ``clauses`` (alpha may repeat an element).

    Primes: the first 2n+d odd primes; the n largest go to p_1 < ... < p_n, the
    n smallest to r_1 < ... < r_n and the rest to q_1 < ... < q_d.
    """
    d = len(clauses)
    if n < 1:
        raise InputError("need at least one ground element")
    for c in clauses:
        if len(c) != 3 or not all(1 <= x <= n for x in c):
            raise InputError(f"bad clause {c}")
    primes = odd_primes(2 * n + d)
    r = tuple(primes[:n])
    q = tuple(primes[n:n + d])
    p = tuple(primes[n + d:])
    P = max(p)

    parts: list[list[Permutation]] = [[], [], [], []]  # g, g1, g2, g3
    blocks: list[Block] = []
    pos = 0

    def add(name: str, size: int, comps: Sequence[Permutation]):
        nonlocal pos
        blocks.append(Block(name, pos, size))
        pos += size
        for slot, c in zip(parts, comps):
            slot.append(c)

    def z(nn: int, value: int) -> Permutation:
        return power(_cyc(nn), value)

    for j in range(n):
        pj, rj = p[j], r[j]
        rr, pinv, pr = _cyc(rj, pj), inverse(_cyc(pj)), compose(_cyc(pj), _cyc(rj, pj))
        ident = Permutation.identity(pj)
        add(f"V{j + 1}.S1", pj, [rr, rr, pinv, pr])
        add(f"V{j + 1}.S2", pj, [rr, pinv, rr, pr])
        add(f"V{j + 1}.Zp1", pj, [ident, z(pj, 1), z(pj, -1), z(pj, 0)])
        add(f"V{j + 1}.Zp2", pj, [ident, z(pj, 1), z(pj, 0), z(pj, -1)])
        add(f"V{j + 1}.Zr", rj, [Permutation.identity(rj), z(rj, 1), z(rj, -1), z(rj, 0)])
    for i, (a1, a2, a3) in enumerate(clauses):
        qi = q[i]
        cq = _cyc(qi, P)
        qinv = inverse(cq)
        pa = [None] + [_cyc(p[a - 1], P) for a in (a1, a2, a3)]
        ident = Permutation.identity(P)
        add(f"C{i + 1}.Zq", qi, [z(qi, 1)] * 4)
        add(f"C{i + 1}.S1", P, [ident, qinv, compose(cq, pa[1]), inverse(pa[1])])
        add(f"C{i + 1}.S2", P, [ident, inverse(pa[2]), qinv, compose(cq, pa[2])])
        add(f"C{i + 1}.S3", P, [ident, compose(cq, pa[3]), inverse(pa[3]), qinv])

    g, g1, g2, g3 = (direct_sum(*comps) for comps in parts)
    return ThreeKnapsack(n, tuple(tuple(c) for c in clauses), p, r, q, g, (g1, g2, g3), tuple(blocks))


def reduce_x3hs_to_3knapsack(inst: X3hsInstance) -> ThreeKnapsack:
    if inst.n < 1:
        raise InputError("need a non-empty ground set")
    return build_3knapsack(inst.n, inst.family)


def residue_solver(red: ThreeKnapsack) -> frozenset[int] | None:
    """Search over sigma in {0,1}^n using the residue conditions per clause.

    Each element j is pinned to z1 = z2 = z3 = sigma(j) mod p_j (the only
    patterns the V_j blocks allow).  A clause block C_i is then satisfiable iff
    some residues of z1, z2, z3 mod q_i give sum 1 and make the three S_P
    equations hold with the p-residues fixed by sigma.  Returns a hitting set
    read off from sigma, or None.
    """
    cache: dict[tuple, bool] = {}

    def clause_ok(i: int, s: tuple[int, int, int]) -> bool:
        key = (i, s)
        if key in cache:
            return cache[key]
        qi, P = red.q[i], red.P
        cq = _cyc(qi, P)
        cp = [_cyc(red.p[a - 1], P) for a in red.clauses[i]]
        qp = [compose(cq, c) for c in cp]
        ident = Permutation.identity(P)
        found = False
        for x1 in range(qi):
            # (1) [q]^-z1 ([q][p_a1])^z1 [p_a1]^-z1 = id, with z1 = s[0] mod p_a1
            if compose_all([power(cq, -x1), power(qp[0], s[0]), power(cp[0], -s[0])], P) != ident:
                continue
            for x2 in range(qi):
                # (2) [p_a2]^-z1 [q]^-z2 ([q][p_a2])^z1 = id, with z1 = s[1] mod p_a2
                if compose_all([power(cp[1], -s[1]), power(cq, -x2), power(qp[1], s[1])], P) != ident:
                    continue
                x3 = (1 - x1 - x2) % qi
                # (3) ([q][p_a3])^z1 [p_a3]^-z1 [q]^-z3 = id, with z1 = s[2] mod p_a3
                if compose_all([power(qp[2], s[2]), power(cp[2], -s[2]), power(cq, -x3)], P) == ident:
                    found = True
                    break
            if found:
                break
        cache[key] = found
        return found

    for sigma in itertools.product((0, 1), repeat=red.n):
        if all(clause_ok(i, tuple(sigma[a - 1] for a in c)) for i, c in enumerate(red.clauses)):
            chosen = frozenset(j + 1 for j in range(red.n) if sigma[j])
            if not red.verify(red.exponents_for(chosen)):
                raise InvariantBreach("residue solution does not verify on the full permutations")
            return chosen
    return None


def v_block_patterns(red: ThreeKnapsack, j: int) -> set[tuple[int, int, int, int, int]]:
    """(z1, z2, z3 mod p_j, z1, z2 mod r_j) residues solving the V_j block, by full sweep."""
    pj, rj = red.p[j], red.r[j]
    names = {f"V{j + 1}.{s}" for s in ("S1", "S2", "Zp1", "Zp2", "Zr")}
    pts = [x for b in red.blocks if b.name in names for x in range(b.start, b.start + b.size)]
    sols = sweep_3knapsack(red.g, red.gens, pj * rj, pts)
    return {(a % pj, b % pj, c % pj, a % rj, b % rj) for a, b, c in sols}


def sweep_3knapsack(g: Permutation, gens: Sequence[Permutation], bound: int,
                    points: Sequence[int] | None = None) -> list[tuple[int, int, int]]:
    """Every (z1,z2,z3) in [0,bound)^3 with g = g1^z1 g2^z2 g3^z3 on ``points``.

    ``points`` must be a union of orbits of the group generated by gens
    (the default is all points).  Vectorized over z2 and z3.
    """
    pts = np.arange(g.degree) if points is None else np.asarray(sorted(points))
    remap = np.full(g.degree, -1)
    remap[pts] = np.arange(len(pts))

    def restrict(a: Permutation) -> np.ndarray:
        img = remap[np.asarray(a.image)[pts]]
        if (img < 0).any():
            raise InputError("points are not invariant")
        return img

    pows = [np.stack([restrict(power(a, e)) for e in range(bound)]) for a in gens]
    target = restrict(g)
    rng = np.arange(bound)
    out = []
    for z1 in range(bound):
        # left-to-right: (ab)[x] = b[a[x]]
        p12 = pows[1][:, pows[0][z1]]                  # (z2, x)
        full = pows[2][rng[None, :, None], p12[:, None, :]]  # (z2, z3, x)
        hit = np.all(full == target, axis=2)
        for z2, z3 in zip(*np.nonzero(hit)):
            out.append((z1, int(z2), int(z3)))
    return out


# --- G H G membership -----------------------------------------------------------

def _commute(gens: Sequence[Permutation]) -> bool:
    return all(compose(a, b) == compose(b, a) for a, b in itertools.combinations(gens, 2))


def reduce_product_membership_to_knapsack(gen_g: Sequence[Permutation], gen_h: Sequence[Permutation],
                                          s: Permutation) -> KnapsackInstance:
    """s in G H G iff s = g_1^x1 .. g_k^xk h_1^y1 .. h_l^yl g_1^z1 .. g_k^zk is solvable."""
    if not _commute(gen_g) or not _commute(gen_h):
        raise InputError("both generating sets must commute pairwise")
    for a in (*gen_g, *gen_h):
        if a.degree != s.degree:
            raise InputError("degree mismatch")
    return KnapsackInstance(s.degree, s, tuple(gen_g) + tuple(gen_h) + tuple(gen_g))


def ghg_membership_oracle(gen_g: Sequence[Permutation], gen_h: Sequence[Permutation],
                          s: Permutation, cap: int = 100000) -> bool:
    """Brute force over explicit G and H."""
    m = s.degree
    G = closure(list(gen_g), m, cap)
    H = closure(list(gen_h), m, cap)
    for a in G:
        for h in H:
            if compose(inverse(compose(a, h)), s) in G:
                return True
    return False
