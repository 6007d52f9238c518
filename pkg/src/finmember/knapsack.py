"""Subset sum, knapsack and 2-knapsack over permutation groups.

An instance asks whether a = a_1^{i_1} ... a_n^{i_n} with i_k in {0,1} (subset
sum) or i_k >= 0 (knapsack).  Since a_k^i only depends on i mod order(a_k),
knapsack exponents are searched below the orders.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sympy.ntheory.modular import solve_congruence

from .errors import CapExceeded, InputError
from .perm import Permutation, compose, compose_all, inverse, order, parse_perm, power

DEFAULT_STATE_CAP = 2_000_000
DEFAULT_MATRIX_CAP = 400  # largest m*m allowed for Kronecker checks


@dataclass(frozen=True)
class KnapsackInstance:
    degree: int
    target: Permutation
    factors: tuple[Permutation, ...]
    domain: str = "natural"  # or "binary"
    k: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.domain not in ("natural", "binary"):
            raise InputError(f"unknown exponent domain {self.domain!r}")
        for p in (self.target, *self.factors):
            if p.degree != self.degree:
                raise InputError(f"{p} has degree {p.degree}, expected {self.degree}")
        if self.k is not None and self.k != len(self.factors):
            raise InputError(f"a {self.k}-knapsack instance needs exactly {self.k} factors")

    @property
    def n(self) -> int:
        return len(self.factors)

    def evaluate(self, exponents: Sequence[int]) -> Permutation:
        if len(exponents) != self.n:
            raise InputError("wrong number of exponents")
        return compose_all((power(a, e) for a, e in zip(self.factors, exponents)), self.degree)

    def verify(self, exponents: Sequence[int]) -> bool:
        if self.domain == "binary" and any(e not in (0, 1) for e in exponents):
            return False
        if any(e < 0 for e in exponents):
            return False
        return self.evaluate(exponents) == self.target


def parse_knapsack(text: str, domain: str = "natural") -> KnapsackInstance:
    """Lines ``degree m``, ``target (..)`` and any number of ``factor (..)``."""
    degree = target = None
    factors = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "degree":
            try:
                degree = int(rest)
            except ValueError:
                raise InputError(f"line {lineno}: bad degree {rest!r}") from None
        elif key in ("target", "factor"):
            if degree is None:
                raise InputError(f"line {lineno}: 'degree' must come first")
            p = parse_perm(rest, degree)
            if key == "target":
                target = p
            else:
                factors.append(p)
        else:
            raise InputError(f"line {lineno}: unknown directive {key!r}")
    if degree is None or target is None:
        raise InputError("instance needs 'degree' and 'target' lines")
    return KnapsackInstance(degree, target, tuple(factors), domain)


def format_knapsack(inst: KnapsackInstance) -> str:
    lines = [f"degree {inst.degree}", f"target {inst.target}"]
    lines += [f"factor {a}" for a in inst.factors]
    return "\n".join(lines) + "\n"


# --- layered search ---------------------------------------------------------

def _layered(inst: KnapsackInstance, choices: Sequence[Sequence[int]], cap: int):
    """Reachable prefix products, layer by layer, with back-pointers.

    ``choices[k]`` are the exponents tried for factor k.  The state space is
    (index, prefix product), so it never exceeds n * |reachable set|.
    """
    layer: dict[Permutation, tuple | None] = {Permutation.identity(inst.degree): None}
    layers = [layer]
    total = 1
    for a, exps in zip(inst.factors, choices):
        powers = [(e, power(a, e)) for e in exps]
        nxt: dict[Permutation, tuple] = {}
        for x in layer:
            for e, ae in powers:
                y = compose(x, ae)
                if y not in nxt:
                    nxt[y] = (x, e)
        total += len(nxt)
        if total > cap:
            raise CapExceeded(f"more than {cap} search states")
        layers.append(nxt)
        layer = nxt
    if inst.target not in layer:
        return None
    exps = []
    x = inst.target
    for lay in reversed(layers[1:]):
        x, e = lay[x]
        exps.append(e)
    return tuple(reversed(exps))


def solve_subset_sum(inst: KnapsackInstance, method: str = "dp",
                     cap: int = DEFAULT_STATE_CAP) -> tuple[int, ...] | None:
    """A 0/1 vector with a = prod a_k^{i_k}, or None.

    ``method`` is ``dp`` (memoized prefix products), ``mitm`` (meet in the
    middle) or ``exhaustive`` (all 2^n vectors).
    """
    if method == "dp":
        sol = _layered(inst, [(0, 1)] * inst.n, cap)
    elif method == "mitm":
        sol = _meet_in_the_middle(inst, cap)
    elif method == "exhaustive":
        sol = _exhaustive(inst, [2] * inst.n, cap)
    else:
        raise InputError(f"unknown method {method!r}")
    assert sol is None or inst.evaluate(sol) == inst.target
    return sol


def _half_products(factors: Sequence[Permutation], degree: int) -> dict[Permutation, tuple]:
    out = {Permutation.identity(degree): ()}
    for a in factors:
        nxt = {}
        for x, bits in out.items():
            nxt.setdefault(x, bits + (0,))
        for x, bits in out.items():
            nxt.setdefault(compose(x, a), bits + (1,))
        out = nxt
    return out


def _meet_in_the_middle(inst: KnapsackInstance, cap: int):
    h = inst.n // 2
    if 2 ** h > cap or 2 ** (inst.n - h) > cap:
        raise CapExceeded("meet-in-the-middle tables exceed the cap")
    left = _half_products(inst.factors[:h], inst.degree)
    right = _half_products(inst.factors[h:], inst.degree)
    for r in sorted(right, key=lambda p: right[p]):
        need = compose(inst.target, inverse(r))
        if need in left:
            return left[need] + right[r]
    return None


def _exhaustive(inst: KnapsackInstance, bounds: Sequence[int], cap: int):
    import itertools

    total = 1
    for b in bounds:
        total *= b
    if total > cap:
        raise CapExceeded(f"{total} exponent vectors exceed the cap")
    for exps in itertools.product(*(range(b) for b in bounds)):
        if inst.evaluate(exps) == inst.target:
            return tuple(exps)
    return None


def solve_knapsack(inst: KnapsackInstance, binary: bool = False,
                   cap: int = DEFAULT_STATE_CAP) -> tuple[int, ...] | None:
    """Exponents i_k < order(a_k) with a = prod a_k^{i_k}, or None.

    With ``binary=True`` (or a binary-domain instance) exponents are 0/1.
    """
    if binary or inst.domain == "binary":
        choices = [(0, 1)] * inst.n
    else:
        choices = [range(order(a)) for a in inst.factors]
    sol = _layered(inst, choices, cap)
    assert sol is None or inst.evaluate(sol) == inst.target
    return sol


def solve_exhaustive(inst: KnapsackInstance, cap: int = DEFAULT_STATE_CAP) -> tuple[int, ...] | None:
    """Lexicographically first exponent vector, trying every tuple below the orders."""
    bounds = [2] * inst.n if inst.domain == "binary" else [order(a) for a in inst.factors]
    return _exhaustive(inst, bounds, cap)


def solve_k_knapsack(inst: KnapsackInstance, k: int, cap: int = DEFAULT_STATE_CAP):
    """Knapsack with the number of factors fixed to k."""
    if inst.n != k:
        raise InputError(f"expected exactly {k} factors, got {inst.n}")
    return solve_knapsack(inst, cap=cap)


# --- 2-knapsack ---------------------------------------------------------------

def cyclic_dlog(c: Permutation, b: Permutation) -> int | None:
    """Least y >= 0 with c^y = b, or None.

    Each cycle of c fixes y modulo its length (where b sends the cycle's first
    point); the congruences are combined and the result re-checked.
    """
    if c.degree != b.degree:
        raise InputError("degree mismatch")
    residues, moduli = [], []
    for cyc in c.cycles():
        pts = [x - 1 for x in cyc]
        pos = {x: i for i, x in enumerate(pts)}
        j = pos.get(b.image[pts[0]])
        if j is None:
            return None
        n = len(pts)
        if any(b.image[x] != pts[(i + j) % n] for i, x in enumerate(pts)):
            return None
        residues.append(j)
        moduli.append(n)
    moved = {x - 1 for cyc in c.cycles() for x in cyc}
    if any(b.image[x] != x for x in range(c.degree) if x not in moved):
        return None
    if not moduli:
        return 0
    sol = solve_congruence(*zip(residues, moduli))
    if sol is None:
        return None
    y = int(sol[0])
    return y if power(c, y) == b else None


def solve_2_knapsack(a1: Permutation, a2: Permutation, a: Permutation) -> tuple[int, int] | None:
    """(x1, x2) with a1^x1 a2^x2 = a, x1 minimal, or None.

    Loops x1 over [0, order(a1)) and asks whether a1^-x1 a is a power of a2.
    """
    if not a1.degree == a2.degree == a.degree:
        raise InputError("degree mismatch")
    inv1 = inverse(a1)
    rest = a
    for x1 in range(order(a1)):
        y = cyclic_dlog(a2, rest)
        if y is not None:
            return x1, y
        rest = compose(inv1, rest)
    return None


# --- Kronecker reformulation --------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZeroOneMatrix:
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.data)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError("expected a square matrix")
        if not np.isin(d, (0, 1)).all():
            raise InputError("entries must be 0 or 1")
        object.__setattr__(self, "data", d.astype(np.int64))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def is_permutation_matrix(self) -> bool:
        return bool((self.data.sum(axis=0) == 1).all() and (self.data.sum(axis=1) == 1).all())

    def __eq__(self, other) -> bool:
        return isinstance(other, ZeroOneMatrix) and np.array_equal(self.data, other.data)

    @classmethod
    def identity(cls, n: int) -> ZeroOneMatrix:
        return cls(np.eye(n, dtype=np.int64))


def permutation_matrix(a: Permutation) -> ZeroOneMatrix:
    """M[i, j] = 1 iff i^a = j, so M(ab) = M(a) M(b) for our left-to-right product."""
    m = np.zeros((a.degree, a.degree), dtype=np.int64)
    m[np.arange(a.degree), list(a.image)] = 1
    return ZeroOneMatrix(m)


def kron(x: ZeroOneMatrix, y: ZeroOneMatrix, cap: int = DEFAULT_MATRIX_CAP ** 2) -> ZeroOneMatrix:
    if x.dim * y.dim > cap:
        raise CapExceeded(f"Kronecker product of dimension {x.dim * y.dim} exceeds the cap")
    return ZeroOneMatrix(np.kron(x.data, y.data))


def vec(x: ZeroOneMatrix) -> np.ndarray:
    """Stack the columns."""
    return x.data.flatten(order="F")


def kronecker_factors(a1: Permutation, a2: Permutation, cap: int = DEFAULT_MATRIX_CAP):
    """(A2^T ⊗ I, I ⊗ A1)."""
    m = a1.degree
    if m * m > cap:
        raise CapExceeded(f"m^2 = {m * m} exceeds the cap {cap}")
    eye = ZeroOneMatrix.identity(m)
    left = kron(ZeroOneMatrix(permutation_matrix(a2).data.T), eye)
    right = kron(eye, permutation_matrix(a1))
    return left, right


def kronecker_factors_commute(a1: Permutation, a2: Permutation,
                              cap: int = DEFAULT_MATRIX_CAP) -> bool:
    left, right = kronecker_factors(a1, a2, cap)
    return bool(np.array_equal(left.data @ right.data, right.data @ left.data))


def check_kronecker_equivalence(a1: Permutation, a2: Permutation, a: Permutation,
                                x1: int, x2: int, cap: int = DEFAULT_MATRIX_CAP) -> bool:
    """(A2^T ⊗ I)^x2 (I ⊗ A1)^x1 vec(I) == vec(A), evaluated with integer matrices."""
    if not a1.degree == a2.degree == a.degree:
        raise InputError("degree mismatch")
    if x1 < 0 or x2 < 0:
        raise InputError("exponents must be natural numbers")
    left, right = kronecker_factors(a1, a2, cap)
    lhs = (np.linalg.matrix_power(left.data, x2) @ np.linalg.matrix_power(right.data, x1)
           @ vec(ZeroOneMatrix.identity(a.degree)))
    return bool(np.array_equal(lhs, vec(permutation_matrix(a))))
