"""Group files and seeded random instances.

All randomness comes from ``random.Random(seed)``: its Mersenne Twister stream
and the ``randrange``/``shuffle``/``sample`` algorithms are documented as stable
across platforms for a given seed, so generated files are byte-identical.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .automata import Dfa, GroupNfa, format_dfa, format_group_nfa
from .errors import InputError
from .grammar import Cfg, format_grammar
from .knapsack import KnapsackInstance, format_knapsack
from .perm import Permutation, compose_all, parse_perm, power
from .reductions import X3hsInstance, format_x3hs


# --- group files ------------------------------------------------------------

@dataclass(frozen=True)
class GroupFile:
    degree: int
    generators: tuple[Permutation, ...]


def parse_group(text: str) -> GroupFile:
    """``degree m`` then one generator per line, optionally prefixed by ``gen``."""
    degree = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("degree"):
            try:
                degree = int(line.split()[1])
            except (IndexError, ValueError):
                raise InputError(f"line {lineno}: bad degree line") from None
            continue
        if degree is None:
            raise InputError(f"line {lineno}: 'degree' must come first")
        if line.startswith("gen"):
            line = line[3:].strip()
        gens.append(parse_perm(line, degree))
    if degree is None:
        raise InputError("group file needs a 'degree' line")
    return GroupFile(degree, tuple(gens))


def format_group(gf: GroupFile) -> str:
    return "\n".join([f"degree {gf.degree}"] + [f"gen {g}" for g in gf.generators]) + "\n"


@dataclass(frozen=True)
class GhgInstance:
    degree: int
    target: Permutation
    gen_g: tuple[Permutation, ...]
    gen_h: tuple[Permutation, ...]


def parse_ghg(text: str) -> GhgInstance:
    """``degree m``, ``target (..)``, then ``g (..)`` and ``h (..)`` lines."""
    degree = target = None
    gg, hh = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "degree":
            degree = int(rest)
        elif degree is None:
            raise InputError(f"line {lineno}: 'degree' must come first")
        elif key == "target":
            target = parse_perm(rest, degree)
        elif key == "g":
            gg.append(parse_perm(rest, degree))
        elif key == "h":
            hh.append(parse_perm(rest, degree))
        else:
            raise InputError(f"line {lineno}: unknown directive {key!r}")
    if degree is None or target is None:
        raise InputError("instance needs 'degree' and 'target' lines")
    return GhgInstance(degree, target, tuple(gg), tuple(hh))


# --- random objects -------------------------------------------------------------

def random_perm(rng: random.Random, degree: int) -> Permutation:
    return Permutation(tuple(rng.sample(range(degree), degree)))


def random_group(rng: random.Random, degree: int, n: int) -> GroupFile:
    return GroupFile(degree, tuple(random_perm(rng, degree) for _ in range(n)))


def random_knapsack(rng: random.Random, degree: int, n: int, planted: bool = False,
                    domain: str = "natural") -> KnapsackInstance:
    """Random factors; the target is a random product of them when ``planted``."""
    factors = tuple(random_perm(rng, degree) for _ in range(n))
    if planted:
        if domain == "binary":
            exps = [rng.randrange(2) for _ in factors]
        else:
            exps = [rng.randrange(a.order()) for a in factors]
        target = compose_all((power(a, e) for a, e in zip(factors, exps)), degree)
    else:
        target = random_perm(rng, degree)
    return KnapsackInstance(degree, target, factors, domain)


def random_x3hs(rng: random.Random, n: int, d: int, planted: bool = False) -> X3hsInstance:
    """Planted: fix A' first and give every triple exactly one point of A'."""
    if n < 3:
        raise InputError("need n >= 3 for triples")
    if not planted:
        return X3hsInstance(n, tuple(tuple(rng.sample(range(1, n + 1), 3)) for _ in range(d)))
    k = rng.randint(1, n - 2)
    chosen = rng.sample(range(1, n + 1), k)
    rest = [x for x in range(1, n + 1) if x not in chosen]
    fam = tuple((rng.choice(chosen), *rng.sample(rest, 2)) for _ in range(d))
    return X3hsInstance(n, fam)


def random_cfg(rng: random.Random, degree: int, max_nonterminals: int = 3,
               max_productions: int = 6, letters: list[str] | None = None) -> Cfg:
    """Random CNF grammar, start symbol S, at least one terminal production.

    Terminals are random permutations of ``degree`` points, or ``letters`` if given.
    """
    names = ["S", "A", "B", "C", "D", "E"][:rng.randint(1, max_nonterminals)]
    total = rng.randint(1, max_productions)
    n_term = rng.randint(1, total)
    terminal = []
    for _ in range(n_term):
        t = rng.choice(letters) if letters else random_perm(rng, degree)
        terminal.append((rng.choice(names), t))
    binary = [(rng.choice(names), rng.choice(names), rng.choice(names)) for _ in range(total - n_term)]
    return Cfg("S", tuple(binary), tuple(terminal), tuple(names), None if letters else degree)


def random_group_nfa(rng: random.Random, degree: int, states: int, transitions: int) -> GroupNfa:
    """Subgroup form: state 1 is the only initial and final state."""
    trans = tuple((rng.randrange(states), random_perm(rng, degree), rng.randrange(states))
                  for _ in range(transitions))
    return GroupNfa(states, degree, trans, frozenset({0}), frozenset({0}))


def random_group_dfa(rng: random.Random, states: int, letters: list[str]) -> Dfa:
    """Every letter permutes the states."""
    cols = [rng.sample(range(states), states) for _ in letters]
    table = tuple(tuple(cols[i][q] for i in range(len(letters))) for q in range(states))
    finals = frozenset(q for q in range(states) if rng.random() < 0.5)
    return Dfa(states, tuple(letters), table, rng.randrange(states), finals)


PROBLEMS = ("group", "knapsack", "subsetsum", "x3hs", "grammar", "nfa", "dfa")


def generate(problem: str, degree: int, n: int, seed: int, planted: bool = False) -> str:
    """Instance text for ``problem``; ``n`` is the number of factors, generators,
    productions, triples or transitions as appropriate."""
    rng = random.Random(seed)
    if problem == "group":
        return format_group(random_group(rng, degree, n))
    if problem in ("knapsack", "subsetsum"):
        domain = "binary" if problem == "subsetsum" else "natural"
        return format_knapsack(random_knapsack(rng, degree, n, planted, domain))
    if problem == "x3hs":
        return format_x3hs(random_x3hs(rng, degree, n, planted))
    if problem == "grammar":
        return format_grammar(random_cfg(rng, degree, 3, max(1, n)))
    if problem == "nfa":
        return format_group_nfa(random_group_nfa(rng, degree, 3, n))
    if problem == "dfa":
        return format_dfa(random_group_dfa(rng, degree, [f"a{i + 1}" for i in range(max(1, n))]))
    raise InputError(f"unknown problem {problem!r}; choose from {', '.join(PROBLEMS)}")
