"""Rational subset membership over symmetric groups and the spanning-tree technique."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import GroupNfa
from .bsgs import Bsgs, schreier_sims
from .errors import CapExceeded, InputError
from .perm import Permutation, compose, inverse

DEFAULT_MAX_DEGREE = 8


@dataclass(frozen=True)
class TrimmedGroupNfa:
    """Subgroup-form automaton after trimming and adding inverse transitions.

    ``nfa`` carries the symmetrized transitions; ``edges`` lists each undirected
    edge {(p,g,q), (q,g^-1,p)} once, as the surviving original transition.
    """

    nfa: GroupNfa
    q0: int
    alive: frozenset[int]
    edges: tuple[tuple[int, Permutation, int], ...]


def _reach(n: int, arcs, src: int) -> set[int]:
    adj: dict[int, list[int]] = {}
    for p, q in arcs:
        adj.setdefault(p, []).append(q)
    seen = {src}
    stack = [src]
    while stack:
        p = stack.pop()
        for q in adj.get(p, ()):
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


def trim_and_symmetrize(a: GroupNfa) -> TrimmedGroupNfa:
    if not a.is_subgroup_form():
        raise InputError("need a single state that is both initial and final")
    (q0,) = a.initial
    fwd = _reach(a.n_states, [(p, q) for p, _, q in a.transitions], q0)
    bwd = _reach(a.n_states, [(q, p) for p, _, q in a.transitions], q0)
    alive = frozenset(fwd & bwd)
    kept = [(p, g, q) for p, g, q in a.transitions if p in alive and q in alive]

    present = set(kept)
    edges = []
    covered = set()
    for p, g, q in kept:
        if (p, g, q) in covered:
            continue
        edges.append((p, g, q))
        covered.add((p, g, q))
        covered.add((q, inverse(g), p))
    symmetric = list(kept)
    for p, g, q in kept:
        back = (q, inverse(g), p)
        if back not in present:
            present.add(back)
            symmetric.append(back)
    nfa = GroupNfa(a.n_states, a.degree, tuple(symmetric), a.initial, a.final)
    return TrimmedGroupNfa(nfa, q0, alive, tuple(edges))


def spanning_tree_generators(t: TrimmedGroupNfa) -> list[Permutation]:
    """One generator g_p g g_q^-1 per edge outside a BFS spanning tree rooted at q0.

    g_p is the element read along the tree path from q0 to p.  Edges are scanned
    in input order, so the tree (and the output) is deterministic.
    """
    ident = Permutation.identity(t.nfa.degree)
    incident: dict[int, list[int]] = {}
    for i, (p, _, q) in enumerate(t.edges):
        incident.setdefault(p, []).append(i)
        if q != p:
            incident.setdefault(q, []).append(i)
    label = {t.q0: ident}
    tree_edges = set()
    queue = deque([t.q0])
    while queue:
        x = queue.popleft()
        for i in incident.get(x, ()):
            p, g, q = t.edges[i]
            if p == x and q not in label:
                label[q] = compose(label[p], g)
            elif q == x and p not in label:
                label[p] = compose(label[q], inverse(g))
            else:
                continue
            tree_edges.add(i)
            queue.append(q if p == x else p)
    return [compose(compose(label[p], g), inverse(label[q]))
            for i, (p, g, q) in enumerate(t.edges) if i not in tree_edges]


def subgroup_of(a: GroupNfa) -> Bsgs:
    """Stabilizer chain of L(a) for an automaton in subgroup form."""
    gens = spanning_tree_generators(trim_and_symmetrize(a))
    return schreier_sims(gens, a.degree)


def _check_caps(a: GroupNfa, max_degree: int) -> None:
    if a.degree > max_degree:
        raise CapExceeded(f"degree {a.degree} exceeds the cap {max_degree}")


def rational_membership(a: GroupNfa, target: Permutation, max_degree: int = DEFAULT_MAX_DEGREE
                        ) -> tuple[bool, list[Permutation] | None]:
    """Is ``target`` spelled by some accepted word?  Returns the decision and the word.

    Breadth-first search over reachable (state, group element) pairs.
    """
    if target.degree != a.degree:
        raise InputError("target degree does not match the automaton")
    _check_caps(a, max_degree)
    out: dict[int, list[tuple[Permutation, int]]] = {}
    for p, g, q in a.transitions:
        out.setdefault(p, []).append((g, q))
    ident = Permutation.identity(a.degree)
    parent: dict[tuple[int, Permutation], tuple | None] = {}
    queue = deque()
    for q in sorted(a.initial):
        parent[(q, ident)] = None
        queue.append((q, ident))
    while queue:
        node = queue.popleft()
        q, x = node
        if q in a.final and x == target:
            word = []
            while parent[node] is not None:
                node, g = parent[node]
                word.append(g)
            return True, word[::-1]
        for g, r in out.get(q, ()):
            nxt = (r, compose(x, g))
            if nxt not in parent:
                parent[nxt] = (node, g)
                queue.append(nxt)
    return False, None


def evaluated_language(a: GroupNfa, max_degree: int = DEFAULT_MAX_DEGREE) -> set[Permutation]:
    """All group elements spelled by accepted words (product-BFS oracle)."""
    _check_caps(a, max_degree)
    out: dict[int, list[tuple[Permutation, int]]] = {}
    for p, g, q in a.transitions:
        out.setdefault(p, []).append((g, q))
    ident = Permutation.identity(a.degree)
    seen = {(q, ident) for q in a.initial}
    queue = deque(seen)
    while queue:
        q, x = queue.popleft()
        for g, r in out.get(q, ()):
            nxt = (r, compose(x, g))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return {x for q, x in seen if q in a.final}


def decide(a: GroupNfa, target: Permutation, method: str = "bfs",
           max_degree: int = DEFAULT_MAX_DEGREE) -> dict:
    """Run one or both methods; ``both`` raises InvariantBreach on disagreement."""
    from .errors import InvariantBreach

    report: dict = {"method": method}
    if method in ("bfs", "both"):
        ok, word = rational_membership(a, target, max_degree)
        report["bfs"] = ok
        report["witness"] = [str(g) for g in word] if word is not None else None
    if method in ("subgroup", "both"):
        if not a.is_subgroup_form():
            if method == "subgroup":
                raise InputError("subgroup method needs initial = final = {q0}")
            report["subgroup"] = None
        else:
            group = subgroup_of(a)
            report["subgroup"] = group.contains(target)
            report["subgroup_order"] = group.order()
    decisions = [report[k] for k in ("bfs", "subgroup") if report.get(k) is not None]
    if len(set(decisions)) > 1:
        raise InvariantBreach(f"bfs and subgroup methods disagree: {report}")
    report["decision"] = decisions[0]
    return report
