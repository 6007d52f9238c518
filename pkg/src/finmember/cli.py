"""Command-line front end.

Every subcommand prints one JSON report::

    {"problem", "decision", "certificate"?, "stats": {"elapsed_ms", ...},
     "oracle_agreement"?, "version", "instance_hash"}

Exit status: 0 decided, 1 decided "no" under --fail-on-no, 2 bad input,
3 a cap was exceeded, 4 two methods disagreed.

Default caps can be raised through the environment: FINMEMBER_MAX_DEGREE
(cf-membership and rational degree cap) and FINMEMBER_STATE_CAP (search states).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .automata import parse_dfa, parse_group_nfa
from .blackbox import BbCertificate, PermutationBlackBox, bb_exhaustive_decide, bb_subgroup_verify
from .bsgs import factor_as_slp, schreier_sims
from .cfmember import cf_membership, oracle_semantics
from .errors import CapExceeded, InputError, InvariantBreach
from .grammar import check_cfg_k, max_acyclic_hs, parse_grammar
from .instances import PROBLEMS, generate, parse_ghg, parse_group
from .intersection import barhillel_oracle, decide_intersection
from .knapsack import (
    KnapsackInstance, check_kronecker_equivalence, parse_knapsack, solve_2_knapsack,
    solve_exhaustive, solve_k_knapsack, solve_knapsack, solve_subset_sum,
)
from .perm import Permutation, parse_perm
from .rational import decide as rational_decide
from .reductions import (
    embed_z3_in_sym, parse_x3hs, reduce_product_membership_to_knapsack,
    reduce_x3hs_to_3knapsack, reduce_x3hs_to_subsetsum_z3, residue_solver, solve_x3hs,
    solve_z3_subsetsum, z3_subsetsum_as_permutations, ghg_membership_oracle,
)

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_CAP, EXIT_DISAGREE = 0, 1, 2, 3, 4


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}") from None


class _Run:
    """Collects the input files and timing for one report."""

    def __init__(self):
        self.hash = hashlib.sha256()
        self.t0 = time.perf_counter()

    def read(self, path: str) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        self.hash.update(data)
        return data.decode()

    def note(self, text: str) -> None:
        self.hash.update(text.encode())

    def report(self, problem: str, decision, **extra) -> dict:
        stats = extra.pop("stats", {})
        stats["elapsed_ms"] = round((time.perf_counter() - self.t0) * 1000, 3)
        out = {"problem": problem, "decision": decision}
        out.update(extra)
        out["stats"] = stats
        out["version"] = __version__
        out["instance_hash"] = self.hash.hexdigest()
        return out


def _agree(report: dict, *answers) -> None:
    ok = len(set(answers)) == 1
    report["oracle_agreement"] = ok
    if not ok:
        raise InvariantBreach(json.dumps(report))


# --- subcommands -----------------------------------------------------------------

def cmd_member(args, run: _Run) -> dict:
    gf = parse_group(run.read(args.group))
    run.note(args.elem)
    target = parse_perm(args.elem, gf.degree)
    group = schreier_sims(gf.generators, gf.degree)
    ok = group.contains(target)
    cert = None
    if ok:
        slp = factor_as_slp(group, target)
        cert = {"slp": [list(d) if isinstance(d, tuple) else d for d in slp.definitions]}
    return run.report("member", ok, certificate=cert,
                      stats={"order": group.order(), "base": [b + 1 for b in group.base]})


def cmd_rational(args, run: _Run) -> dict:
    nfa = parse_group_nfa(run.read(args.nfa))
    run.note(args.target)
    target = parse_perm(args.target, nfa.degree)
    rep = rational_decide(nfa, target, args.method, args.max_degree)
    out = run.report("rational", rep["decision"],
                     certificate={"word": rep.get("witness")} if rep.get("witness") else None,
                     stats={k: v for k, v in rep.items() if k in ("subgroup_order",)})
    if args.method == "both":
        out["oracle_agreement"] = True
    return out


def cmd_cfm(args, run: _Run) -> dict:
    g = parse_grammar(run.read(args.grammar))
    if g.degree is None:
        raise InputError("cfm needs a grammar over permutations (with a 'degree' line)")
    run.note(args.target)
    target = parse_perm(args.target, g.degree)
    res = cf_membership(g, target, max_degree=args.max_degree)
    cert = None
    if res.member:
        cert = {"tree": _tree_json(res.tree),
                "decorations": {".".join(map(str, p)) or "root": [str(d.g), str(d.h)]
                                for p, d in sorted(res.decorations.items())}}
    stats = {"iterations": res.fixed.iterations, "iteration_bound": res.fixed.bound,
             "orders": {a: o for a, o in res.fixed.history[-1].items()}}
    out = run.report("cfm", res.member, certificate=cert, stats=stats)
    if args.oracle:
        truth = target in oracle_semantics(g, max_degree=args.max_degree)[g.start]
        _agree(out, res.member, truth)
    return out


def _tree_json(t):
    if len(t.children) == 1:
        return [t.label, str(t.children[0])]
    return [t.label, _tree_json(t.children[0]), _tree_json(t.children[1])]


def cmd_cfgk(args, run: _Run) -> dict:
    g = parse_grammar(run.read(args.grammar))
    run.note(str(args.k))
    ok = check_cfg_k(g, args.k, "dp")
    out = run.report("cfgk", ok, stats={"max_acyclic_hs": max_acyclic_hs(g)})
    if args.oracle:
        _agree(out, ok, check_cfg_k(g, args.k, "certificate"))
    return out


def _knapsack_report(name: str, run: _Run, inst: KnapsackInstance, sol, oracle: bool, **stats) -> dict:
    out = run.report(name, sol is not None,
                     certificate={"exponents": list(sol)} if sol is not None else None,
                     stats={"n": inst.n, **stats})
    if oracle:
        _agree(out, sol is not None, solve_exhaustive(inst) is not None)
    return out


def cmd_subsetsum(args, run: _Run) -> dict:
    inst = parse_knapsack(run.read(args.instance), domain="binary")
    sol = solve_subset_sum(inst, args.method, cap=args.state_cap)
    return _knapsack_report("subsetsum", run, inst, sol, args.oracle, method=args.method)


def cmd_knapsack(args, run: _Run) -> dict:
    inst = parse_knapsack(run.read(args.instance))
    sol = solve_knapsack(inst, cap=args.state_cap)
    return _knapsack_report("knapsack", run, inst, sol, args.oracle)


def cmd_kknapsack(args, run: _Run) -> dict:
    inst = parse_knapsack(run.read(args.instance))
    run.note(str(args.k))
    sol = solve_k_knapsack(inst, args.k, cap=args.state_cap)
    return _knapsack_report("kknapsack", run, inst, sol, args.oracle, k=args.k)


def cmd_2knapsack(args, run: _Run) -> dict:
    inst = parse_knapsack(run.read(args.instance))
    if inst.n != 2:
        raise InputError("2knapsack needs exactly two factors")
    a1, a2 = inst.factors
    sol = solve_2_knapsack(a1, a2, inst.target)
    stats = {}
    if sol is not None and inst.degree ** 2 <= 400:
        stats["kronecker_identity"] = check_kronecker_equivalence(a1, a2, inst.target, *sol)
    return _knapsack_report("2knapsack", run, inst, sol, args.oracle, **stats)


def cmd_reduce(args, run: _Run) -> dict:
    text = run.read(args.instance)
    if args.kind == "x3hs-subsetsum":
        inst = parse_x3hs(text)
        target, items = reduce_x3hs_to_subsetsum_z3(inst)
        perm_inst = z3_subsetsum_as_permutations(target, items)
        out = run.report("reduce", None, instance={
            "target": list(target.entries), "items": [list(x.entries) for x in items],
            "permutation_target": str(embed_z3_in_sym(target)),
            "permutation_items": [str(a) for a in perm_inst.factors]})
        if args.verify:
            a = solve_x3hs(inst) is not None
            b = solve_z3_subsetsum(target, items) is not None
            c = solve_subset_sum(perm_inst) is not None
            out["decision"] = a
            _agree(out, a, b, c)
        return out
    if args.kind == "x3hs-3knapsack":
        inst = parse_x3hs(text)
        red = reduce_x3hs_to_3knapsack(inst)
        out = run.report("reduce", None, instance={
            "g": str(red.g), "g1": str(red.gens[0]), "g2": str(red.gens[1]), "g3": str(red.gens[2])},
            stats=red.report())
        if args.verify:
            hs = solve_x3hs(inst)
            rs = residue_solver(red)
            out["decision"] = hs is not None
            if hs is not None:
                z = red.exponents_for(hs)
                out["certificate"] = {"exponents": list(z), "verified": red.verify(z)}
                _agree(out, True, rs is not None, red.verify(z))
            else:
                _agree(out, False, rs is not None)
        return out
    if args.kind == "ghg-knapsack":
        gi = parse_ghg(text)
        inst = reduce_product_membership_to_knapsack(gi.gen_g, gi.gen_h, gi.target)
        out = run.report("reduce", None, instance={"target": str(inst.target),
                                                   "factors": [str(a) for a in inst.factors]})
        if args.verify:
            sol = solve_knapsack(inst)
            out["decision"] = sol is not None
            _agree(out, sol is not None, ghg_membership_oracle(gi.gen_g, gi.gen_h, gi.target))
        return out
    raise InputError(f"unknown reduction {args.kind!r}")


def cmd_intersect(args, run: _Run) -> dict:
    g = parse_grammar(run.read(args.grammar))
    dfas = [parse_dfa(run.read(p)) for p in args.dfa]
    ok, pi = decide_intersection(dfas, g)
    out = run.report("intersect", ok, certificate={"permutation": str(pi)} if ok else None,
                     stats={"dfas": len(dfas), "states": sum(d.n_states for d in dfas)})
    if args.oracle:
        _agree(out, ok, barhillel_oracle(dfas, g))
    return out


def cmd_blackbox(args, run: _Run) -> dict:
    gf = parse_group(run.read(args.group))
    run.note(args.elem)
    target = parse_perm(args.elem, gf.degree)
    box = PermutationBlackBox(gf.degree, redundant=args.redundant)
    gens = [box.encode(g) for g in gf.generators]
    code = box.encode(target)
    group = schreier_sims(gf.generators, gf.degree)
    stats = {"b": box.b, "c": box.c, "certificate_bound": (box.b + 1) ** 2}
    if group.contains(target):
        slp = factor_as_slp(group, target)
        verified = bb_subgroup_verify(box, code, gens, BbCertificate(slp))
        cert = {"slp_length": len(slp), "verified": verified}
    else:
        cert = None
    exhaustive = bb_exhaustive_decide(box, code, gens)
    out = run.report("blackbox-demo", exhaustive, certificate=cert, stats=stats)
    _agree(out, exhaustive, group.contains(target), cert["verified"] if cert else False)
    return out


def cmd_gen(args, run: _Run):
    text = generate(args.problem, args.degree, args.n, args.seed, args.planted)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return None


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finmember", description=__doc__.split("\n\n")[0])
    p.add_argument("--fail-on-no", action="store_true", help="exit 1 when the decision is no")
    p.add_argument("--quiet", action="store_true", help="print nothing, report through the exit code")
    p.add_argument("--json", dest="indent", action="store_const", const=None, default=2,
                   help="compact single-line JSON")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    max_degree = _env_int("FINMEMBER_MAX_DEGREE", 5)
    state_cap = _env_int("FINMEMBER_STATE_CAP", 2_000_000)

    s = sub.add_parser("member", help="subgroup membership via Schreier-Sims")
    s.add_argument("--group", required=True)
    s.add_argument("--elem", required=True)
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("rational", help="rational subset membership")
    s.add_argument("--nfa", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--method", choices=("bfs", "subgroup", "both"), default="bfs")
    s.add_argument("--max-degree", type=int, default=max(max_degree, 8))
    s.set_defaults(func=cmd_rational)

    s = sub.add_parser("cfm", help="context-free membership")
    s.add_argument("--grammar", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--oracle", action="store_true", help="cross-check with the Kleene fixpoint")
    s.add_argument("--max-degree", type=int, default=max_degree)
    s.set_defaults(func=cmd_cfm)

    s = sub.add_parser("cfgk", help="is every acyclic derivation tree of HS <= k")
    s.add_argument("--grammar", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="also run the certificate search")
    s.set_defaults(func=cmd_cfgk)

    for name, func, extra in (("subsetsum", cmd_subsetsum, "method"), ("knapsack", cmd_knapsack, None),
                              ("kknapsack", cmd_kknapsack, "k"), ("2knapsack", cmd_2knapsack, None)):
        s = sub.add_parser(name)
        s.add_argument("--instance", required=True)
        s.add_argument("--oracle", action="store_true", help="cross-check by exhaustive search")
        s.add_argument("--state-cap", type=int, default=state_cap)
        if extra == "method":
            s.add_argument("--method", choices=("dp", "mitm", "exhaustive"), default="dp")
        if extra == "k":
            s.add_argument("--k", type=int, required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("reduce", help="run a hardness reduction")
    s.add_argument("kind", choices=("x3hs-subsetsum", "x3hs-3knapsack", "ghg-knapsack"))
    s.add_argument("--instance", required=True)
    s.add_argument("--verify", action="store_true", help="brute-force both sides")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("intersect", help="group DFAs intersected with a CFG")
    s.add_argument("--grammar", required=True)
    s.add_argument("--dfa", action="append", default=[])
    s.add_argument("--oracle", action="store_true", help="cross-check with Bar-Hillel")
    s.set_defaults(func=cmd_intersect)

    s = sub.add_parser("gen", help="write a seeded random instance")
    s.add_argument("--problem", choices=PROBLEMS, required=True)
    s.add_argument("--degree", type=int, default=4,
                   help="degree m (ground-set size for x3hs, states for dfa)")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--planted", action="store_true", help="plant a solution")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("blackbox-demo", help="box a permutation group and verify a certificate")
    s.add_argument("--group", required=True)
    s.add_argument("--elem", required=True)
    s.add_argument("--redundant", action="store_true")
    s.set_defaults(func=cmd_blackbox)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    run = _Run()
    code = EXIT_OK
    try:
        report = args.func(args, run)
    except InputError as exc:
        report, code = {"error": str(exc), "kind": "input"}, EXIT_INPUT
    except CapExceeded as exc:
        report, code = {"error": str(exc), "kind": "cap"}, EXIT_CAP
    except InvariantBreach as exc:
        report, code = {"error": str(exc), "kind": "disagreement", "oracle_agreement": False}, EXIT_DISAGREE
    if report is None:
        return code
    if code == EXIT_OK and args.fail_on_no and report.get("decision") is False:
        code = EXIT_NO
    if not args.quiet:
        print(json.dumps(report, indent=args.indent, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
