"""Iteration counts of the subgroup fixed point on random grammars.

Prints a histogram of strict growth steps against the bound 2|N| floor(log2 m!)
and checks each fixed point against the Kleene oracle.
"""
import argparse
import collections
import random
import time

from finmember.cfmember import delta, fixed_point, oracle_semantics
from finmember.instances import random_cfg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--grammars", type=int, default=200)
    ap.add_argument("--max-productions", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    hist = collections.Counter()
    orders = collections.Counter()
    bad = 0
    t = time.perf_counter()
    for _ in range(args.grammars):
        g = random_cfg(rng, args.degree, 3, args.max_productions)
        fp = fixed_point(g)
        hist[fp.iterations] += 1
        orders[fp.subgroups[g.start].order()] += 1
        bad += delta(g, fp.subgroups) != oracle_semantics(g)
    print(f"{args.grammars} grammars over S_{args.degree} in {time.perf_counter() - t:.1f}s, "
          f"oracle disagreements: {bad}")
    print("growth steps:", dict(sorted(hist.items())))
    print("start subgroup orders in G x G^:", dict(sorted(orders.items())))


if __name__ == "__main__":
    main()
