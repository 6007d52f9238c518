"""Solution sets of [p]^-x2 [q]^x1 ([p][q])^x2 = [q] = [q]^x1 [p]^-x2 ([p][q])^x2.

For every pair of odd primes q < p up to --max-prime, sweeps x1, x2 over
[0, pq) and prints the residues (x1 mod q, x2 mod p) that solve it.
"""
import argparse
import itertools
import time

from finmember.reductions import lemma_equation_holds
from sympy import primerange


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-prime", type=int, default=11)
    args = ap.parse_args()
    for q, p in itertools.combinations(list(primerange(3, args.max_prime + 1)), 2):
        t = time.perf_counter()
        sols = sorted({(x1 % q, x2 % p) for x1 in range(p * q) for x2 in range(p * q)
                       if lemma_equation_holds(p, q, x1, x2)})
        print(f"q={q:2d} p={p:2d}  residues {sols}  ({time.perf_counter() - t:.2f}s)")


if __name__ == "__main__":
    main()
