"""Classify unimodular lattices of small rank two ways and compare.

The 2-neighbor closure gives every class with its group order; the
non-biased neighbor search then has to find exactly the classes with no
norm 1 vectors, with matching reduced masses.

    python scripts/classify_small.py 8 12 14 16
"""

import argparse
import time
from fractions import Fraction

from unihunt.hunt import RunConfig, ne, verify
from unihunt.oracle import classify
from unihunt.roots import RootSystem


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("ranks", type=int, nargs="+")
    ap.add_argument("--d-max", type=int, default=40)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    for n in args.ranks:
        t = time.perf_counter()
        oracle = classify(n)
        print(f"rank {n}: {len(oracle.classes)} classes, total mass {oracle.mass}")
        for c in sorted(oracle.classes, key=lambda c: (c.r1, c.root)):
            mu = Fraction(RootSystem.parse(c.root).weyl_order(), c.order)
            print(f"  {c.root:<12} even={int(c.even)} r1={c.r1:<3} |O|={c.order}  mu={mu}")
        table = oracle.mass_table()
        res = ne(n, table, RunConfig(subcommand="ne", n=n, d_max=args.d_max, threads=args.threads))
        for e in res.entries:
            print(f"  found {e.to_line()}")
        print(f"  search complete: {res.complete}; {verify(res.entries, table)}")
        print(f"  {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
