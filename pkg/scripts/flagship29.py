"""Invariants of N_59(1, 2, ..., 29), the first root-free class found in rank 29.

    python scripts/flagship29.py [--aut]

The automorphism group search takes a couple of minutes, so it is opt-in.
"""

import argparse
import time

from unihunt.bv import bv
from unihunt.characteristic import characteristic_vectors
from unihunt.isometry import aut_order
from unihunt.lattice import norm_counts
from unihunt.neighbors import neighbor
from unihunt.reduction import best_basis, reduce


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--aut", action="store_true", help="also compute |O(L)|")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    t = time.perf_counter()
    lat = neighbor(59, tuple(range(1, 30)))
    print(f"unimodular: {lat.is_unimodular}")
    print("short vectors:", norm_counts(lat, 3))
    rep = characteristic_vectors(lat, 7)
    print(f"|Exc| = {rep.exc_size}")
    inv = bv(lat)
    print(f"BV {inv.hex}: {inv.vertices} vertices, {inv.edges} edges, {inv.arrows} ones in A")
    res = reduce(lat, 3, 1000, seed=args.seed)
    print(f"norm 3 basis: {res.ok} after {res.tries_used} tries")
    if args.aut:
        a = aut_order(lat, best_basis(lat, 200, args.seed))
        print(f"|O(L)| = {a.order}, reduced mass {a.reduced_mass}")
    print(f"{time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
