"""Scan the exceptional-biased stream at one even d.

Every x in the stream makes (0, ..., 0, 1^k) a characteristic vector of
N_d(x; eps); the script reports the ones whose neighbor has no roots.

    python scripts/exceptional29.py --n 29 --k 5 --d 94
"""

import argparse

from unihunt.characteristic import exc_size
from unihunt.hunt import entry_for, exceptional_biased_stream
from unihunt.lattice import norm_counts
from unihunt.neighbors import spec_neighbor


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=29)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--d", type=int, default=94)
    args = ap.parse_args()

    total = 0
    for spec in exceptional_biased_stream(args.n, args.k, args.d):
        total += 1
        lat = spec_neighbor(spec)
        r = norm_counts(lat, 2)
        line = f"{spec}  r1={r[1]} r2={r[2]}"
        if r[1] == 0:
            line += f"  |Exc|={exc_size(lat)}"
            if r[2] == 0:
                line += f"  entry {entry_for(spec).to_line()}"
        print(line)
    print(f"{total} specs")


if __name__ == "__main__":
    main()
