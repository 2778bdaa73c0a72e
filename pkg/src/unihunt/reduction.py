"""LLL baseline and the randomized search for Z-bases of short vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import intmat
from .lattice import Lattice, short_vectors, sublattice_index

PREFILTER_PRIMES = (3, 5, 7, 11)


@dataclass(frozen=True)
class BasisSearchResult:
    """Outcome of ``reduce``: a Z-basis (lattice coords) or None on failure."""

    basis: tuple[tuple[int, ...], ...] | None
    achieved_bound: int | None
    tries_used: int
    seed: int

    @property
    def ok(self) -> bool:
        return self.basis is not None


def lll(lat: Lattice) -> tuple[list[list[int]], list[list[int]]]:
    """LLL-reduced basis (rows, lattice coords) and its Gram matrix, delta 0.99."""
    h, _, g = lat._reduced
    return [list(r) for r in h], g.tolist()


def basis_max_norm(lat: Lattice, basis) -> int:
    return max(lat.norm(v) for v in basis)


def _pack2(rows: np.ndarray) -> list[int]:
    bits = (rows % 2).astype(np.uint8)
    weights = [1 << j for j in range(rows.shape[1])]
    return [sum(w for w, b in zip(weights, r) if b) for r in bits.tolist()]


def is_unimodular_basis(rows) -> bool:
    """|det| = 1, with mod-2 and mod-p prefilters before the exact check."""
    rows = [list(map(int, r)) for r in rows]
    n = len(rows)
    if intmat.rank_mod2(_pack2(np.array(rows, dtype=object)), n) < n:
        return False
    for p in PREFILTER_PRIMES:
        if intmat.det_mod(rows, p) == 0:
            return False
    return abs(intmat.det(rows)) == 1


def reduce(lat: Lattice, b: int, t: int, seed: int = 0, assume_large_R: bool = False) -> BasisSearchResult:
    """Randomized search for a Z-basis made of vectors of norm <= b.

    Steps: S = vectors of norm <= b; give up unless S generates L; R =
    vectors of norm <= b-1; k0 = max(1, n - rank R) (or 1 with
    ``assume_large_R``); for k = k0..n, t tries drawing k vectors from S and
    n-k from R uniformly with replacement.
    """
    if b < 1 or t < 1:
        raise ValueError("need b >= 1 and t >= 1")
    n = lat.n
    vs = short_vectors(lat, b)
    s = vs.vectors
    if len(s) == 0 or sublattice_index(lat, s.tolist()) != 1:
        return BasisSearchResult(None, None, 0, seed)
    r = vs.upto(b - 1)
    rank_r = len(intmat.hnf(r.tolist())) if len(r) else 0
    k0 = 1 if assume_large_R else max(1, n - rank_r)
    rng = np.random.default_rng(seed)
    s2, r2 = _pack2(s), _pack2(r) if len(r) else []
    tries = 0
    for k in range(k0, n + 1):
        if n - k > 0 and len(r) == 0:
            continue
        for _ in range(t):
            tries += 1
            i = rng.integers(0, len(s), size=k)
            j = rng.integers(0, len(r), size=n - k) if n - k else np.zeros(0, dtype=np.int64)
            if intmat.rank_mod2([s2[a] for a in i] + [r2[a] for a in j], n) < n:
                continue
            rows = np.concatenate([s[i], r[j]]) if n - k else s[i]
            if is_unimodular_basis(rows.tolist()):
                basis = tuple(tuple(int(c) for c in v) for v in rows)
                return BasisSearchResult(basis, basis_max_norm(lat, basis), tries, seed)
    return BasisSearchResult(None, None, tries, seed)


def best_basis(lat: Lattice, t: int = 1000, seed: int = 0) -> tuple[tuple[int, ...], ...]:
    """LLL basis, improved by reduce(L, b, t) for b = 1, ..., m(e)-1.

    The first b that succeeds gives the smallest achievable m(e) among the
    attempts; if none succeeds the LLL basis is kept.
    """
    h, g = lll(lat)
    m = max(g[i][i] for i in range(lat.n))
    for b in range(1, m):
        res = reduce(lat, b, t, seed)
        if res.ok:
            return res.basis
    return tuple(tuple(r) for r in h)
