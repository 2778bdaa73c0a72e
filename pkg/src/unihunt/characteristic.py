"""Characteristic vectors, exceptional lattices, even parts and companions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import intmat
from .lattice import Lattice, LatticeError, coset_vectors, is_even, short_vectors

EXC_BOUND = 7  # Exc(L): characteristic vectors of norm < 8


@dataclass(frozen=True)
class CharVectorReport:
    """Characteristic vectors of norm <= bound, one per +-pair.

    ``exc_size`` counts both signs of the vectors of norm < 8.
    """

    bound: int
    vectors: tuple[tuple[int, ...], ...]
    norms: tuple[int, ...]
    exc_size: int
    min_char_norm: int | None


def characteristic_class(lat: Lattice) -> list[int]:
    """A 0/1 vector w (lattice coords) with w.v = v.v mod 2 for all v."""
    if is_even(lat):
        raise LatticeError("even lattice: characteristic vectors are 2L")
    g = lat.gram
    return intmat.solve_mod2(g, [g[i][i] for i in range(lat.n)])


def _canon(v: tuple[int, ...]) -> tuple[int, ...]:
    for c in v:
        if c:
            return v if c > 0 else tuple(-x for x in v)
    return v


def characteristic_vectors(lat: Lattice, bound: int = EXC_BOUND) -> CharVectorReport:
    """Enumerate the coset w + 2L below ``bound``.

    Writing xi = 2y with y in w/2 + L, the search is a short-vector search
    in a shifted lattice with bound/4.
    """
    w = characteristic_class(lat)
    shift = [Fraction(c, 2) for c in w]
    num, den, norm_num, _ = coset_vectors(lat, shift, Fraction(bound, 4))
    # den = 2, so num is xi itself and norm_num its norm
    assert den in (1, 2)
    scale = 2 // den
    reps = {}
    for xi, nx in zip(num.tolist(), norm_num.tolist()):
        reps[_canon(tuple(scale * c for c in xi))] = int(nx) * scale * scale
    items = sorted(reps.items(), key=lambda kv: (kv[1], kv[0]))
    vecs = tuple(k for k, _ in items)
    norms = tuple(v for _, v in items)
    exc = 2 * sum(1 for v in norms if v <= EXC_BOUND)
    return CharVectorReport(bound, vecs, norms, exc, min(norms) if norms else None)


def exc_size(lat: Lattice) -> int:
    return characteristic_vectors(lat, EXC_BOUND).exc_size


def is_exceptional(lat: Lattice) -> bool:
    return exc_size(lat) > 0


def is_characteristic(lat: Lattice, xi) -> bool:
    g = lat.gram
    n = lat.n
    return all((sum(g[i][j] * xi[j] for j in range(n)) - g[i][i]) % 2 == 0 for i in range(n))


def kernel_mod2(f: list[int]) -> list[list[int]]:
    """Basis rows of {v in Z^n : f.v = 0 mod 2}."""
    n = len(f)
    f = [c % 2 for c in f]
    if not any(f):
        return intmat.identity(n)
    rows = [[f[i]] + [int(i == j) for j in range(n)] for i in range(n)]
    rows.append([2] + [0] * n)
    return [r[1:] for r in intmat.hnf(rows) if r[0] == 0]


def even_part_basis(lat: Lattice) -> list[list[int]]:
    """Basis rows (lattice coords) of {v in L : v.v even}."""
    return kernel_mod2([lat.gram[i][i] for i in range(lat.n)])


def even_part(lat: Lattice) -> Lattice:
    """Index 2 even sublattice; an even lattice is returned unchanged."""
    if is_even(lat):
        return lat
    return lat.transform(even_part_basis(lat))


def half_overlattice(lat: Lattice, sub: list[list[int]], c2: list[int]) -> Lattice:
    """sub + Z c2/2 for a sublattice basis ``sub`` (rows, L's coordinates)."""
    gens = [[2 * x for x in r] for r in sub] + [list(c2)]
    b = intmat.hnf(gens)
    g = intmat.congruent(b, lat.gram)
    if any(x % 4 for r in g for x in r):
        raise LatticeError("overlattice is not integral")
    emb = None
    if lat.embedding is not None:
        e, den = lat.embedding
        emb = (intmat.matmul(b, e), 2 * den)
    return Lattice([[x // 4 for x in r] for r in g], embedding=emb)


def companions(lat: Lattice) -> tuple[Lattice, Lattice]:
    """The two other odd unimodular lattices containing the even part of L."""
    n = lat.n
    if n % 8 != 4:
        raise LatticeError("companions need n = 4 mod 8")
    if not lat.is_unimodular or is_even(lat):
        raise LatticeError("companions need an odd unimodular lattice")
    ev = even_part_basis(lat)
    w = characteristic_class(lat)
    j = next(i for i in range(n) if lat.gram[i][i] % 2)
    bj = [2 * int(i == j) for i in range(n)]
    return half_overlattice(lat, ev, w), half_overlattice(lat, ev, [a + b for a, b in zip(w, bj)])


def singular_companion(lat: Lattice) -> Lattice | None:
    """The companion with norm 1 vectors, if any (L exceptional, r1(L) = 0)."""
    for c in companions(lat):
        if len(short_vectors(c, 1)):
            return c
    return None


def lemma62_bound(n: int, p: int) -> Fraction:
    """Lower bound (4n^3 - n)/(3p^2) for short characteristic norms."""
    return Fraction(4 * n**3 - n, 3 * p * p)
