"""Exact integral lattices: Gram matrices, short vectors, indices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import intmat
from ._kernels import fp_enumerate, fp_quadratic_form

INFINITE = None  # marker returned by sublattice_index for non-full rank


class LatticeError(ValueError):
    """Rejected lattice input (not symmetric, not positive definite...)."""


def _tupled(m: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class Lattice:
    """Integral lattice given by an exact Gram matrix.

    ``embedding`` (optional) is a pair (B, den): the rows of B/den form a
    basis of the lattice inside Q^n with the standard inner product.
    """

    gram: tuple[tuple[int, ...], ...]
    embedding: tuple[tuple[tuple[int, ...], ...], int] | None = field(default=None, compare=False)

    def __post_init__(self):
        g = _tupled(self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(r) != n for r in g):
            raise LatticeError("Gram matrix is not square")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise LatticeError("Gram matrix is not symmetric")
        for k in range(1, n + 1):
            if intmat.det([r[:k] for r in g[:k]]) <= 0:
                raise LatticeError("Gram matrix is not positive definite")
        if self.embedding is not None:
            b, den = self.embedding
            b = _tupled(b)
            object.__setattr__(self, "embedding", (b, int(den)))
            bbt = intmat.matmul(b, intmat.transpose(b))
            if any(bbt[i][j] != den * den * g[i][j] for i in range(n) for j in range(n)):
                raise LatticeError("embedding does not match Gram matrix")

    @classmethod
    def from_basis(cls, rows: Sequence[Sequence[int]], den: int = 1) -> "Lattice":
        """Lattice spanned by rows/den in Q^n (rows must be a basis)."""
        bbt = intmat.matmul(rows, intmat.transpose(rows))
        d2 = den * den
        if any(x % d2 for r in bbt for x in r):
            raise LatticeError("lattice is not integral")
        return cls([[x // d2 for x in r] for r in bbt], embedding=(rows, den))

    @property
    def n(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return intmat.det(self.gram)

    @property
    def is_unimodular(self) -> bool:
        return self.det == 1

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    def inner(self, u: Sequence[int], v: Sequence[int]) -> int:
        g = self.gram
        return sum(u[i] * sum(g[i][j] * v[j] for j in range(len(v))) for i in range(len(u)))

    def norm(self, v: Sequence[int]) -> int:
        return self.inner(v, v)

    def transform(self, h: Sequence[Sequence[int]]) -> "Lattice":
        """Same lattice in the basis given by the rows of h (lattice coords)."""
        g = intmat.congruent(h, self.gram)
        emb = None
        if self.embedding is not None:
            b, den = self.embedding
            emb = (intmat.matmul(h, b), den)
        return Lattice(g, embedding=emb)

    def coordinates(self, v: Sequence[int | Fraction]) -> list[int] | None:
        """Lattice coordinates of an ambient vector v, or None if v is not in L."""
        if self.embedding is None:
            raise LatticeError("lattice has no embedding")
        b, den = self.embedding
        c = intmat.solve_rational(b, [Fraction(x) * den for x in v])
        if any(x.denominator != 1 for x in c):
            return None
        return [int(x) for x in c]

    @cached_property
    def _reduced(self) -> tuple[list[list[int]], list[list[int]], np.ndarray]:
        """LLL transform H, its inverse, and the reduced Gram (int64)."""
        h, g = intmat.lll_gram(self.gram)
        return h, intmat.inverse_unimodular(h), np.array(g, dtype=np.int64)

    def short_vectors(self, bound: int) -> "VectorSet":
        return short_vectors(self, bound)


@dataclass(frozen=True)
class VectorSet:
    """Representatives of {+-v} for all nonzero v with v.v <= bound.

    ``vectors`` is an (m, n) int64 array in lattice coordinates, each row
    with first nonzero coordinate positive, sorted by norm then
    lexicographically; ``norms`` holds the matching norms.
    """

    bound: int
    vectors: np.ndarray
    norms: np.ndarray

    def __len__(self) -> int:
        return len(self.norms)

    def of_norm(self, k: int) -> np.ndarray:
        return self.vectors[self.norms == k]

    def upto(self, k: int) -> np.ndarray:
        return self.vectors[self.norms <= k]


def _canonical_sign(vecs: np.ndarray) -> np.ndarray:
    if len(vecs) == 0:
        return vecs
    nz = vecs != 0
    first = nz.argmax(axis=1)
    lead = vecs[np.arange(len(vecs)), first]
    return vecs * np.where(lead < 0, -1, 1)[:, None]


def _sort_vectors(vecs: np.ndarray, norms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(vecs) == 0:
        return vecs, norms
    keys = [vecs[:, j] for j in range(vecs.shape[1] - 1, -1, -1)] + [norms]
    order = np.lexsort(keys)
    return vecs[order], norms[order]


def _norms(vecs: np.ndarray, gram: np.ndarray) -> np.ndarray:
    if len(vecs) == 0:
        return np.zeros(0, dtype=np.int64)
    if np.abs(vecs).max() * np.abs(gram).max() * vecs.shape[1] ** 2 > 2**40:
        g = gram.astype(object)
        v = vecs.astype(object)
        return np.array([int(x) for x in np.einsum("ij,jk,ik->i", v, g, v)], dtype=np.int64)
    return np.einsum("ij,jk,ik->i", vecs, gram, vecs)


def short_vectors(lat: Lattice, bound: int) -> VectorSet:
    """Fincke-Pohst enumeration of R_{<=bound}(L) up to sign.

    Enumerates on an LLL-reduced Gram matrix, maps back to the input
    basis and keeps only vectors whose exact norm is <= bound.
    """
    if bound < 1:
        raise LatticeError("bound must be >= 1")
    n = lat.n
    h, _, g_red = lat._reduced
    q = fp_quadratic_form(g_red.astype(np.float64))
    raw, _ = fp_enumerate(q, float(bound), np.zeros(n), True, 0)
    vecs = raw @ np.array(h, dtype=np.int64) if len(raw) else raw
    norms = _norms(vecs, lat.array)
    keep = (norms <= bound) & (norms > 0)
    vecs = _canonical_sign(vecs[keep])
    return VectorSet(bound, *_sort_vectors(vecs, norms[keep]))


def coset_vectors(lat: Lattice, shift: Sequence[Fraction], bound: Fraction | int, limit: int = 0):
    """Vectors v = shift + u (u in L, lattice coords) with v.v <= bound.

    Returns (num, den, norm_num, truncated): the vectors are the rows of
    num/den and their exact norms are norm_num/den^2. Used for
    characteristic vectors and coset minima.
    """
    n = lat.n
    h, hinv, g_red = lat._reduced
    shift = [Fraction(c) for c in shift]
    den = 1
    for c in shift:
        den = den * c.denominator // math.gcd(den, c.denominator)
    # shift in reduced coordinates: c' = c H^{-1}
    c_red = [sum(shift[i] * hinv[i][j] for i in range(n)) for j in range(n)]
    base = [math.floor(x) for x in c_red]
    off = np.array([int((x - b) * den) for x, b in zip(c_red, base)], dtype=np.int64)
    q = fp_quadratic_form(g_red.astype(np.float64))
    # y = frac + z with y.G.y <= bound, i.e. z near -frac
    raw, trunc = fp_enumerate(q, float(bound), -off / den, False, limit)
    if len(raw) == 0:
        empty = np.zeros((0, n), dtype=np.int64)
        return empty, den, np.zeros(0, dtype=np.int64), trunc
    num = (raw * den + off) @ np.array(h, dtype=np.int64)
    norm_num = _norms(num, lat.array)
    keep = norm_num <= bound * den * den
    return num[keep], den, norm_num[keep], trunc


def norm_counts(lat: Lattice, bound: int) -> dict[int, int]:
    """r_k for 0 < k <= bound, counting both signs."""
    vs = short_vectors(lat, bound)
    return {k: 2 * int((vs.norms == k).sum()) for k in range(1, bound + 1)}


def sublattice_index(lat: Lattice, gens) -> int | None:
    """[L : span(gens)] for gens in lattice coordinates; None if not full rank."""
    rows = [list(map(int, g)) for g in gens]
    if not rows:
        return INFINITE
    h = intmat.hnf(rows)
    if len(h) < lat.n:
        return INFINITE
    # full rank echelon form is upper triangular
    d = 1
    for i, r in enumerate(h):
        d *= r[i]
    return d


def is_even(lat: Lattice) -> bool:
    return all(lat.gram[i][i] % 2 == 0 for i in range(lat.n))


def rank(vectors: Sequence[Sequence[int]]) -> int:
    return len(intmat.hnf(vectors))


def identity_lattice(n: int) -> Lattice:
    return Lattice(intmat.identity(n), embedding=(intmat.identity(n), 1))


def parse_gram(text: str) -> Lattice:
    """Parse the Gram text format: ``n`` then n rows of n integers."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise LatticeError("line 1: empty Gram file")
    try:
        n = int(lines[0].split()[0])
    except ValueError:
        raise LatticeError(f"line 1: expected rank, got {lines[0]!r}") from None
    if len(lines) < n + 1:
        raise LatticeError(f"line {len(lines) + 1}: expected {n} matrix rows, got {len(lines) - 1}")
    rows = []
    for k, ln in enumerate(lines[1 : n + 1], start=2):
        try:
            row = [int(x) for x in ln.split()]
        except ValueError:
            raise LatticeError(f"line {k}: non-integer entry") from None
        if len(row) != n:
            raise LatticeError(f"line {k}: expected {n} entries, got {len(row)}")
        rows.append(row)
    return Lattice(rows)


def format_gram(lat: Lattice) -> str:
    lines = [str(lat.n)] + [" ".join(str(x) for x in row) for row in lat.gram]
    return "\n".join(lines) + "\n"
