"""Cyclic d-neighbors of Z^n and the combinatorics of normalized lines."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import intmat
from .lattice import Lattice, LatticeError
from .roots import RootSystem, root_system_of_vectors


class LiftError(ValueError):
    """No lift x' exists for the given (d, x) (x not primitive mod d)."""


@dataclass(frozen=True)
class NeighborSpec:
    """A triple (d, x, eps) naming the cyclic neighbor N_d(x; eps) of Z^n."""

    d: int
    x: tuple[int, ...]
    eps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.eps not in (0, 1):
            raise ValueError("eps must be 0 or 1")
        if self.d % 2 and self.eps:
            raise ValueError("eps must be 0 for odd d")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def index(self) -> int:
        return self.x.count(1)

    @property
    def end(self) -> int:
        if self.d % 2:
            return 0
        return self.x.count(self.d // 2)

    @property
    def type(self) -> tuple[int, ...]:
        """Multiplicity partition of the coordinates, largest first."""
        return tuple(sorted(Counter(self.x).values(), reverse=True))

    @property
    def normalized(self) -> bool:
        return is_normalized(self.d, self.x)

    def __str__(self) -> str:
        body = f"{self.d}:{','.join(map(str, self.x))}"
        return body if self.d % 2 else f"{body}:{self.eps}"

    @classmethod
    def parse(cls, text: str) -> "NeighborSpec":
        parts = text.strip().split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad neighbor spec {text!r}")
        d = int(parts[0])
        x = tuple(int(v) for v in parts[1].split(","))
        eps = int(parts[2]) if len(parts) == 3 else 0
        if d % 2 == 0 and len(parts) != 3:
            raise ValueError(f"even d requires eps in {text!r}")
        return cls(d, x, eps)


def _e(d: int) -> int:
    return 1 if d % 2 else 2


def is_isotropic(d: int, x: Sequence[int]) -> bool:
    return sum(v * v for v in x) % (_e(d) * d) == 0


def _unit_combination(d: int, x: Sequence[int]) -> list[int]:
    """Coefficients a with a.x = 1 mod d, supported on one coordinate if possible."""
    n = len(x)
    for j, v in enumerate(x):
        if math.gcd(v, d) == 1:
            a = [0] * n
            a[j] = pow(v, -1, d) if d > 1 else 1
            return a
    # running xgcd: acc = d*k + coef.x at every step
    coef = [0] * n
    acc = d
    for j, v in enumerate(x):
        acc, s, t = intmat.xgcd(acc, v)
        coef = [s * c for c in coef]
        coef[j] += t
    if acc != 1:
        raise LiftError(f"x is not primitive modulo {d}")
    return [c % d for c in coef]


def lift(d: int, x: Sequence[int], eps: int = 0) -> tuple[int, ...]:
    """x' = x + d*t*a with x' = x mod d and x'.x' = 0 mod d^2.

    For even d the representative also satisfies 2x'.x = x.x + eps*d^2
    mod 2d^2. Here a.x = 1 mod d; a is a multiple of a unit vector when
    some coordinate is invertible mod d.
    """
    x = [int(v) for v in x]
    if d == 1:
        return tuple(x)
    if not is_isotropic(d, x):
        raise LiftError(f"x is not {d}-isotropic")
    a = _unit_combination(d, x)
    ax = sum(p * q for p, q in zip(a, x))
    xx = sum(v * v for v in x)
    if d % 2:
        m = xx // d
        # x'.x' = d*(m + 2t*ax) mod d^2
        t = (-m * pow(2 * ax, -1, d)) % d
    else:
        h = d // 2
        m = xx // (2 * d)
        # x'.x' = 2d*(m + t*ax) mod d^2 and ax is odd
        t = (-m * pow(ax, -1, h)) % h if h > 1 else 0
        xp = [v + d * t * c for v, c in zip(x, a)]
        if epsilon(d, x, xp) != eps:
            t += h
    xp = tuple(v + d * t * c for v, c in zip(x, a))
    assert sum(v * v for v in xp) % (d * d) == 0
    return xp


def epsilon(d: int, x: Sequence[int], xp: Sequence[int]) -> int:
    """The eps with 2x'.x = x.x + eps*d^2 mod 2d^2 (0 for odd d)."""
    if d % 2:
        return 0
    r = (2 * sum(p * q for p, q in zip(xp, x)) - sum(v * v for v in x)) % (2 * d * d)
    if r % (d * d):
        raise LiftError("x' is not a valid lift")
    return r // (d * d)


def m_basis(d: int, x: Sequence[int]) -> list[list[int]]:
    """Basis (rows) of M_d(x) = {v : v.x = 0 mod d}."""
    n = len(x)
    if d == 1:
        return intmat.identity(n)
    if all(v % d == 0 for v in x):
        raise LatticeError("x is zero modulo d")
    rows = [[int(x[i]) % d] + [int(i == j) for j in range(n)] for i in range(n)]
    rows.append([d] + [0] * n)
    h = intmat.hnf(rows)
    # first echelon row carries the gcd in column 0; the rest span the kernel
    return [r[1:] for r in h if r[0] == 0]


def m_lattice(d: int, x: Sequence[int]) -> Lattice:
    return Lattice.from_basis(m_basis(d, x))


def neighbor(d: int, x: Sequence[int], eps: int = 0, reduce: bool = True) -> Lattice:
    """The unimodular neighbor N_d(x; eps) = M_d(x) + Z x'/d.

    The basis is the HNF of d*M_d(x) together with x', divided by d; with
    ``reduce`` it is then LLL-reduced (embedding kept).
    """
    if d % 2:
        eps = 0
    xp = lift(d, x, eps)
    gens = [[d * v for v in r] for r in m_basis(d, x)] + [list(xp)]
    b = intmat.hnf(gens)
    lat = Lattice.from_basis(b, d)
    if lat.det != 1:
        raise LatticeError("neighbor is not unimodular")
    if reduce:
        h, _, _ = lat._reduced
        lat = lat.transform(h)
    return lat


def spec_neighbor(spec: NeighborSpec, reduce: bool = True) -> Lattice:
    return neighbor(spec.d, spec.x, spec.eps, reduce)


# -- normalized pairs -------------------------------------------------------


def _fold(v: int, d: int) -> int:
    r = v % d
    return min(r, d - r)


def is_normalized(d: int, x: Sequence[int]) -> bool:
    if not x or x[0] != 1:
        return False
    if any(x[i] > x[i + 1] for i in range(len(x) - 1)) or 2 * x[-1] > d:
        return False
    counts = Counter(x)
    m1 = counts[1]
    return all(c <= m1 for v, c in counts.items() if 2 * v < d)


def rescale(d: int, x: Sequence[int], a: int) -> tuple[int, ...]:
    """Sorted folded residues of a^{-1} x; a must be a unit mod d."""
    if d == 1:
        return tuple(1 for _ in x)
    inv = pow(a, -1, d)
    return tuple(sorted(_fold(inv * v, d) for v in x))


def normalize(d: int, x: Sequence[int]) -> tuple[NeighborSpec, int] | None:
    """Normalized representative of the line of x, with the unit a used.

    Coordinates are grouped into classes +-r mod d. Among classes coprime to
    d of maximal size the smallest representative a is chosen, and the
    result is fold(a^{-1} x) sorted. Returns None when every coprime class
    is strictly smaller than some other class below d/2.
    """
    if d == 1:
        return NeighborSpec(1, tuple(1 for _ in x)), 1
    folded = [_fold(v, d) for v in x]
    if any(v == 0 for v in folded):
        return None
    counts = Counter(folded)
    units = [v for v in counts if math.gcd(v, d) == 1]
    if not units:
        return None
    best = max(counts[v] for v in units)
    if any(c > best for v, c in counts.items() if 2 * v < d):
        return None
    a = min(v for v in units if counts[v] == best)
    return NeighborSpec(d, rescale(d, folded, a)), a


def _value_range(d: int) -> range:
    # admissible middle values 2 <= v < d/2
    return range(2, (d + 1) // 2)


def _distinct_perms(parts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations of ``parts`` in lexicographic order."""
    a = sorted(parts)
    while True:
        yield tuple(a)
        i = len(a) - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = len(a) - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1 :] = reversed(a[i + 1 :])


def enumerate_normalized(n: int, d: int, partition: Sequence[int], e: int = 0) -> Iterator[tuple[int, ...]]:
    """All normalized x of type partition + e, index n_1 and end e.

    Order: middle residue sets in lexicographic order, then multiplicity
    assignments in lexicographic order. At d = 2 the only normalized vector
    is 1^n, emitted for partition (n,) with e = 0.
    """
    parts = sorted((int(p) for p in partition), reverse=True)
    if sum(parts) + e != n or not parts or parts[-1] < 1:
        raise ValueError("partition plus end must sum to n")
    if e and d % 2:
        return
    if d == 2:
        if parts == [n] and e == 0:
            yield tuple([1] * n)
        return
    if d == 1:
        return
    n1, rest = parts[0], parts[1:]
    tail = [d // 2] * e
    for values in itertools.combinations(_value_range(d), len(rest)):
        for mults in _distinct_perms(rest):
            x = [1] * n1
            for v, m in zip(values, mults):
                x.extend([v] * m)
            yield tuple(x + tail)


def count_normalized(d: int, partition: Sequence[int], e: int = 0) -> int:
    parts = sorted(partition, reverse=True)
    if d == 2:
        return int(len(parts) == 1 and e == 0)
    if e and d % 2:
        return 0
    rest = parts[1:]
    perms = math.factorial(len(rest))
    for c in Counter(rest).values():
        perms //= math.factorial(c)
    return math.comb(len(_value_range(d)), len(rest)) * perms


def line_equivalents(d: int, x: Sequence[int]) -> list[tuple[int, ...]]:
    """The normalized vectors whose lines are O(I_n)-equivalent to that of x."""
    counts = Counter(x)
    m1 = counts[1]
    out = []
    for i in range(1, d // 2 + 1):
        if counts[i] == m1 and math.gcd(i, d) == 1:
            out.append(rescale(d, x, i))
    return out


def is_line_leader(d: int, x: Sequence[int]) -> bool:
    x = tuple(x)
    return all(y <= x for y in line_equivalents(d, x))


def dedup_lines(d: int, batch: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Keep x iff it is lexicographically maximal among its equivalents.

    The test depends on x alone, so batches can be filtered independently.
    """
    return [tuple(x) for x in batch if is_line_leader(d, x)]


def visible_roots(d: int, x: Sequence[int]) -> np.ndarray:
    """Representatives of the norm-2 vectors +-e_i +- e_j lying in M_d(x)."""
    n = len(x)
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            for s in (1, -1):
                if (x[i] + s * x[j]) % d == 0:
                    v = [0] * n
                    v[i], v[j] = 1, s
                    rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def visible_root_system(d: int, x: Sequence[int]) -> RootSystem:
    return root_system_of_vectors(visible_roots(d, x), np.eye(len(x), dtype=np.int64))


def partition_root_system(partition: Sequence[int], e: int = 0) -> RootSystem:
    """V = A_{n_1-1} ... A_{n_s-1} D_e attached to a type."""
    comps = [("A", p - 1) for p in partition] + [("D", e)]
    return RootSystem(tuple(comps))
