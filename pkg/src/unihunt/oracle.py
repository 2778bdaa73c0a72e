"""Reference classification of unimodular lattices of small rank by 2-neighbor closure.

Starting from Z^n, every 2-neighbor of every class found so far is built
and sorted into classes by cheap invariants and an explicit isometry
search. The 2-neighbors of L come from the classes v in L/2L with
v.v = 0 mod 4; each gives L_v + Z v/2 and L_v + Z (v/2 + b), where L_v is
the kernel of x -> x.v mod 2 and b.v is odd. Classes are visited up to
O(L) (orbits on L/2L under generators of O(L)).

Group orders are not taken from the automorphism search. They follow from
the neighbor counts A(L, M) (number of 2-neighbors of L isometric to M)
through A(L, M) |O(M)| = A(M, L) |O(L)|, starting from |O(Z^n)| = 2^n n!.
Generators only shrink the work; missing generators would give finer
orbits, not wrong counts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .bv import bv
from .characteristic import half_overlattice, kernel_mod2
from .isometry import automorphism_group, find_isometry
from .lattice import Lattice, identity_lattice, is_even
from .roots import root_system_of_vectors

log = logging.getLogger(__name__)

MAX_RANK = 18  # 2^n classes are held in memory


@dataclass
class GenusClass:
    """One isometry class with its derived group order."""

    lattice: Lattice
    root: str
    even: bool
    r1: int
    key: tuple
    order: int | None = None
    neighbors: dict[int, int] = field(default_factory=dict)  # class index -> A(L, M)


@dataclass
class OracleResult:
    n: int
    classes: list[GenusClass]

    def mass_table(self, root_free_only: bool = True) -> dict[str, Fraction]:
        """rmass per root system over the classes with r1 = 0 (or all classes)."""
        from .roots import RootSystem

        table: dict[str, Fraction] = {}
        for c in self.classes:
            if root_free_only and c.r1:
                continue
            w = RootSystem.parse(c.root).weyl_order()
            table[c.root] = table.get(c.root, Fraction(0)) + Fraction(w, c.order)
        return dict(sorted(table.items(), key=lambda kv: _root_sort(kv[0])))

    def x_prime(self) -> list[GenusClass]:
        return [c for c in self.classes if c.r1 == 0]

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, c.order) for c in self.classes), Fraction(0))


def _root_sort(r: str):
    from .roots import RootSystem

    rs = RootSystem.parse(r)
    return (rs.rank, rs.num_roots, r)


def _key(lat: Lattice) -> tuple[tuple, str, int]:
    vs = lat.short_vectors(3)
    counts = tuple(2 * int((vs.norms == k).sum()) for k in (1, 2, 3))
    root = str(root_system_of_vectors(vs.of_norm(2), lat.array))
    inv = bv(lat, vectors=vs.vectors)
    return (is_even(lat), counts, root, inv.hash64), root, counts[0]


def _bits(n: int) -> np.ndarray:
    m = np.arange(1 << n, dtype=np.int64)
    return ((m[:, None] >> np.arange(n)) & 1).astype(np.int64)


def _image_table(m: np.ndarray) -> np.ndarray:
    """Action v -> v M mod 2 on all 2^n bitmasks."""
    n = m.shape[0]
    rows = [(int(sum(((int(m[i, j]) & 1) << j) for j in range(n)))) for i in range(n)]
    img = np.zeros(1 << n, dtype=np.int64)
    for i, r in enumerate(rows):
        img[1 << i : 1 << (i + 1)] = img[: 1 << i] ^ r
    return img


def isotropic_orbits(lat: Lattice, gens: list[np.ndarray]) -> list[tuple[int, int]]:
    """(representative mask, orbit size) for the nonzero v in L/2L with v.v = 0 mod 4."""
    n = lat.n
    bits = _bits(n)
    norms = np.einsum("ij,jk,ik->i", bits, lat.array, bits)
    iso = (norms % 4 == 0)
    iso[0] = False
    size = 1 << n
    src, dst = [], []
    for g in gens:
        img = _image_table(g)
        src.append(np.arange(size))
        dst.append(img)
    if src:
        s, t = np.concatenate(src), np.concatenate(dst)
        graph = coo_matrix((np.ones(len(s), dtype=np.int8), (s, t)), shape=(size, size))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = np.arange(size)
    masks = np.flatnonzero(iso)
    lab = labels[masks]
    uniq, first, counts = np.unique(lab, return_index=True, return_counts=True)
    return sorted((int(masks[f]), int(c)) for f, c in zip(first, counts))


def two_neighbors(lat: Lattice, mask: int) -> tuple[Lattice, Lattice]:
    """The two 2-neighbors of L attached to the class v (a bitmask of L/2L)."""
    n = lat.n
    v = [(mask >> i) & 1 for i in range(n)]
    gv = [sum(lat.gram[i][j] * v[j] for j in range(n)) for i in range(n)]
    if lat.norm(v) % 4:
        raise ValueError("v.v must be 0 mod 4")
    sub = kernel_mod2(gv)
    b = next(i for i in range(n) if gv[i] % 2)
    vb = list(v)
    vb[b] += 2
    out = []
    for c2 in (v, vb):
        nb = half_overlattice(lat, sub, c2)
        h, _, _ = nb._reduced
        out.append(nb.transform(h))
    return out[0], out[1]


def classify(n: int) -> OracleResult:
    """All unimodular lattices of rank n reachable from Z^n by 2-neighbor steps."""
    if not 1 <= n <= MAX_RANK:
        raise ValueError(f"rank must be in 1..{MAX_RANK}")
    start = identity_lattice(n)
    key, root, r1 = _key(start)
    classes = [GenusClass(start, root, key[0], r1, key)]
    by_key: dict[tuple, list[int]] = {key: [0]}

    def locate(lat: Lattice) -> int:
        key, root, r1 = _key(lat)
        for i in by_key.get(key, []):
            if find_isometry(lat, classes[i].lattice) is not None:
                return i
        classes.append(GenusClass(lat, root, key[0], r1, key))
        by_key.setdefault(key, []).append(len(classes) - 1)
        log.info("rank %d: class %d root %s", n, len(classes) - 1, root)
        return len(classes) - 1

    done = 0
    while done < len(classes):
        c = classes[done]
        _, gens = automorphism_group(c.lattice)
        for mask, size in isotropic_orbits(c.lattice, gens):
            for nb in two_neighbors(c.lattice, mask):
                j = locate(nb)
                c.neighbors[j] = c.neighbors.get(j, 0) + size
        done += 1
    _derive_orders(classes, 2**n * math.factorial(n))
    return OracleResult(n, classes)


def _derive_orders(classes: list[GenusClass], anchor: int) -> None:
    orders: dict[int, Fraction] = {0: Fraction(anchor)}
    queue = [0]
    while queue:
        i = queue.pop(0)
        for j, a_ij in classes[i].neighbors.items():
            a_ji = classes[j].neighbors.get(i, 0)
            if not a_ji:
                raise RuntimeError(f"neighbor counts are not symmetric between {i} and {j}")
            val = orders[i] * a_ji / a_ij
            if j in orders:
                if orders[j] != val:
                    raise RuntimeError(f"inconsistent order for class {j}: {orders[j]} vs {val}")
            else:
                orders[j] = val
                queue.append(j)
    for i, c in enumerate(classes):
        q = orders[i]
        if q.denominator != 1:
            raise RuntimeError(f"non-integral order {q} for class {i}")
        c.order = int(q)
