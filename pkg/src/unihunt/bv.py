"""The BV graph invariant: column multisets of A^2 mod 1009, hashed to 64 bits."""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

from ._kernels import fnv1a64
from .lattice import Lattice, short_vectors

PRIME = 1009
SET, MULTISET = 0, 1


class Comparison(enum.Enum):
    EQUAL = "equal"
    DIFFERENT = "different"
    COLLISION = "collision"  # equal hashes, different invariants


def build_graph(lat: Lattice, vectors: np.ndarray | None = None) -> np.ndarray:
    """Mod-2 Gram matrix of the representatives of R_{<=3}(L), loops kept."""
    if vectors is None:
        vectors = short_vectors(lat, 3).vectors
    if len(vectors) == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    g2 = (lat.array % 2).astype(np.float64)
    v2 = (vectors % 2).astype(np.float64)
    # entries stay far below 2^53, so float products are exact
    a = np.mod(np.mod(v2 @ g2, 2) @ v2.T, 2)
    return a.astype(np.uint8)


def square_mod(a: np.ndarray, p: int = PRIME) -> np.ndarray:
    """A^2 mod p for a 0/1 matrix; float sums of 0/1 products are exact."""
    af = a.astype(np.float32 if a.shape[0] < 2**24 else np.float64)
    s = af @ af
    return (s.astype(np.int64) % p).astype(np.uint16)


def _serialize(cols: np.ndarray, variant: int) -> bytes:
    m = cols.shape[0]
    head = struct.pack("<IB", cols.shape[1] if m else 0, variant)
    if m == 0:
        return head
    body = np.empty((m, cols.shape[1] + 1), dtype="<u2")
    body[:, :-1] = cols
    body[:, -1] = 0xFFFF
    return head + body.tobytes()


@dataclass(frozen=True)
class BVInvariant:
    """Canonical column collection plus its FNV-1a 64-bit hash.

    ``edges`` counts unordered pairs of distinct vertices joined in A;
    ``arrows`` counts all ones of A (ordered pairs, loops included).

    ``data`` is the canonical byte serialization: a header (vertex count as
    4-byte LE, variant byte) then every tuple in lexicographic order, each
    entry 2-byte LE and each tuple closed by 0xFFFF.
    """

    vertices: int
    edges: int
    arrows: int
    variant: int
    data: bytes
    hash64: int

    @property
    def hex(self) -> str:
        return f"{self.hash64:016x}"

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        body = np.frombuffer(self.data[5:], dtype="<u2")
        if self.vertices == 0:
            return ()
        rows = body.reshape(-1, self.vertices + 1)[:, :-1]
        return tuple(tuple(int(x) for x in r) for r in rows)


def bv_from_graph(a: np.ndarray, variant: int = SET) -> BVInvariant:
    m = a.shape[0]
    arrows = int(a.sum(dtype=np.int64)) if m else 0
    edges = (arrows - int(np.trace(a))) // 2 if m else 0
    if m == 0:
        cols = np.zeros((0, 0), dtype=np.uint16)
    else:
        s = square_mod(a)
        cols = np.sort(s.T, axis=1)
        cols = cols[np.lexsort(cols.T[::-1])]
        if variant == SET:
            keep = np.ones(m, dtype=bool)
            keep[1:] = (cols[1:] != cols[:-1]).any(axis=1)
            cols = cols[keep]
    data = _serialize(cols, variant)
    h = int(fnv1a64(np.frombuffer(data, dtype=np.uint8)))
    return BVInvariant(m, edges, arrows, variant, data, h)


def bv(lat: Lattice, variant: int = SET, vectors: np.ndarray | None = None) -> BVInvariant:
    """BV invariant of L from the graph on +-pairs of R_{<=3}(L)."""
    return bv_from_graph(build_graph(lat, vectors), variant)


def bv_compare(a: BVInvariant, b: BVInvariant) -> Comparison:
    if a.variant != b.variant:
        raise ValueError("BV variants differ")
    if a.hash64 != b.hash64:
        return Comparison.DIFFERENT
    return Comparison.EQUAL if a.data == b.data else Comparison.COLLISION


def bv_equal(a: BVInvariant, b: BVInvariant) -> bool:
    return bv_compare(a, b) is Comparison.EQUAL
