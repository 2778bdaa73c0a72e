"""ADE root systems: identification, Weyl group orders, root lattices."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import intmat
from .lattice import Lattice, short_vectors

E_WEYL = {6: 51840, 7: 2903040, 8: 696729600}
E_ROOTS = {6: 72, 7: 126, 8: 240}
_FAMILY_ORDER = {"A": 0, "D": 1, "E": 2}


class RootSystemError(RuntimeError):
    """A component matched no ADE type; indicates a bug upstream."""


def _normalize(family: str, k: int) -> list[tuple[str, int]]:
    if family == "A":
        if k < 1:
            return []
        return [("A", k)]
    if family == "D":
        if k <= 1:
            return []
        if k == 2:
            return [("A", 1), ("A", 1)]
        if k == 3:
            return [("A", 3)]
        return [("D", k)]
    if family == "E" and k in (6, 7, 8):
        return [("E", k)]
    raise ValueError(f"invalid root system symbol {family}{k}")


def component_roots(family: str, k: int) -> int:
    if family == "A":
        return k * (k + 1)
    if family == "D":
        return 2 * k * (k - 1)
    return E_ROOTS[k]


def component_weyl(family: str, k: int) -> int:
    if family == "A":
        return math.factorial(k + 1)
    if family == "D":
        return 2 ** (k - 1) * math.factorial(k)
    return E_WEYL[k]


def _sort_key(c: tuple[str, int]) -> tuple[int, int, int]:
    return (c[1], component_roots(*c), _FAMILY_ORDER[c[0]])


@dataclass(frozen=True)
class RootSystem:
    """Multiset of irreducible ADE components, stored canonically sorted."""

    components: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        comps = []
        for fam, k in self.components:
            comps.extend(_normalize(fam, int(k)))
        object.__setattr__(self, "components", tuple(sorted(comps, key=_sort_key)))

    @classmethod
    def parse(cls, text: str) -> "RootSystem":
        """Parse e.g. ``8A1+2A2``, ``D28`` or ``0`` (empty)."""
        text = text.strip()
        if text in ("0", ""):
            return cls(())
        comps = []
        for term in text.split("+"):
            m = re.fullmatch(r"(\d*)([ADE])(\d+)", term.strip())
            if not m:
                raise ValueError(f"bad root system term {term!r}")
            mult = int(m.group(1)) if m.group(1) else 1
            comps.extend([(m.group(2), int(m.group(3)))] * mult)
        return cls(tuple(comps))

    def __str__(self) -> str:
        if not self.components:
            return "0"
        counts = Counter(self.components)
        terms = []
        for c in sorted(counts, key=_sort_key):
            m = counts[c]
            terms.append(f"{m if m > 1 else ''}{c[0]}{c[1]}")
        return "+".join(terms)

    @property
    def rank(self) -> int:
        return sum(k for _, k in self.components)

    @property
    def num_roots(self) -> int:
        return sum(component_roots(*c) for c in self.components)

    def weyl_order(self) -> int:
        return weyl_order(self)

    def __add__(self, other: "RootSystem") -> "RootSystem":
        return RootSystem(self.components + other.components)

    def contains(self, other: "RootSystem") -> bool:
        """Whether ``other`` embeds into this system (see root_subsystem)."""
        return root_subsystem(other, self)


def weyl_order(rs: RootSystem) -> int:
    out = 1
    for c in rs.components:
        out *= component_weyl(*c)
    return out


def identify_component(rank: int, count: int) -> tuple[str, int]:
    if count == rank * (rank + 1):
        return ("A", rank)
    if rank >= 4 and count == 2 * rank * (rank - 1):
        return ("D", rank)
    if rank in E_ROOTS and count == E_ROOTS[rank]:
        return ("E", rank)
    raise RootSystemError(f"no ADE component of rank {rank} with {count} roots")


def root_system_of_vectors(vectors: np.ndarray, gram: np.ndarray) -> RootSystem:
    """Root system spanned by norm-2 representatives (one per +-pair)."""
    m = len(vectors)
    if m == 0:
        return RootSystem(())
    ip = vectors @ gram @ vectors.T
    adj = ip != 0
    seen = np.zeros(m, dtype=bool)
    comps = []
    for s in range(m):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        members = []
        while stack:
            v = stack.pop()
            members.append(v)
            for w in np.nonzero(adj[v] & ~seen)[0]:
                seen[w] = True
                stack.append(int(w))
        r = len(intmat.hnf(vectors[members].tolist()))
        comps.append(identify_component(r, 2 * len(members)))
    return RootSystem(tuple(comps))


def root_system(lat: Lattice) -> RootSystem:
    """Decompose R_2(L) into irreducible ADE components."""
    vs = short_vectors(lat, 2)
    return root_system_of_vectors(vs.of_norm(2), lat.array)


def standard_root_lattice(symbol: str) -> Lattice:
    """Gram matrix of the root lattice Q(S) for one irreducible symbol."""
    m = re.fullmatch(r"([ADE])(\d+)", symbol.strip())
    if not m:
        raise ValueError(f"invalid root system symbol {symbol!r}")
    fam, k = m.group(1), int(m.group(2))
    if fam == "A" and k >= 1:
        g = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(k)] for i in range(k)]
        return Lattice(g)
    if fam == "D" and k >= 2:
        # D_k = M_2(1^k) inside Z^k
        rows = [[0] * k for _ in range(k)]
        for i in range(k - 1):
            rows[i][i], rows[i][i + 1] = 1, -1
        rows[k - 1][k - 2], rows[k - 1][k - 1] = 1, 1
        if k == 2:
            rows = [[1, -1], [1, 1]]
        return Lattice.from_basis(rows)
    if fam == "E" and k in (6, 7, 8):
        # Bourbaki numbering: chain 1-3-4-5-6-7-8 with node 2 attached to 4
        edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]
        g = [[2 if i == j else 0 for j in range(k)] for i in range(k)]
        for a, b in edges:
            if a <= k and b <= k:
                g[a - 1][b - 1] = g[b - 1][a - 1] = -1
        return Lattice(g)
    raise ValueError(f"invalid root system symbol {symbol!r}")


def orthogonal_sum(*lats: Lattice) -> Lattice:
    n = sum(l.n for l in lats)
    g = [[0] * n for _ in range(n)]
    off = 0
    for l in lats:
        for i in range(l.n):
            for j in range(l.n):
                g[off + i][off + j] = l.gram[i][j]
        off += l.n
    return Lattice(g)


# maximal root subsystems of E_m; every proper subsystem lies in one of them
E_MAXIMAL = {
    6: ("D5", "A1+A5", "3A2"),
    7: ("E6", "A7", "A1+D6", "A2+A5"),
    8: ("E7+A1", "D8", "A8", "A2+E6", "2A4"),
}


def root_subsystem(small: RootSystem, big: RootSystem) -> bool:
    """Whether ``small`` embeds into ``big`` component by component.

    Groups of small components are assigned to big components. Inside A_m
    and D_m the test counts coordinates (A_k uses k+1, A_3 = D_3 uses 3,
    two A_1 share a D_2); inside E_m it recurses into the maximal
    subsystems of E_m.
    """
    smalls = sorted(small.components, key=lambda c: -c[1])
    bigs = list(big.components)

    def fits(group: list[tuple[str, int]], target: tuple[str, int]) -> bool:
        fam, m = target
        if sum(k for _, k in group) > m:
            return False
        if fam == "A":
            return all(f == "A" for f, _ in group) and sum(k + 1 for _, k in group) <= m + 1
        if fam == "D":
            if any(f == "E" for f, _ in group):
                return False
            coords, a1 = 0, 0
            for f, k in group:
                if f == "A" and k == 1:
                    a1 += 1
                elif f == "D" or k == 3:
                    coords += k
                else:
                    coords += k + 1
            coords += 2 * ((a1 + 1) // 2)
            return coords <= m
        if group == [target]:
            return True
        sub = RootSystem(tuple(group))
        return any(root_subsystem(sub, RootSystem.parse(t)) for t in E_MAXIMAL[m])

    used: list[list[tuple[str, int]]] = [[] for _ in bigs]

    def place(i: int) -> bool:
        if i == len(smalls):
            return True
        for j, b in enumerate(bigs):
            used[j].append(smalls[i])
            if fits(used[j], b) and place(i + 1):
                return True
            used[j].pop()
        return False

    return place(0)
