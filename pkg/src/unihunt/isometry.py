"""Automorphism group orders and isometry tests by Plesken-Souvignier backtracking.

An isometry is fixed by the images of a Z-basis e_1..e_n. Images of e_k
are searched among the vectors of norm e_k.e_k in a finite invariant set S
(all vectors of norm <= max e_i.e_i), pruned by inner products with the
images already chosen and by a per-vector fingerprint: the histogram of
inner products against a small invariant set T. The group order is the
product of the orbit lengths along the stabilizer chain of the basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .intmat import inverse_unimodular
from .lattice import Lattice, short_vectors
from .reduction import best_basis
from .roots import root_system, weyl_order

FINGERPRINT_CAP = 600  # max size of the fingerprint set T (one per +-pair)


class IsometryError(RuntimeError):
    pass


@dataclass(frozen=True)
class AutOrderReport:
    order: int
    reduced_order: int
    reduced_mass: Fraction
    generators: tuple[tuple[tuple[int, ...], ...], ...] = ()


def _fingerprint_set(lat: Lattice, bmax: int) -> np.ndarray:
    """Reps of norm <= k for the largest k with at most FINGERPRINT_CAP of them."""
    vs = short_vectors(lat, bmax)
    if len(vs) == 0:
        return vs.vectors
    norms = np.unique(vs.norms)
    k = norms[0]
    for v in norms:
        if (vs.norms <= v).sum() <= FINGERPRINT_CAP:
            k = v
    return vs.upto(int(k))


def _fingerprints(s: np.ndarray, gram: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Per-row histogram of (t.t, |v.t|) over t in T, as a count matrix."""
    if len(t) == 0 or len(s) == 0:
        return np.zeros((len(s), 1), dtype=np.int64)
    tg = t @ gram
    tnorm = np.einsum("ij,ij->i", tg, t)
    snorm_max = int(np.einsum("ij,jk,ik->i", s, gram, s).max())
    width = math.isqrt(snorm_max * int(tnorm.max())) + 1
    tn_vals = np.unique(tnorm)
    feats = []
    for lo in range(0, len(s), 4096):
        ip = np.abs(s[lo : lo + 4096] @ tg.T)
        cols = []
        for a in tn_vals:
            sub = ip[:, tnorm == a]
            for c in range(width):
                cols.append((sub == c).sum(axis=1))
        feats.append(np.stack(cols, axis=1))
    return np.concatenate(feats)


class _Space:
    """The candidate set S (both signs) with lookup and fingerprints."""

    def __init__(self, lat: Lattice, bmax: int, tset: np.ndarray | None = None):
        self.lat = lat
        self.gram = lat.array
        vs = short_vectors(lat, bmax)
        reps = vs.vectors
        self.s = np.concatenate([reps, -reps]) if len(reps) else reps.reshape(0, lat.n)
        self.norms = np.concatenate([vs.norms, vs.norms]) if len(reps) else vs.norms
        self.sg = self.s @ self.gram
        self.tset = _fingerprint_set(lat, bmax) if tset is None else tset
        self.raw_fp = _fingerprints(self.s, self.gram, self.tset)
        self._keys = np.ascontiguousarray(self.s).view(np.dtype((np.void, self.s.itemsize * lat.n))).ravel()
        self._order = np.argsort(self._keys)
        self._sorted = self._keys[self._order]
        self._ip_cache: dict[int, np.ndarray] = {}

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        k = np.ascontiguousarray(rows.astype(np.int64)).view(self._keys.dtype).ravel()
        pos = np.searchsorted(self._sorted, k)
        pos = np.minimum(pos, len(self._sorted) - 1)
        idx = self._order[pos]
        if not np.array_equal(self.s[idx], rows):
            raise IsometryError("image vector outside the candidate set")
        return idx

    def ip(self, j: int) -> np.ndarray:
        """Inner products of every candidate with candidate j."""
        col = self._ip_cache.get(j)
        if col is None:
            col = self.sg @ self.s[j]
            if len(self._ip_cache) < 20000:
                self._ip_cache[j] = col
        return col


def _class_ids(*fps: np.ndarray) -> list[np.ndarray]:
    """Common class labels for fingerprint matrices of two spaces."""
    if len({f.shape[1] for f in fps}) > 1:
        raise IsometryError("fingerprint layouts differ")
    allf = np.concatenate(fps)
    _, inv = np.unique(allf, axis=0, return_inverse=True)
    inv = inv.ravel()
    out, lo = [], 0
    for f in fps:
        out.append(inv[lo : lo + len(f)])
        lo += len(f)
    return out


class _Search:
    """Backtracking for isometries mapping the basis of a source to targets.

    Every vector of S carries a label: its class and its inner products
    with the images chosen so far. A partial map survives only if the label
    histogram on the target equals the histogram of the source basis
    prefix; the candidates for the next image are the target vectors with
    the label of the next source basis vector.
    """

    def __init__(self, src: _Space, src_cls: np.ndarray, src_idx: np.ndarray, tgt: _Space, tgt_cls: np.ndarray):
        self.n = len(src_idx)
        self.tgt = tgt
        bmax = int(max(src.norms.max(), tgt.norms.max())) if len(src.norms) else 1
        self.off, self.width = bmax, 2 * bmax + 1
        self.ncls = int(max(src_cls.max(), tgt_cls.max())) + 1
        self.root_counts = np.bincount(src_cls, minlength=self.ncls)
        self.feasible = np.array_equal(self.root_counts, np.bincount(tgt_cls, minlength=self.ncls))
        self.tgt_root = tgt_cls.astype(np.int64)
        # source chain: labels after fixing e_0..e_k
        self.keys, self.counts, self.want = [], [], []
        lab = src_cls.astype(np.int64)
        for k in range(self.n):
            self.want.append(int(lab[src_idx[k]]))
            key = lab * self.width + (src.ip(int(src_idx[k])) + self.off)
            uk, lab = np.unique(key, return_inverse=True)
            lab = lab.ravel()
            self.keys.append(uk)
            self.counts.append(np.bincount(lab, minlength=len(uk)))
        self.nodes = 0

    def step(self, lab: np.ndarray, k: int, u: int) -> np.ndarray | None:
        """Labels after mapping e_k to target vector u, or None if inconsistent."""
        key = lab * self.width + (self.tgt.ip(u) + self.off)
        uk = self.keys[k]
        pos = np.searchsorted(uk, key)
        np.minimum(pos, len(uk) - 1, out=pos)
        if not np.array_equal(uk[pos], key):
            return None
        if not np.array_equal(np.bincount(pos, minlength=len(uk)), self.counts[k]):
            return None
        return pos

    def labels_for(self, prefix: list[int]) -> np.ndarray | None:
        lab = self.tgt_root
        for k, u in enumerate(prefix):
            lab = self.step(lab, k, u)
            if lab is None:
                return None
        return lab

    def candidates(self, lab: np.ndarray, k: int) -> np.ndarray:
        return np.flatnonzero(lab == self.want[k])

    def extend(self, prefix: list[int]) -> list[int] | None:
        """Complete a partial assignment of basis images; None if impossible."""
        if not self.feasible:
            return None
        lab = self.labels_for(prefix)
        if lab is None:
            return None
        return self._dfs(list(prefix), lab)

    def _dfs(self, prefix: list[int], lab: np.ndarray) -> list[int] | None:
        k = len(prefix)
        if k == self.n:
            return prefix
        self.nodes += 1
        for u in self.candidates(lab, k):
            nxt = self.step(lab, k, int(u))
            if nxt is None:
                continue
            res = self._dfs(prefix + [int(u)], nxt)
            if res is not None:
                return res
        return None


def _orbit(start: int, perms: list[np.ndarray]) -> np.ndarray:
    m = len(perms[0]) if perms else 0
    seen = np.zeros(max(m, start + 1), dtype=bool)
    seen[start] = True
    frontier = np.array([start])
    while len(frontier) and perms:
        nxt = np.concatenate([p[frontier] for p in perms])
        nxt = np.unique(nxt[~seen[nxt]])
        seen[nxt] = True
        frontier = nxt
    return np.flatnonzero(seen)


def _prepare(lat: Lattice, basis=None):
    if basis is None:
        basis = best_basis(lat, t=200)
    b = np.array(basis, dtype=np.int64)
    lb = lat.transform(b.tolist())
    bmax = int(np.diag(lb.array).max())
    space = _Space(lb, bmax)
    return b, lb, space


def automorphism_group(lat: Lattice, basis=None) -> tuple[int, list[np.ndarray]]:
    """(|O(L)|, generators as integer matrices in L's coordinates).

    Levels are processed from the last basis vector up. At level i the
    orbit of e_i under the generators fixing e_1..e_{i-1} is closed, and
    every remaining candidate image is either reached by a new generator
    found by backtracking or shown unreachable together with its orbit.
    """
    n = lat.n
    b, lb, space = _prepare(lat, basis)
    (cls,) = _class_ids(space.raw_fp)
    eye = np.eye(n, dtype=np.int64)
    e_idx = space.index_of(eye)
    # small candidate classes first
    sizes = [int((cls == cls[i]).sum()) for i in e_idx]
    order = np.argsort(sizes, kind="stable")
    if not np.array_equal(order, np.arange(n)):
        b = b[order]
        lb = lat.transform(b.tolist())
        space = _Space(lb, int(np.diag(lb.array).max()))
        (cls,) = _class_ids(space.raw_fp)
        e_idx = space.index_of(eye)
    search = _Search(space, cls, e_idx, space, cls)
    gens: list[np.ndarray] = [-eye]  # in the coordinates of b
    perms = [space.index_of(-space.s)]
    order_val = 1
    for i in range(n - 1, -1, -1):
        fix = [int(e_idx[j]) for j in range(i)]
        stab = [p for p, m in zip(perms, gens) if np.array_equal(m[:i], eye[:i])]
        orbit = set(_orbit(int(e_idx[i]), stab).tolist())
        lab = search.labels_for(fix)
        dead: set[int] = set()
        for w in search.candidates(lab, i):
            w = int(w)
            if w in orbit or w in dead:
                continue
            res = search.extend(fix + [w])
            if res is None:
                dead.update(_orbit(w, stab).tolist())
                continue
            m = space.s[res]
            p = space.index_of(space.s @ m)
            gens.append(m)
            perms.append(p)
            stab.append(p)
            orbit = set(_orbit(int(e_idx[i]), stab).tolist())
        order_val *= len(orbit)
    # back to L's coordinates: M_L = B^{-1} M B
    binv = np.array(inverse_unimodular(b.tolist()), dtype=object)
    out = [np.array((binv @ m.astype(object) @ b.astype(object)).tolist(), dtype=np.int64) for m in gens]
    return order_val, out


def aut_order(lat: Lattice, basis=None) -> AutOrderReport:
    order, gens = automorphism_group(lat, basis)
    w = weyl_order(root_system(lat))
    if order % w:
        raise IsometryError(f"|W| = {w} does not divide |O| = {order}")
    return AutOrderReport(
        order,
        order // w,
        Fraction(w, order),
        tuple(tuple(tuple(int(c) for c in r) for r in m) for m in gens),
    )


def reduced_mass(lat: Lattice) -> Fraction:
    return aut_order(lat).reduced_mass


def find_isometry(l1: Lattice, l2: Lattice, basis=None) -> np.ndarray | None:
    """Integer matrix U with U G2 U^t = G1 (rows: images of L1's basis), or None."""
    if l1.n != l2.n or l1.det != l2.det:
        return None
    b, lb1, sp1 = _prepare(l1, basis)
    bmax = int(np.diag(lb1.array).max())
    c1 = np.bincount(sp1.norms, minlength=bmax + 1) if len(sp1.norms) else np.zeros(bmax + 1, int)
    vs2 = short_vectors(l2, bmax)
    c2 = 2 * np.bincount(vs2.norms, minlength=bmax + 1) if len(vs2) else np.zeros(bmax + 1, int)
    if not np.array_equal(c1, c2):
        return None
    # the fingerprint set must be the same invariant set in both lattices
    tn1 = np.einsum("ij,jk,ik->i", sp1.tset, lb1.array, sp1.tset) if len(sp1.tset) else np.zeros(0, int)
    kmax = int(tn1.max()) if len(tn1) else 1
    t2 = vs2.upto(kmax)
    sp2 = _Space(l2, bmax, tset=t2)
    if sp1.raw_fp.shape[1] != sp2.raw_fp.shape[1]:
        return None
    cls1, cls2 = _class_ids(sp1.raw_fp, sp2.raw_fp)
    e_idx = sp1.index_of(np.eye(l1.n, dtype=np.int64))
    search = _Search(sp1, cls1, e_idx, sp2, cls2)
    res = search.extend([])
    if res is None:
        return None
    imgs = sp2.s[res]  # images of B's rows, in L2 coordinates
    binv = np.array(inverse_unimodular(b.tolist()), dtype=object)
    u = np.array((binv @ imgs.astype(object)).tolist(), dtype=np.int64)
    return u


def isometric(l1: Lattice, l2: Lattice) -> bool:
    return find_isometry(l1, l2) is not None


def is_automorphism(lat: Lattice, m: np.ndarray) -> bool:
    g = np.array(lat.gram, dtype=object)
    mo = m.astype(object)
    return bool((mo @ g @ mo.T == g).all()) and abs(round(np.linalg.det(m.astype(float)))) == 1
