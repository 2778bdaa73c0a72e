from __future__ import annotations

import functools
import math
import random

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from unihunt.lattice import Lattice, identity_lattice
from unihunt.neighbors import is_isotropic, neighbor

settings.register_profile(
    "default",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large, HealthCheck.large_base_example],
)
settings.load_profile("default")


def random_unimodular(n: int, rng: random.Random, steps: int = 12) -> list[list[int]]:
    """Product of random elementary moves and signed permutations."""
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            c = rng.choice([-2, -1, 1, 2])
            u[i] = [a + c * b for a, b in zip(u[i], u[j])]
        if rng.random() < 0.3:
            k = rng.randrange(n)
            u[k] = [-a for a in u[k]]
    rng.shuffle(u)
    return u


def random_isotropic(n: int, d: int, rng: random.Random) -> tuple[int, ...]:
    """A d-isotropic x with x_1 = 1 (so x is primitive mod d)."""
    e = 1 if d % 2 else 2
    m = e * d
    while True:
        x = [1] + [rng.randrange(d) for _ in range(n - 1)]
        free = min(3, n - 1)
        head = sum(v * v for v in x[: n - free]) % m
        for tail in _tails(free, d, rng):
            if (head + sum(v * v for v in tail)) % m == 0:
                y = tuple(x[: n - free]) + tail
                assert is_isotropic(d, y)
                return y


def _tails(k: int, d: int, rng: random.Random):
    for _ in range(400):
        yield tuple(rng.randrange(d) for _ in range(k))


def random_root_free_neighbor(n: int, d: int, rng: random.Random, tries: int = 200):
    """A d-neighbor of Z^n with no norm 1 vectors, with its spec."""
    for _ in range(tries):
        x = random_isotropic(n, d, rng)
        eps = rng.randrange(2) if d % 2 == 0 else 0
        lat = neighbor(d, x, eps)
        if not (lat.short_vectors(1).norms == 1).any():
            return (d, x, eps), lat
    raise RuntimeError("no root-free neighbor found")


def brute_short_vectors(lat: Lattice, bound: int) -> dict[int, int]:
    """Norm counts (both signs) by scanning a box from the inverse Gram matrix."""
    g = lat.array.astype(float)
    ginv = np.linalg.inv(g)
    n = lat.n
    r = [int(math.floor(math.sqrt(bound * ginv[i, i]) + 1e-9)) for i in range(n)]
    grids = np.meshgrid(*[np.arange(-k, k + 1) for k in r], indexing="ij")
    pts = np.stack([x.ravel() for x in grids], axis=1).astype(np.int64)
    norms = np.einsum("ij,jk,ik->i", pts, lat.array, pts)
    out = {}
    for k in range(1, bound + 1):
        out[k] = int((norms == k).sum())
    return out


@pytest.fixture(scope="session")
def e8() -> Lattice:
    return neighbor(2, (1,) * 8, 0)


@pytest.fixture(scope="session")
def d12plus() -> Lattice:
    return neighbor(2, (1,) * 12, 0)


@pytest.fixture(scope="session")
def i12() -> Lattice:
    return identity_lattice(12)


@pytest.fixture(scope="session")
def n59() -> Lattice:
    return neighbor(59, tuple(range(1, 30)))


def intersection_index(l1: Lattice, l2: Lattice) -> int:
    """[L1 : L1 cap L2] for unimodular L1, L2 embedded in the same Q^n.

    Equals the covolume of L1 divided by that of L1 + L2, read off an HNF of
    both bases brought to a common denominator.
    """
    from unihunt import intmat

    (b1, d1), (b2, d2) = l1.embedding, l2.embedding
    den = d1 * d2 // math.gcd(d1, d2)
    rows = [[x * (den // d1) for x in r] for r in b1] + [[x * (den // d2) for x in r] for r in b2]
    h = intmat.hnf(rows)
    vol = 1
    for i, r in enumerate(h):
        vol *= r[i]
    # covol(L1 + L2) = vol / den^n and covol(L1) = 1
    return den ** l1.n // vol


@functools.lru_cache(maxsize=None)
def cached_classify(n: int):
    """Oracle classification, shared across test modules in one session."""
    from unihunt.oracle import classify

    return classify(n)
