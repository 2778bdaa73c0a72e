from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from unihunt import intmat


def square(n_min=1, n_max=6, lo=-9, hi=9):
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    )


def fraction_det(a):
    m = [[Fraction(x) for x in r] for r in a]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return int(det)


@given(square())
def test_det_matches_rational_elimination(a):
    assert intmat.det(a) == fraction_det(a)


@given(square(), st.sampled_from([2, 3, 5, 7, 11]))
def test_det_mod_p(a, p):
    assert intmat.det_mod(a, p) == intmat.det(a) % p


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd(a, b):
    g, s, t = intmat.xgcd(a, b)
    assert g >= 0 and s * a + t * b == g
    if a or b:
        assert a % g == 0 and b % g == 0


@given(square(2, 5))
def test_hnf_full_rank(a):
    d = intmat.det(a)
    assume(d != 0)
    h = intmat.hnf(a)
    assert len(h) == len(a)
    prod = 1
    for i, r in enumerate(h):
        assert all(x == 0 for x in r[:i])
        assert r[i] > 0
        for k in range(i):
            assert 0 <= h[k][i] < r[i]
        prod *= r[i]
    assert prod == abs(d)


@given(square(2, 5))
def test_hnf_spans_the_same_lattice(a):
    assume(intmat.det(a) != 0)
    h = intmat.hnf(a)
    # each row of a has integral coordinates in h, and det matches
    for r in a:
        c = intmat.solve_rational(h, r)
        assert all(x.denominator == 1 for x in c)


def test_hnf_drops_dependent_rows():
    h = intmat.hnf([[2, 4], [1, 2], [3, 6]])
    assert h == [[1, 2]]


@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_inverse_unimodular(n, rnd):
    from conftest import random_unimodular

    u = random_unimodular(n, rnd)
    inv = intmat.inverse_unimodular(u)
    assert intmat.matmul(u, inv) == intmat.identity(n)


def test_inverse_rejects_non_unimodular():
    with pytest.raises(ValueError):
        intmat.inverse_unimodular([[2, 0], [0, 1]])


@given(st.integers(1, 7), st.randoms(use_true_random=False))
def test_lll_gram_is_reduced(n, rnd):
    from conftest import random_unimodular

    b = random_unimodular(n, rnd, steps=25)
    g = intmat.congruent(b, intmat.identity(n))
    h, g2 = intmat.lll_gram(g)
    assert abs(intmat.det(h)) == 1
    assert intmat.congruent(h, g) == g2
    # Gram-Schmidt check of size reduction and the Lovasz condition
    gs = [[Fraction(x) for x in r] for r in g2]
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (gs[i][j] - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))) / bstar[j]
        bstar[i] = gs[i][i] - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
    for i in range(n):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2)
        if i:
            assert bstar[i] >= (Fraction(99, 100) - mu[i][i - 1] ** 2) * bstar[i - 1]


def test_lll_on_identity_is_identity():
    h, g = intmat.lll_gram(intmat.identity(5))
    assert g == intmat.identity(5)


@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_solve_mod2(n, rnd):
    from conftest import random_unimodular

    u = random_unimodular(n, rnd)
    g = intmat.congruent(u, intmat.identity(n))
    rhs = [g[i][i] for i in range(n)]
    w = intmat.solve_mod2(g, rhs)
    assert all((sum(g[i][j] * w[j] for j in range(n)) - rhs[i]) % 2 == 0 for i in range(n))


@given(square(1, 6, 0, 1))
def test_rank_mod2_matches_det_mod2(a):
    n = len(a)
    rows = [sum(b << j for j, b in enumerate(r)) for r in a]
    full = intmat.rank_mod2(rows, n) == n
    assert full == (intmat.det_mod(a, 2) != 0)
