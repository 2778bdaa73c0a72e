import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_isotropic, random_unimodular
from unihunt import intmat
from unihunt.characteristic import (
    characteristic_class,
    characteristic_vectors,
    companions,
    even_part,
    exc_size,
    is_characteristic,
    kernel_mod2,
    lemma62_bound,
    singular_companion,
)
from unihunt.isometry import aut_order, isometric
from unihunt.lattice import Lattice, LatticeError, identity_lattice, is_even, norm_counts
from unihunt.neighbors import neighbor
from unihunt.roots import root_system


def brute_characteristic(lat: Lattice, bound: int) -> dict[int, int]:
    """Count characteristic vectors by norm by scanning a box.

    Counts do not depend on the basis, so the box is taken in an LLL basis.
    """
    lat = Lattice(intmat.lll_gram(lat.gram)[1])
    ginv = np.linalg.inv(lat.array.astype(float))
    r = [int(math.floor(math.sqrt(bound * ginv[i, i]) + 1e-9)) for i in range(lat.n)]
    out = {}
    for v in itertools.product(*[range(-k, k + 1) for k in r]):
        nv = lat.norm(v)
        if nv <= bound and is_characteristic(lat, v):
            out[nv] = out.get(nv, 0) + 1
    return out


@given(st.integers(1, 5), st.randoms(use_true_random=False))
def test_char_vectors_match_brute_force(n, rnd):
    lat = Lattice(intmat.congruent(random_unimodular(n, rnd), intmat.identity(n)))
    rep = characteristic_vectors(lat, n + 8)
    got = {}
    for v, k in zip(rep.vectors, rep.norms):
        assert is_characteristic(lat, v) and lat.norm(v) == k
        got[k] = got.get(k, 0) + 2
    assert got == brute_characteristic(lat, n + 8)


def test_identity_char_vectors():
    # characteristic vectors of Z^n are the all-odd vectors; minimum n with 2^n of them
    rep = characteristic_vectors(identity_lattice(5), 5)
    assert rep.min_char_norm == 5 and len(rep.vectors) == 2**4
    assert exc_size(identity_lattice(5)) == 2**5
    assert exc_size(identity_lattice(8)) == 0


@pytest.mark.parametrize("n, d", [(9, 3), (10, 4), (11, 5), (12, 3), (13, 7), (14, 6)])
def test_char_norms_congruent_to_n_mod_8(n, d):
    rnd = random.Random(n * 100 + d)
    lat = neighbor(d, random_isotropic(n, d, rnd), rnd.randrange(2) if d % 2 == 0 else 0)
    if is_even(lat):
        pytest.skip("even neighbor")
    rep = characteristic_vectors(lat, n + 8)
    assert rep.norms
    assert all((k - n) % 8 == 0 for k in rep.norms)


def test_even_lattice_has_no_class(e8):
    with pytest.raises(LatticeError):
        characteristic_class(e8)


def test_kernel_mod2():
    k = kernel_mod2([1, 0, 1])
    assert len(k) == 3 and abs(intmat.det(k)) == 2
    assert all((r[0] + r[2]) % 2 == 0 for r in k)
    assert kernel_mod2([2, 4]) == intmat.identity(2)


def test_even_part(i12):
    ev = even_part(i12)
    assert is_even(ev) and ev.det == 4
    assert str(root_system(ev)) == "D12"


def test_d12_plus_is_exceptional(d12plus):
    assert norm_counts(d12plus, 1)[1] == 0
    assert str(root_system(d12plus)) == "D12"
    assert exc_size(d12plus) == 24


def test_d12_plus_companions(d12plus, i12):
    c1, c2 = companions(d12plus)
    for c in (c1, c2):
        assert c.is_unimodular and not is_even(c)
        assert str(root_system(c)) == "D12"
    sing = singular_companion(d12plus)
    assert sing is not None
    assert isometric(sing, i12)
    other = c2 if norm_counts(c1, 1)[1] else c1
    assert norm_counts(other, 1)[1] == 0
    assert isometric(other, d12plus)
    assert aut_order(i12).order == 2 * aut_order(d12plus).order


def test_companions_need_n_4_mod_8():
    with pytest.raises(LatticeError):
        companions(identity_lattice(8))


def test_lemma_bound():
    assert lemma62_bound(29, 59) == Fraction(4 * 29**3 - 29, 3 * 59**2)
    assert lemma62_bound(29, 79) > 5
    assert lemma62_bound(29, 83) < 5
    # the norm 5 characteristic vectors of a 29-dim neighbor need p >= 83
    primes = [p for p in range(2, 200) if all(p % q for q in range(2, p))]
    assert min(p for p in primes if lemma62_bound(29, p) <= 5) == 83
