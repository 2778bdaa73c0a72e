"""Acceptance criteria 1 to 10, one printed PASS/FAIL line each."""

import contextlib
import dataclasses
import math
import random
import time
from fractions import Fraction

import pytest

from conftest import cached_classify, random_root_free_neighbor
from unihunt.bv import bv, bv_equal
from unihunt.characteristic import characteristic_vectors, exc_size, lemma62_bound, singular_companion
from unihunt.cli import main
from unihunt.hunt import RunConfig, format_list, format_mass_table, ne, strict_two_patterns, verify
from unihunt.isometry import aut_order, isometric
from unihunt.lattice import identity_lattice, is_even, norm_counts
from unihunt.neighbors import NeighborSpec, neighbor, normalize, spec_neighbor, visible_root_system
from unihunt.reduction import reduce
from unihunt.roots import RootSystem, root_system, weyl_order

DESK_RANKS = (8, 12, 13, 14, 15, 16)


@pytest.fixture
def criterion(capsys):
    """Run a block and print one PASS/FAIL line for it."""

    @contextlib.contextmanager
    def run(k: int, title: str):
        t = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            msg = (str(exc).splitlines() or [""])[0]
            with capsys.disabled():
                print(f"\n[criterion {k:2d}] FAIL  {title}: {type(exc).__name__} {msg}")
            raise
        with capsys.disabled():
            print(f"\n[criterion {k:2d}] PASS  {title} ({time.perf_counter() - t:.1f}s)")

    return run


@pytest.fixture(scope="module")
def desk_runs():
    """ne(n) against the oracle mass table for every desk-scale rank."""
    out = {}
    for n in DESK_RANKS:
        oracle = cached_classify(n)
        res = ne(n, oracle.mass_table(), RunConfig(subcommand="ne", n=n, d_max=40, threads=1))
        out[n] = (oracle, res)
    return out


def _primes(lo, hi):
    return [p for p in range(max(lo, 2), hi) if all(p % q for q in range(2, math.isqrt(p) + 1))]


def _distinct_p_neighbor(n, p, rnd, tries=5000):
    """A p-isotropic x with distinct coordinates in 1..(p-1)/2, or None."""
    pool = range(1, (p - 1) // 2 + 1)
    for _ in range(tries):
        x = rnd.sample(pool, n)
        if sum(v * v for v in x) % p == 0:
            return tuple(sorted(x))
    return None


def test_c1_neighbor_correctness(criterion):
    with criterion(1, "N_1(x) = I_n, N_2(1^8; eps) even unimodular with 240 roots and |O| = 696729600"):
        t = time.perf_counter()
        rnd = random.Random(1)
        for n in range(1, 9):
            x = [rnd.randint(-9, 9) for _ in range(n)]
            assert neighbor(1, x).gram == identity_lattice(n).gram
        lats = [neighbor(2, (1,) * 8, eps) for eps in (0, 1)]
        for lat in lats:
            assert lat.is_unimodular and is_even(lat)
            assert norm_counts(lat, 2)[2] == 240
            assert aut_order(lat).order == 696729600
        assert bv_equal(bv(lats[0]), bv(lats[1]))
        assert time.perf_counter() - t < 1.0


def test_c2_flagship_rank_29(criterion):
    with criterion(2, "N_59(1..29): r1 = r2 = 0, r3 = 1856, 928 vertices, 259840 edges, norm 3 basis"):
        t = time.perf_counter()
        lat = neighbor(59, tuple(range(1, 30)))
        assert lat.is_unimodular
        assert norm_counts(lat, 3) == {1: 0, 2: 0, 3: 1856}
        assert exc_size(lat) == 0
        inv = bv(lat)
        assert inv.vertices == 928
        # the edge count of the graph counts every 1 of A, loops included
        assert inv.arrows == 259840
        res = reduce(lat, 3, 1000, seed=0)
        assert res.ok and res.achieved_bound == 3
        assert all(lat.norm(v) == 3 for v in res.basis)
        assert time.perf_counter() - t < 120


def test_c3_desk_classification(criterion, desk_runs):
    with criterion(3, "ne(n) for n = 8, 12..16 matches the 2-neighbor oracle"):
        for n, (oracle, res) in desk_runs.items():
            assert res.complete and res.ledger.conserved()
            xp = oracle.x_prime()
            assert len(res.entries) == len(xp)
            for c in xp:
                hits = [e for e in res.entries if e.root == c.root and isometric(spec_neighbor(e.spec), c.lattice)]
                assert len(hits) == 1, f"n={n}: class {c.root} found {len(hits)} times"
                (e,) = hits
                assert aut_order(spec_neighbor(e.spec)).order == c.order
                assert e.mu == Fraction(RootSystem.parse(c.root).weyl_order(), c.order)
            datas = [bv(c.lattice).data for c in oracle.classes]
            assert len(set(datas)) == len(datas), f"n={n}: BV collision among the classes"


def test_c4_theta_identity_rank_28(criterion):
    with criterion(4, "r3 = 2240 + 8 r2 - 256 |Exc| on 20+ root-free neighbors of I_28"):
        rnd = random.Random(28)
        lats = [((2, (1,) * 28, 0), neighbor(2, (1,) * 28))]
        for d in [7, 8] + [rnd.randint(9, 48) for _ in range(20)]:
            lats.append(random_root_free_neighbor(28, d, rnd))
        parities = {spec[0] % 2 for spec, _ in lats}
        assert len(lats) >= 20 and parities == {0, 1}
        excs = []
        for spec, lat in lats:
            r = norm_counts(lat, 3)
            ex = exc_size(lat)
            excs.append(ex)
            assert r[1] == 0
            assert 0 <= ex <= 56
            assert r[3] == 2240 + 8 * r[2] - 256 * ex, spec
        # D28+ attains the upper end
        assert max(excs) == 56


def test_c5_minimal_characteristic_norm(criterion):
    with criterion(5, "char vectors of p-neighbors with no visible roots respect the norm bound"):
        rnd = random.Random(62)
        checked = nontrivial = 0
        k = 0
        while checked < 54:
            n = 12 + k % 18
            k += 1
            p = rnd.choice(_primes(2 * n + 1, 2 * n + 40))
            x = _distinct_p_neighbor(n, p, rnd)
            if x is None:
                continue
            assert visible_root_system(p, x).components == ()
            lat = neighbor(p, x)
            bound = lemma62_bound(n, p)
            top = min(n - 1, math.ceil(bound) - 1)
            rep = characteristic_vectors(lat, top)
            assert all(Fraction(v) >= bound for v in rep.norms)
            assert rep.vectors == ()
            checked += 1
            nontrivial += top >= n % 8
        assert nontrivial >= 10
        for p in _primes(59, 83):
            x = _distinct_p_neighbor(29, p, rnd)
            if x is None:
                continue
            assert characteristic_vectors(neighbor(p, x), 5).vectors == ()


def test_c6_companions_rank_12(criterion, d12plus, i12):
    with criterion(6, "D12+ has |Exc| = 24, singular companion I_12, |O(I_12)| = 2 |O(D12+)|"):
        assert exc_size(d12plus) == 24 == norm_counts(i12, 1)[1]
        sing = singular_companion(d12plus)
        assert isometric(sing, i12)
        assert root_system(sing) == root_system(d12plus) == RootSystem.parse("D12")
        assert aut_order(i12).order == 2 * aut_order(d12plus).order


def test_c7_weyl_and_normalization(criterion):
    with criterion(7, "|W(7A1 3A2 A7)| = 1114767360, example type 3^2 2^4 1^5 with index 3, end 2"):
        assert weyl_order(RootSystem.parse("7A1+3A2+A7")) == 1114767360
        x = (1, 1, 1, 2, 3, 4, 4, 5, 6, 7, 8, 8, 9, 9, 10, 10, 10, 11, 11)
        spec, _ = normalize(22, x)
        assert spec.x == x
        assert spec.type == (3, 3, 2, 2, 2, 2, 1, 1, 1, 1, 1)
        assert spec.index == 3 and spec.end == 2


def test_c8_verify_mode(criterion, desk_runs, tmp_path, capsys):
    with criterion(8, "verify passes on every desk list and flags duplicates, deletions, bad beta"):
        for n, (oracle, res) in desk_runs.items():
            table = oracle.mass_table()
            assert verify(res.entries, table).ok
            lst, tbl = tmp_path / f"l{n}.lst", tmp_path / f"m{n}.tbl"
            lst.write_text(format_list(res.entries))
            tbl.write_text(format_mass_table(table))
            assert main(["verify", "--list", str(lst), "--mass", str(tbl)]) == 0
            if not res.entries:
                continue
            e = res.entries[0]
            bad = {
                "duplicate": (res.entries + [e], "mass overshoot"),
                "deletion": (res.entries[1:], "mass deficit"),
                "beta": ([dataclasses.replace(e, beta=e.beta ^ 0xFF)] + res.entries[1:], "integrity"),
            }
            for name, (entries, prefix) in bad.items():
                rep = verify(entries, table)
                assert not rep.ok and rep.first.startswith(prefix), (n, name, rep.first)
                lst.write_text(format_list(entries))
                assert main(["verify", "--list", str(lst), "--mass", str(tbl)]) == 1
        capsys.readouterr()


def test_c9_strict_two_count(criterion):
    with criterion(9, "strict 2-neighbor candidates for a rank-28 type with roots 7A1 2A2: 65536"):
        x = [1, 1, 1, 2, 2, 2] + [v for v in range(3, 10) for _ in range(2)] + list(range(10, 18))
        spec = NeighborSpec(59, tuple(x))
        assert spec.n == 28 and spec.normalized
        assert str(visible_root_system(59, x)) == "7A1+2A2"
        assert sum(1 for _ in strict_two_patterns(spec)) == 65536


def test_c10_determinism(criterion, tmp_path, capsys):
    with criterion(10, "bne list and progress files are byte-identical across thread counts"):
        runs = [("2D8", "1/2", "4+4+4+4"), ("2E8", "1/2", "9+7")]
        for root, rmass, part in runs:
            outs = []
            for threads in (1, 2, 4):
                lst, prog = tmp_path / f"{root}.{threads}.lst", tmp_path / f"{root}.{threads}.prog"
                argv = ["bne", "--n", "16", "--root", root, "--rmass", rmass, "--partition", part,
                        "--d-max", "20", "--chunk", "2", "--seed", "7", "--threads", str(threads),
                        "--out", str(lst), "--progress", str(prog)]
                assert main(argv) == 0
                outs.append((lst.read_bytes(), prog.read_bytes()))
            assert outs[0][0]
            assert all(o == outs[0] for o in outs)
        capsys.readouterr()
