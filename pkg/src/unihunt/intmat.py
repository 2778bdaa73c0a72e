"""Exact integer matrix helpers (Python ints throughout)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return [list(r) for r in zip(*a)]


def congruent(b: Sequence[Sequence[int]], g: Sequence[Sequence[int]]) -> Matrix:
    """B G B^t."""
    return matmul(matmul(b, g), transpose(b))


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def det(a: Sequence[Sequence[int]]) -> int:
    """Determinant by Bareiss fraction-free elimination."""
    m = [list(map(int, r)) for r in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * pk - mik * rowk[j]) // prev
            rowi[k] = 0
        prev = pk
    return sign * m[n - 1][n - 1]


def det_mod(a: Sequence[Sequence[int]], p: int) -> int:
    """Determinant modulo a prime p."""
    m = [[x % p for x in r] for r in a]
    n = len(m)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        pc = m[c][c]
        d = d * pc % p
        inv = pow(pc, -1, p)
        rowc = m[c]
        for i in range(c + 1, n):
            f = m[i][c] * inv % p
            if f:
                rowi = m[i]
                for j in range(c, n):
                    rowi[j] = (rowi[j] - f * rowc[j]) % p
    return d % p


def rank_mod2(rows: Sequence[int], nbits: int) -> int:
    """Rank over GF(2) of rows packed as integers."""
    basis: dict[int, int] = {}
    r = 0
    for v in rows:
        for bit in range(nbits - 1, -1, -1):
            if not (v >> bit) & 1:
                continue
            if bit in basis:
                v ^= basis[bit]
            else:
                basis[bit] = v
                r += 1
                break
    return r


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows only: an upper echelon basis with positive
    pivots and entries above each pivot reduced into [0, pivot).
    """
    a = [list(map(int, r)) for r in rows if any(r)]
    if not a:
        return []
    m, n = len(a), len(a[0])
    piv = 0
    for c in range(n):
        if piv >= m:
            break
        for i in range(piv + 1, m):
            if a[i][c] == 0:
                continue
            x, y = a[piv][c], a[i][c]
            g, s, t = xgcd(x, y)
            u, v = x // g, y // g
            rp, ri = a[piv], a[i]
            a[piv] = [s * p + t * q for p, q in zip(rp, ri)]
            a[i] = [u * q - v * p for p, q in zip(rp, ri)]
        if a[piv][c] == 0:
            continue
        if a[piv][c] < 0:
            a[piv] = [-e for e in a[piv]]
        pc = a[piv][c]
        for k in range(piv):
            f = a[k][c] // pc
            if f:
                a[k] = [e - f * p for e, p in zip(a[k], a[piv])]
        piv += 1
    return a[:piv]


def solve_rational(a: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    """Solve x.A = b (row vector x) for square nonsingular A."""
    n = len(a)
    # transpose: A^t x^t = b^t
    m = [[Fraction(a[j][i]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        pc = m[c][c]
        m[c] = [e / pc for e in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [e - f * p for e, p in zip(m[i], m[c])]
    return [m[i][n] for i in range(n)]


def inverse_unimodular(a: Sequence[Sequence[int]]) -> Matrix:
    """Integer inverse of a matrix with determinant +-1."""
    n = len(a)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        pc = m[c][c]
        m[c] = [e / pc for e in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [e - f * p for e, p in zip(m[i], m[c])]
    out = []
    for r in m:
        row = r[n:]
        if any(e.denominator != 1 for e in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(e) for e in row])
    return out


def solve_mod2(gram: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[int]:
    """Solve G w = rhs over GF(2) for G invertible mod 2."""
    n = len(gram)
    rows = []
    for i in range(n):
        v = 0
        for j in range(n):
            if gram[i][j] & 1:
                v |= 1 << j
        if rhs[i] & 1:
            v |= 1 << n
        rows.append(v)
    for c in range(n):
        piv = next((i for i in range(c, n) if (rows[i] >> c) & 1), None)
        if piv is None:
            raise ValueError("matrix is singular mod 2")
        rows[c], rows[piv] = rows[piv], rows[c]
        for i in range(n):
            if i != c and (rows[i] >> c) & 1:
                rows[i] ^= rows[c]
    return [(rows[i] >> n) & 1 for i in range(n)]


def lll_gram(gram: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> tuple[Matrix, Matrix]:
    """Integral LLL on a positive definite Gram matrix.

    Works on the Gram matrix only, with exact integer Gram-Schmidt data
    (Cohen, Alg. 2.6.7). Returns (H, G') with G' = H G H^t and H unimodular.
    """
    n = len(gram)
    g = [list(map(int, r)) for r in gram]
    h = identity(n)
    if n <= 1:
        return h, g
    num, den = delta.numerator, delta.denominator
    d = [0] * (n + 1)  # d[0] = 1, d[i] for 1-based i
    d[0] = 1
    lam = [[0] * n for _ in range(n)]  # lam[k][j], 0-based, j < k

    def red(k: int, l: int) -> None:
        # d index for 0-based l is l+1
        dl = d[l + 1]
        if 2 * abs(lam[k][l]) <= dl:
            return
        q = (2 * lam[k][l] + dl) // (2 * dl)
        hk, hl = h[k], h[l]
        h[k] = [a - q * b for a, b in zip(hk, hl)]
        # b_k <- b_k - q b_l on the Gram matrix
        gk, gl = g[k], g[l]
        newrow = [a - q * b for a, b in zip(gk, gl)]
        newrow[k] = gk[k] - 2 * q * gk[l] + q * q * gl[l]
        g[k] = newrow
        for i in range(n):
            if i != k:
                g[i][k] = newrow[i]
        lam[k][l] -= q * dl
        lk, ll = lam[k], lam[l]
        for i in range(l):
            lk[i] -= q * ll[i]

    def swap(k: int) -> None:
        # exchange b_k and b_{k-1}; 0-based k >= 1
        h[k], h[k - 1] = h[k - 1], h[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        dk, dk1, dk2 = d[k + 1], d[k], d[k - 1]
        b = (dk2 * dk + lm * lm) // dk1
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (dk * lam[i][k - 1] - lm * t) // dk1
            lam[i][k - 1] = (b * t + lm * lam[i][k]) // dk
        d[k] = b

    d[1] = g[0][0]
    if d[1] <= 0:
        raise ValueError("Gram matrix is not positive definite")
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = g[k][j]
                lk, lj = lam[k], lam[j]
                for i in range(j):
                    u = (d[i + 1] * u - lk[i] * lj[i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise ValueError("Gram matrix is not positive definite")
                    d[k + 1] = u
        red(k, k - 1)
        lm = lam[k][k - 1]
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lm * lm:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return h, g
