"""numba kernels: Fincke-Pohst enumeration and FNV-1a hashing.

Enumeration runs in floating point with a small slack on the bound; every
caller re-checks the norms exactly in integer arithmetic.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def fp_quadratic_form(gram):
    """Cholesky-type decomposition used by Fincke-Pohst.

    Returns q with x.G.x = sum_i q[i,i] * (x_i + sum_{j>i} q[i,j] x_j)^2.
    """
    n = gram.shape[0]
    q = gram.astype(np.float64).copy()
    for i in range(n):
        for j in range(i + 1, n):
            q[j, i] = q[i, j]
            q[i, j] = q[i, j] / q[i, i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k, l] -= q[k, i] * q[i, l]
    for i in range(n):
        for j in range(i):
            q[i, j] = 0.0
    return q


@njit(cache=True)
def fp_enumerate(q, bound, center, half, limit):
    """All integer x with (x - c).G.(x - c) <= bound (plus float slack).

    With ``half`` set, the center must be zero; the zero vector is skipped
    and only vectors whose last nonzero coordinate is positive are emitted.
    ``limit`` > 0 stops after that many vectors (second return value True).
    """
    n = q.shape[0]
    eps = 1e-7 * max(1.0, bound)
    cap = 1024
    out = np.empty((cap, n), dtype=np.int64)
    count = 0
    x = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    rem = np.zeros(n + 1, dtype=np.float64)
    shift = np.zeros(n, dtype=np.float64)
    rem[n] = bound + eps
    truncated = False

    i = n - 1
    # set up level i
    s = 0.0
    shift[i] = center[i]
    z = np.sqrt(max(rem[i + 1], 0.0) / q[i, i])
    lo = int(np.ceil(shift[i] - z - 1e-9))
    hi[i] = int(np.floor(shift[i] + z + 1e-9))
    if half:
        lo = max(lo, 0)
    x[i] = lo - 1
    while True:
        x[i] += 1
        if x[i] > hi[i]:
            i += 1
            if i >= n:
                break
            continue
        t = x[i] - shift[i]
        r = rem[i + 1] - q[i, i] * t * t
        if r < 0.0:
            # below the interval's lower edge due to rounding; keep going
            if x[i] < shift[i]:
                continue
            i += 1
            if i >= n:
                break
            continue
        rem[i] = r
        if i == 0:
            if half:
                allzero = True
                for k in range(n):
                    if x[k] != 0:
                        allzero = False
                        break
                if allzero:
                    continue
            if count == cap:
                cap *= 2
                nout = np.empty((cap, n), dtype=np.int64)
                nout[:count] = out[:count]
                out = nout
            out[count] = x
            count += 1
            if limit > 0 and count >= limit:
                truncated = True
                break
            continue
        # descend
        i -= 1
        s = 0.0
        for j in range(i + 1, n):
            s += q[i, j] * (x[j] - center[j])
        shift[i] = center[i] - s
        z = np.sqrt(max(rem[i + 1], 0.0) / q[i, i])
        lo = int(np.ceil(shift[i] - z - 1e-9))
        hi[i] = int(np.floor(shift[i] + z + 1e-9))
        if half:
            upper_zero = True
            for k in range(i + 1, n):
                if x[k] != 0:
                    upper_zero = False
                    break
            if upper_zero:
                lo = max(lo, 0)
        x[i] = lo - 1
    return out[:count].copy(), truncated


FNV_OFFSET = np.uint64(0xCBF29CE484222325)
FNV_PRIME = np.uint64(0x100000001B3)


@njit(cache=True)
def fnv1a64(data):
    h = np.uint64(0xCBF29CE484222325)
    p = np.uint64(0x100000001B3)
    for b in data:
        h = (h ^ np.uint64(b)) * p
    return h
