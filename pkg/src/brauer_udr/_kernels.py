"""Row-reduction kernels over GF(p).

Two interchangeable implementations of the same elimination: a numba
``@njit`` loop kernel and a vectorised numpy fallback.  The numba path is
used when numba imports cleanly and ``BRAUER_UDR_DISABLE_NUMBA`` is unset
(or ``0``).  Both produce bit-identical output: pivots are taken at the first
column with a nonzero entry, from the smallest eligible row index.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("BRAUER_UDR_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:  # pragma: no cover - import guard
    if _DISABLE:
        raise ImportError("numba disabled by environment")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    njit = None


def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def _rref_numpy(A: np.ndarray, p: int, inv: np.ndarray, ncols: int) -> tuple[np.ndarray, np.ndarray]:
    m = A.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * inv[A[r, c]]) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            A[rows] = (A[rows] - np.outer(col[rows], A[r])) % p
        pivots.append(c)
        r += 1
    return A, np.asarray(pivots, dtype=np.int64)


if HAVE_NUMBA:

    @njit(cache=True)
    def _rref_numba(A, p, inv, ncols):  # pragma: no cover - compiled
        m, n = A.shape
        pivots = np.empty(min(m, ncols), dtype=np.int64)
        r = 0
        for c in range(ncols):
            if r == m:
                break
            k = -1
            for i in range(r, m):
                if A[i, c] != 0:
                    k = i
                    break
            if k < 0:
                continue
            if k != r:
                for j in range(n):
                    t = A[r, j]
                    A[r, j] = A[k, j]
                    A[k, j] = t
            s = inv[A[r, c]]
            if s != 1:
                for j in range(c, n):
                    A[r, j] = (A[r, j] * s) % p
            for i in range(m):
                if i == r:
                    continue
                f = A[i, c]
                if f == 0:
                    continue
                for j in range(c, n):
                    if A[r, j] != 0:
                        A[i, j] = (A[i, j] - f * A[r, j]) % p
            pivots[r] = c
            r += 1
        return A, pivots[:r].copy()


def rref_numpy(A: np.ndarray, p: int, ncols: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    A = np.array(A, dtype=np.int64, copy=True) % p
    if A.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    return _rref_numpy(A, p, _inv(p), A.shape[1] if ncols is None else ncols)


def rref_jit(A: np.ndarray, p: int, ncols: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    if not HAVE_NUMBA:
        raise RuntimeError("numba backend unavailable")
    A = np.ascontiguousarray(np.array(A, dtype=np.int64, copy=True) % p)
    if A.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    if A.size == 0:
        return A, np.zeros(0, dtype=np.int64)
    return _rref_numba(A, p, _inv(p), A.shape[1] if ncols is None else ncols)


_INV_CACHE: dict[int, np.ndarray] = {}


def _inv(p: int) -> np.ndarray:
    t = _INV_CACHE.get(p)
    if t is None:
        t = _INV_CACHE[p] = inverse_table(p)
    return t


def rref(A: np.ndarray, p: int, ncols: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of ``A`` mod ``p``.

    Only the first ``ncols`` columns are eligible as pivots (augmented systems
    pass the coefficient width here).  Returns ``(R, pivot_columns)``.
    """
    if HAVE_NUMBA:
        return rref_jit(A, p, ncols)
    return rref_numpy(A, p, ncols)


BACKEND = "numba" if HAVE_NUMBA else "numpy"
