"""Double-description method for the pointed cone {y : A y >= 0}.

Rows of A are inserted in the given order.  Each ray carries a bitset of the
inserted rows it makes tight; two rays of opposite sign on the new row are
combined only when they are adjacent, which is decided combinatorially: the
intersection of their tight sets must have at least dim-2 members and no
third ray may be tight on a superset of it.

Rays are kept as primitive integer vectors.  Arithmetic runs in int64 while
a cheap magnitude bound says it is safe and switches to Python integers
(object arrays) otherwise, so results are exact either way.
"""
from __future__ import annotations

import logging
import math
import time

import numba as nb
import numpy as np

from .exact import integerize, inverse, rank

log = logging.getLogger(__name__)

_SAFE = 2 ** 62


@nb.njit(cache=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@nb.njit(cache=True)
def _adjacent_pairs(Z, pos, neg, thr):
    W = Z.shape[1]
    nr = Z.shape[0]
    out_p = []
    out_n = []
    inter = np.empty(W, dtype=np.uint64)
    for ip in range(pos.shape[0]):
        p = pos[ip]
        for iq in range(neg.shape[0]):
            q = neg[iq]
            cnt = 0
            for w in range(W):
                inter[w] = Z[p, w] & Z[q, w]
                cnt += _popcount64(inter[w])
            if cnt < thr:
                continue
            ok = True
            for r in range(nr):
                if r == p or r == q:
                    continue
                sub = True
                for w in range(W):
                    if (Z[r, w] & inter[w]) != inter[w]:
                        sub = False
                        break
                if sub:
                    ok = False
                    break
            if ok:
                out_p.append(p)
                out_n.append(q)
    return np.array(out_p, dtype=np.int64), np.array(out_n, dtype=np.int64)


def _initial_basis(A: list[list[int]]) -> list[int]:
    n = len(A[0])
    basis: list[int] = []
    for i in range(len(A)):
        if rank([A[j] for j in basis + [i]]) == len(basis) + 1:
            basis.append(i)
            if len(basis) == n:
                return basis
    raise ValueError(f"constraint matrix has rank {len(basis)} < {n}: cone is not pointed")


def _primitive(R):
    g = np.gcd.reduce(np.abs(R), axis=1)
    g[g == 0] = 1
    return R // g[:, None]


def _bound(R) -> int:
    if R.size == 0:
        return 0
    return int(np.abs(R).max())


def double_description(A, progress=None) -> np.ndarray:
    """Extreme rays of {y : A y >= 0} as primitive integer rows.

    ``A`` is an integer matrix whose rows span the ambient space.  The return
    dtype is int64 unless intermediate values outgrew it (then object).
    """
    A_list = [[int(x) for x in row] for row in A]
    m, n = len(A_list), len(A_list[0])
    basis = _initial_basis(A_list)
    Binv = inverse([A_list[i] for i in basis])
    R0 = [integerize([Binv[i][j] for i in range(n)]) for j in range(n)]
    amax = max(abs(x) for row in A_list for x in row)
    wide = amax * max(abs(x) for r in R0 for x in r) * n >= _SAFE
    dtype = object if wide else np.int64
    A_np = np.array(A_list, dtype=dtype)
    R = np.array(R0, dtype=dtype)
    W = (m + 63) // 64
    Z = np.zeros((n, W), dtype=np.uint64)
    for j in range(n):
        for k, b in enumerate(basis):
            if k != j:
                Z[j, b // 64] |= np.uint64(1) << np.uint64(b % 64)
    in_basis = set(basis)
    rest = [i for i in range(m) if i not in in_basis]
    for step, i in enumerate(rest):
        t0 = time.perf_counter()
        a = A_np[i]
        if dtype is not object and (_bound(R) * amax * n) ** 2 >= _SAFE:
            dtype = object
            R = R.astype(object)
            A_np = A_np.astype(object)
            a = A_np[i]
        s = R @ a
        pos = np.nonzero(s > 0)[0]
        neg = np.nonzero(s < 0)[0]
        zer = np.nonzero(s == 0)[0]
        bit = np.uint64(1) << np.uint64(i % 64)
        Z[zer, i // 64] |= bit
        pp, qq = _adjacent_pairs(Z, pos.astype(np.int64), neg.astype(np.int64), n - 2)
        if len(pp):
            newR = s[pp, None] * R[qq] - s[qq, None] * R[pp]
            newR = _primitive(newR)
            newZ = Z[pp] & Z[qq]
            newZ[:, i // 64] |= bit
        else:
            newR = np.empty((0, n), dtype=R.dtype)
            newZ = np.empty((0, W), dtype=np.uint64)
        keep = np.concatenate([pos, zer])
        R = np.concatenate([R[keep], newR])
        Z = np.concatenate([Z[keep], newZ])
        if progress is not None:
            progress(step, len(rest), len(R), time.perf_counter() - t0)
        log.debug("dd step %d/%d: +%d -%d 0:%d -> %d rays (%.2fs)",
                  step + 1, len(rest), len(pos), len(neg), len(zer), len(R), time.perf_counter() - t0)
    return R


def facets_of_integer_points(points, progress=None) -> list[tuple[tuple[int, ...], int]]:
    """Facets b.x <= g of conv(points) for full-dimensional integer point sets.

    Returned as primitive integer pairs (b, g), sorted lexicographically.
    """
    A = [[1] + [-int(x) for x in p] for p in points]
    R = double_description(A, progress=progress)
    out = []
    for row in R.tolist():
        g, b = int(row[0]), tuple(int(x) for x in row[1:])
        out.append((b, g))
    out.sort()
    return out


def scale_to_integer_points(points) -> tuple[list[list[int]], int]:
    """Common-denominator scaling of rational points: returns (integer points, L)."""
    from .exact import as_fraction
    L = 1
    fr = [[as_fraction(x) for x in p] for p in points]
    for p in fr:
        for x in p:
            L = L * x.denominator // math.gcd(L, x.denominator)
    return [[int(x * L) for x in p] for p in fr], L
