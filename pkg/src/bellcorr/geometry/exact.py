"""Exact linear algebra over the rationals.

Matrices are lists of rows; entries may be ints or Fractions.  Everything
returned is exact.  Elimination runs on Fractions, which is plenty for the
sizes used here (at most a few hundred columns).
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Rational = Fraction


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and 'p/q' strings.  Floats are rejected on purpose."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "__index__"):
        return Fraction(int(x))
    raise TypeError(f"refusing inexact value {x!r} of type {type(x).__name__}")


def fmt_rational(x) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.  Returns (matrix, pivot column list)."""
    M = [[as_fraction(x) for x in r] for r in rows]
    if not M:
        return [], []
    ncols = len(M[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][col]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank via fraction-free (Bareiss-style) elimination on integers when possible."""
    if not rows:
        return 0
    if all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
           for r in rows for x in r):
        M = [[int(x) for x in r] for r in rows]
        return _int_rank(M)
    return len(rref(rows)[1])


def _int_rank(M: list[list[int]]) -> int:
    m = len(M)
    n = len(M[0]) if m else 0
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        a = pr[col]
        for i in range(r + 1, m):
            b = M[i][col]
            if b:
                row = [a * x - b * y for x, y in zip(M[i], pr)]
                g = 0
                for x in row:
                    if x:
                        g = math.gcd(g, x)
                M[i] = [x // g for x in row] if g > 1 else row
        r += 1
        if r == m:
            break
    return r


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in piv]
    basis = []
    for fj in free:
        v = [Fraction(0)] * ncols
        v[fj] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -R[i][fj]
        basis.append(v)
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One solution of A x = b, or None when inconsistent."""
    n = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(piv):
        x[pc] = R[i][n]
    return x


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(A)]
    R, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def integerize(v: Sequence) -> list[int]:
    """Scale a rational vector to coprime integers (positive scaling only)."""
    v = [as_fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))
