"""Exact two-phase simplex with Bland's anti-cycling rule.

Small, slow, and exact.  Used for uniqueness cross-checks and membership
queries where floating point would blur the answer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..errors import Infeasible, Unbounded
from .exact import as_fraction


@dataclass
class LinearProgram:
    """optimize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  and x >= 0 if ``nonneg``.

    ``sense`` is "max" or "min".  Free variables (nonneg=False) are split.
    """

    objective: Sequence
    A_ub: Sequence[Sequence] = field(default_factory=list)
    b_ub: Sequence = field(default_factory=list)
    A_eq: Sequence[Sequence] = field(default_factory=list)
    b_eq: Sequence = field(default_factory=list)
    sense: str = "max"
    nonneg: bool = True

    @property
    def nvars(self) -> int:
        return len(self.objective)


@dataclass
class LPResult:
    value: Fraction
    x: list[Fraction]
    pivots: int


def _pivot(T, r, c):
    row = T[r]
    inv = 1 / row[c]
    if inv != 1:
        T[r] = row = [x * inv for x in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]


def _run(T, basis, allowed, max_pivots):
    """Minimize with objective row T[-1] (reduced costs; last entry is -z)."""
    m = len(T) - 1
    rhs = len(T[0]) - 1
    pivots = 0
    while True:
        obj = T[m]
        enter = next((j for j in allowed if obj[j] < 0), None)
        if enter is None:
            return pivots
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][rhs] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Unbounded("objective is unbounded on the feasible region")
        leave = best[1]
        _pivot(T, leave, enter)
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")


def lp_solve(lp: LinearProgram, max_pivots: int = 10**6) -> LPResult:
    """Exact optimum and a basic optimal solution."""
    nv = lp.nvars
    c = [as_fraction(x) for x in lp.objective]
    A_ub = [[as_fraction(x) for x in r] for r in lp.A_ub]
    A_eq = [[as_fraction(x) for x in r] for r in lp.A_eq]
    b_ub = [as_fraction(x) for x in lp.b_ub]
    b_eq = [as_fraction(x) for x in lp.b_eq]
    if lp.sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', got {lp.sense!r}")
    if not lp.nonneg:
        c = c + [-x for x in c]
        A_ub = [r + [-x for x in r] for r in A_ub]
        A_eq = [r + [-x for x in r] for r in A_eq]
    n = len(c)
    if lp.sense == "max":
        c = [-x for x in c]
    # standard form: structural | slacks | artificials
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    ns = m_ub
    N = n + ns + m
    rows = []
    for i, (r, b) in enumerate(zip(A_ub, b_ub)):
        row = r + [Fraction(int(i == k)) for k in range(ns)]
        rows.append((row, b))
    for r, b in zip(A_eq, b_eq):
        rows.append((r + [Fraction(0)] * ns, b))
    T = []
    for i, (row, b) in enumerate(rows):
        if b < 0:
            row = [-x for x in row]
            b = -b
        T.append(row + [Fraction(int(i == k)) for k in range(m)] + [b])
    obj = [Fraction(0)] * (N + 1)
    for row in T:
        for j in range(n + ns):
            obj[j] -= row[j]
        obj[N] -= row[N]
    T.append(obj)
    basis = list(range(n + ns, N))
    pivots = _run(T, basis, list(range(n + ns)), max_pivots)
    if T[m][N] != 0:
        raise Infeasible("constraint system has no feasible point")
    # drive artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n + ns:
            col = next((j for j in range(n + ns) if T[i][j] != 0), None)
            if col is None:
                continue
            _pivot(T, i, col)
            basis[i] = col
            pivots += 1
        keep.append(i)
    T = [[row[j] for j in range(n + ns)] + [row[N]] for row in (T[i] for i in keep)]
    basis = [basis[i] for i in keep]
    M2 = n + ns
    full_c = c + [Fraction(0)] * ns
    obj = [full_c[j] for j in range(M2)] + [Fraction(0)]
    for i, bj in enumerate(basis):
        cb = full_c[bj]
        if cb:
            obj = [a - cb * b for a, b in zip(obj, T[i])]
    T.append(obj)
    pivots += _run(T, basis, list(range(M2)), max_pivots)
    x = [Fraction(0)] * M2
    for i, bj in enumerate(basis):
        x[bj] = T[i][M2]
    x = x[:n]
    if not lp.nonneg:
        x = [a - b for a, b in zip(x[:nv], x[nv:])]
    value = sum(as_fraction(ci) * xi for ci, xi in zip(lp.objective, x))
    return LPResult(value, x, pivots)


def feasible_point(A_ub=(), b_ub=(), A_eq=(), b_eq=(), nvars=None, nonneg=True) -> list[Fraction] | None:
    """Some feasible point, or None."""
    if nvars is None:
        nvars = len((list(A_ub) or list(A_eq))[0])
    try:
        res = lp_solve(LinearProgram([0] * nvars, A_ub, b_ub, A_eq, b_eq, "max", nonneg))
    except Infeasible:
        return None
    return res.x
