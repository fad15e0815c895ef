"""Joint distributions p(m|s), no-signaling constraints and generalized PR boxes.

Uniqueness of the no-signaling extension of a deterministic correlator is
decided on the support {m : sum_j m_j = f(s)}: the vertex constraints force
every other entry to zero, and the generalized box is strictly positive on
the support, so it lies in the relative interior of the feasible set.  The
feasible set is a single point iff the equality system (normalization plus
no-signaling) restricted to the support has full column rank.  The
per-coordinate LP route is kept as ``method="lp"``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import Infeasible, InvalidSplit, NotNonsignaling
from .geometry.exact import as_fraction, fmt_rational, nullspace, rank
from .geometry.lp import LinearProgram, lp_solve
from .modfunc import FunctionOverSettings, Setting, is_prime


@dataclass(frozen=True)
class JointDistribution:
    """Entries ordered settings-outer, outcome-strings-inner (both lexicographic)."""

    setting: Setting
    entries: tuple

    def __post_init__(self):
        ent = tuple(as_fraction(x) for x in self.entries)
        st = self.setting
        M = st.d ** st.n
        if len(ent) != M * st.num_strings:
            raise ValueError(f"expected {M * st.num_strings} entries, got {len(ent)}")
        if any(x < 0 for x in ent):
            raise ValueError("negative probability")
        for i in range(st.num_strings):
            if sum(ent[i * M:(i + 1) * M]) != 1:
                raise ValueError(f"distribution for setting {st.strings[i]} is not normalized")
        object.__setattr__(self, "entries", ent)

    @cached_property
    def outcome_strings(self) -> tuple:
        return tuple(itertools.product(range(self.setting.d), repeat=self.setting.n))

    @property
    def num_outcomes(self) -> int:
        return self.setting.d ** self.setting.n

    def row(self, s_index: int) -> tuple:
        M = self.num_outcomes
        return self.entries[s_index * M:(s_index + 1) * M]

    def p(self, m: Sequence[int], s: Sequence[int]) -> Fraction:
        d = self.setting.d
        mi = 0
        for x in m:
            mi = mi * d + x
        return self.row(self.setting.index(s))[mi]

    def to_text(self) -> str:
        lines = [self.setting.header()]
        for i in range(self.setting.num_strings):
            lines.append(" ".join(fmt_rational(x) for x in self.row(i)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "JointDistribution":
        lines = text.strip().splitlines()
        st = Setting.parse(lines[0])
        return cls(st, tuple(Fraction(x) for l in lines[1:] for x in l.split()))

    @classmethod
    def from_function(cls, setting: Setting, fn) -> "JointDistribution":
        """Build from fn(m, s) -> probability."""
        outs = list(itertools.product(range(setting.d), repeat=setting.n))
        return cls(setting, tuple(fn(m, s) for s in setting.strings for m in outs))

    def mix(self, other: "JointDistribution", t) -> "JointDistribution":
        t = as_fraction(t)
        return JointDistribution(self.setting, tuple((1 - t) * a + t * b for a, b in zip(self.entries, other.entries)))


def gen_pr_box(f: FunctionOverSettings) -> JointDistribution:
    """d^(1-n) on every outcome string whose digit sum is f(s)."""
    st = f.setting
    w = Fraction(1, st.d ** (st.n - 1))
    return JointDistribution.from_function(st, lambda m, s: w if sum(m) % st.d == f(s) else 0)


def bipartite_box(f: FunctionOverSettings, A: Sequence[int], B: Sequence[int],
                  fA: FunctionOverSettings, fB: FunctionOverSettings) -> JointDistribution:
    """d^(2-n) on strings with sum_A m = fA(s_A) and sum_B m = fB(s_B)."""
    st = f.setting
    d, n = st.d, st.n
    A, B = tuple(A), tuple(B)
    if sorted(A + B) != list(range(n)) or not A or not B:
        raise InvalidSplit(f"{A}|{B} is not a bipartition of {n} parties")
    if fA.setting != st.sub(A) or fB.setting != st.sub(B):
        raise InvalidSplit("component functions live on the wrong sub-settings")
    for s in st.strings:
        if (fA(tuple(s[j] for j in A)) + fB(tuple(s[j] for j in B))) % d != f(s):
            raise InvalidSplit(f"fA + fB differs from f at s={s}")
    w = Fraction(1, d ** (n - 2))

    def prob(m, s):
        okA = sum(m[j] for j in A) % d == fA(tuple(s[j] for j in A))
        okB = sum(m[j] for j in B) % d == fB(tuple(s[j] for j in B))
        return w if okA and okB else 0
    return JointDistribution.from_function(st, prob)


# ---- constraint system -------------------------------------------------------

def _var_index(st: Setting, si: int, m: Sequence[int]) -> int:
    mi = 0
    for x in m:
        mi = mi * st.d + x
    return si * st.d ** st.n + mi


def normalization_rows(st: Setting) -> list[tuple[list[int], int]]:
    M = st.d ** st.n
    nv = M * st.num_strings
    rows = []
    for si in range(st.num_strings):
        r = [0] * nv
        for mi in range(M):
            r[si * M + mi] = 1
        rows.append((r, 1))
    return rows


def nonsignaling_rows(st: Setting) -> list[list[int]]:
    """For every party j: the marginal of the other parties does not depend on s_j.

    These equalities, over all j, imply that every marginal over any party
    subset is independent of the settings outside it.
    """
    n, d = st.n, st.d
    nv = d ** n * st.num_strings
    rows = []
    for j in range(n):
        others = [i for i in range(n) if i != j]
        other_settings = itertools.product(*(range(st.alphabet_sizes[i]) for i in others))
        for s_rest in other_settings:
            for m_rest in itertools.product(range(d), repeat=n - 1):
                def column_set(sj):
                    s = [0] * n
                    m = [0] * n
                    for i, x, y in zip(others, s_rest, m_rest):
                        s[i], m[i] = x, y
                    s[j] = sj
                    si = st.index(s)
                    cols = []
                    for mj in range(d):
                        m[j] = mj
                        cols.append(_var_index(st, si, m))
                    return cols
                base = column_set(0)
                for sj in range(1, st.alphabet_sizes[j]):
                    r = [0] * nv
                    for c in column_set(sj):
                        r[c] += 1
                    for c in base:
                        r[c] -= 1
                    rows.append(r)
    return rows


@dataclass
class NsConstraintSystem:
    setting: Setting
    equalities: list  # (row, rhs)
    nvars: int

    @classmethod
    def build(cls, st: Setting) -> "NsConstraintSystem":
        eqs = normalization_rows(st) + [(r, 0) for r in nonsignaling_rows(st)]
        return cls(st, eqs, st.d ** st.n * st.num_strings)


def is_nonsignaling(dist: JointDistribution) -> bool:
    x = dist.entries
    for r in nonsignaling_rows(dist.setting):
        if sum(a * b for a, b in zip(r, x) if a):
            return False
    return True


def _support_columns(f: FunctionOverSettings) -> list[int]:
    st = f.setting
    cols = []
    outs = list(itertools.product(range(st.d), repeat=st.n))
    for si, s in enumerate(st.strings):
        v = f.table[si]
        for m in outs:
            if sum(m) % st.d == v:
                cols.append(_var_index(st, si, m))
    return cols


def _restricted_rows(system: NsConstraintSystem, cols: list[int]):
    rows = []
    for r, _ in system.equalities:
        rr = [r[c] for c in cols]
        if any(rr):
            rows.append(rr)
    return rows


@dataclass
class UniquenessResult:
    unique: bool
    witness: object  # JointDistribution or (JointDistribution, JointDistribution)
    prime_outcomes: bool  # True when d is prime
    method: str = "rank"

    def __bool__(self):
        return self.unique


def unique_ns_for_vertex(f: FunctionOverSettings, method: str = "rank") -> UniquenessResult:
    """Is gen_pr_box(f) the only no-signaling distribution with correlator f?"""
    st = f.setting
    system = NsConstraintSystem.build(st)
    cols = _support_columns(f)
    box = gen_pr_box(f)
    scope = is_prime(st.d)
    if method == "rank":
        rows = _restricted_rows(system, cols)
        if rank(rows) == len(cols):
            return UniquenessResult(True, box, scope)
        z = nullspace(rows, len(cols))[0]
        x = list(box.entries)
        step = min(x[c] / abs(zi) for c, zi in zip(cols, z) if zi < 0) if any(zi < 0 for zi in z) else Fraction(1)
        y = x[:]
        for c, zi in zip(cols, z):
            y[c] += step * zi
        return UniquenessResult(False, (box, JointDistribution(st, tuple(y))), scope)
    if method == "lp":
        return _unique_by_lp(f, system, cols, box, scope)
    raise ValueError(f"unknown method {method!r}")


def _unique_by_lp(f, system, cols, box, scope) -> UniquenessResult:
    st = f.setting
    A_eq = [[r[c] for c in cols] for r, _ in system.equalities]
    b_eq = [b for _, b in system.equalities]
    nv = len(cols)
    for t in range(nv):
        obj = [0] * nv
        obj[t] = 1
        try:
            hi = lp_solve(LinearProgram(obj, A_eq=A_eq, b_eq=b_eq, sense="max"))
            lo = lp_solve(LinearProgram(obj, A_eq=A_eq, b_eq=b_eq, sense="min"))
        except Infeasible as exc:
            raise AssertionError("vertex constraints infeasible for a valid function") from exc
        if hi.value != lo.value:
            def embed(x):
                full = [Fraction(0)] * system.nvars
                for c, v in zip(cols, x):
                    full[c] = v
                return JointDistribution(st, tuple(full))
            return UniquenessResult(False, (embed(hi.x), embed(lo.x)), scope, "lp")
    return UniquenessResult(True, box, scope, "lp")


def is_ns_vertex(dist: JointDistribution) -> bool:
    """True iff no other no-signaling distribution has support inside dist's support."""
    if not is_nonsignaling(dist):
        raise NotNonsignaling("distribution is signaling")
    system = NsConstraintSystem.build(dist.setting)
    cols = [i for i, x in enumerate(dist.entries) if x > 0]
    return rank(_restricted_rows(system, cols)) == len(cols)


def local_deterministic(setting: Setting, outputs: Sequence[Sequence[int]]) -> JointDistribution:
    """Product of local deterministic boxes: party j outputs outputs[j][s_j]."""
    return JointDistribution.from_function(
        setting, lambda m, s: int(all(m[j] == outputs[j][s[j]] for j in range(setting.n))))


def product_distribution(setting: Setting, locals_: Sequence[Sequence[Sequence]]) -> JointDistribution:
    """Product of local distributions: locals_[j][s_j][m_j]."""
    def prob(m, s):
        p = Fraction(1)
        for j in range(setting.n):
            p *= as_fraction(locals_[j][s[j]][m[j]])
        return p
    return JointDistribution.from_function(setting, prob)
