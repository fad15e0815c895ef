"""Correlator vectors p(k|s) and the local-hidden-variable polytope.

Coordinates: setting strings in lexicographic order (s_1 most significant)
on the outside, k = 1..d-1 inside.  The full form additionally carries k = 0
as the first entry of every block.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import DimensionMismatch, NotNormalizable, SettingMismatch
from .geometry import HRep, VRep, facet_enumeration, membership
from .geometry.exact import as_fraction, fmt_rational
from .geometry.lp import feasible_point
from .geometry.polytope import separating_facet
from .modfunc import FunctionOverSettings, Setting, enumerate_n_partite_linear


def coord(setting: Setting, s_index: int, k: int) -> int:
    """Position of p(k|s) (k >= 1) in the reduced vector."""
    return s_index * (setting.d - 1) + (k - 1)


@dataclass(frozen=True)
class CorrelatorVector:
    setting: Setting
    entries: tuple

    def __post_init__(self):
        ent = tuple(as_fraction(x) for x in self.entries)
        if len(ent) != self.setting.reduced_dim:
            raise DimensionMismatch(
                f"expected {self.setting.reduced_dim} entries for {self.setting}, got {len(ent)}")
        object.__setattr__(self, "entries", ent)

    def p(self, k: int, s: Sequence[int]) -> Fraction:
        if k == 0:
            return 1 - sum(self.block(self.setting.index(s)))
        return self.entries[coord(self.setting, self.setting.index(s), k)]

    def block(self, s_index: int) -> tuple:
        w = self.setting.d - 1
        return self.entries[s_index * w:(s_index + 1) * w]

    def in_P(self) -> bool:
        w = self.setting.d - 1
        return all(x >= 0 for x in self.entries) and all(
            sum(self.entries[i * w:(i + 1) * w]) <= 1 for i in range(self.setting.num_strings))

    def to_text(self) -> str:
        return self.setting.header() + "\n" + " ".join(fmt_rational(x) for x in self.entries) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CorrelatorVector":
        head, body = text.strip().splitlines()[:2]
        return cls(Setting.parse(head), tuple(Fraction(x) for x in body.split()))

    @classmethod
    def uniform(cls, setting: Setting) -> "CorrelatorVector":
        return cls(setting, (Fraction(1, setting.d),) * setting.reduced_dim)

    @classmethod
    def zero(cls, setting: Setting) -> "CorrelatorVector":
        return cls(setting, (0,) * setting.reduced_dim)


@dataclass(frozen=True)
class FullCorrelatorVector:
    """p(k|s) for every k in 0..d-1; block of d entries per setting string."""

    setting: Setting
    entries: tuple

    def __post_init__(self):
        ent = tuple(as_fraction(x) for x in self.entries)
        d = self.setting.d
        if len(ent) != d * self.setting.num_strings:
            raise DimensionMismatch("wrong length for a full correlator")
        if any(x < 0 for x in ent):
            raise NotNormalizable("negative probability in full correlator")
        for i in range(self.setting.num_strings):
            if sum(ent[i * d:(i + 1) * d]) != 1:
                raise NotNormalizable(f"block {i} does not sum to 1")
        object.__setattr__(self, "entries", ent)


def lift_to_full(corr: CorrelatorVector) -> FullCorrelatorVector:
    st = corr.setting
    out = []
    for i in range(st.num_strings):
        blk = corr.block(i)
        rest = 1 - sum(blk)
        if rest < 0 or any(x < 0 for x in blk):
            raise NotNormalizable(f"setting block {st.strings[i]} is not a sub-probability vector")
        out.append(rest)
        out.extend(blk)
    return FullCorrelatorVector(st, tuple(out))


def project_to_reduced(full: FullCorrelatorVector) -> CorrelatorVector:
    d = full.setting.d
    return CorrelatorVector(full.setting, tuple(
        x for i, x in enumerate(full.entries) if i % d != 0))


def deterministic_correlator(f: FunctionOverSettings) -> CorrelatorVector:
    st = f.setting
    ent = [0] * st.reduced_dim
    for i, v in enumerate(f.table):
        if v:
            ent[coord(st, i, v)] = 1
    return CorrelatorVector(st, tuple(ent))


def deterministic_vector(f: FunctionOverSettings) -> tuple[int, ...]:
    """Integer 0/1 tuple of the deterministic correlator (fast path, no Fractions)."""
    st = f.setting
    w = st.d - 1
    ent = [0] * st.reduced_dim
    for i, v in enumerate(f.table):
        if v:
            ent[i * w + v - 1] = 1
    return tuple(ent)


def correlator_from_distribution(dist) -> CorrelatorVector:
    """p(k|s) = sum of p(m|s) over outcome strings with digit sum k (mod d)."""
    st = dist.setting
    d = st.d
    out = [Fraction(0)] * st.reduced_dim
    for si in range(st.num_strings):
        row = dist.row(si)
        for mi, m in enumerate(dist.outcome_strings):
            k = sum(m) % d
            if k and row[mi]:
                out[coord(st, si, k)] += row[mi]
    return CorrelatorVector(st, tuple(out))


def lhv_vertices(setting: Setting) -> list[tuple[int, ...]]:
    """Deterministic correlators of all n-partite linear functions, lexicographically sorted."""
    return sorted(deterministic_vector(f) for f in enumerate_n_partite_linear(setting))


class LhvPolytope:
    """Convex hull of the deterministic correlators of n-partite linear functions."""

    def __init__(self, setting: Setting):
        self.setting = setting
        self._lock = threading.Lock()
        self._hrep: HRep | None = None

    @cached_property
    def vertices(self) -> list[tuple[int, ...]]:
        return lhv_vertices(self.setting)

    @cached_property
    def vrep(self) -> VRep:
        return VRep.from_points(self.vertices)

    @property
    def has_hrep(self) -> bool:
        return self._hrep is not None

    def set_hrep(self, h: HRep) -> HRep:
        with self._lock:
            if self._hrep is None:
                self._hrep = h
            return self._hrep

    def hrep(self, progress=None) -> HRep:
        """Facets, computed once; concurrent callers share the first result."""
        with self._lock:
            if self._hrep is None:
                self._hrep = facet_enumeration(self.vrep, progress=progress)
            return self._hrep

    def __len__(self):
        return len(self.vertices)


@dataclass
class LhvMembership:
    member: bool
    weights: list | None = None
    violated: tuple | None = None

    def __bool__(self):
        return self.member


def lhv_membership(corr: CorrelatorVector, lhv: LhvPolytope) -> LhvMembership:
    """Decide corr in L.  Members come with convex weights over ``lhv.vertices``.

    With cached facets the violated facet is looked up directly; otherwise a
    single polar LP finds one (see ``separating_facet``).
    """
    if corr.setting != lhv.setting:
        raise SettingMismatch(f"{corr.setting} vs {lhv.setting}")
    p = list(corr.entries)
    if lhv.has_hrep:
        res = membership(p, lhv.hrep())
        if not res.member:
            return LhvMembership(False, violated=res.violated)
    else:
        inside, facet = separating_facet(p, lhv.vrep)
        if not inside:
            return LhvMembership(False, violated=facet)
    V = lhv.vertices
    D = len(p)
    A_eq = [[v[j] for v in V] for j in range(D)] + [[1] * len(V)]
    b_eq = p + [1]
    w = feasible_point(A_eq=A_eq, b_eq=b_eq, nvars=len(V))
    if w is None:
        raise AssertionError("facet test and convex-combination LP disagree")
    return LhvMembership(True, weights=w)
