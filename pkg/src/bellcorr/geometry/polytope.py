"""V- and H-representations, facet enumeration and facet tests."""
from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import DimensionMismatch, NotValidInequality
from .dd import facets_of_integer_points, scale_to_integer_points
from .exact import as_fraction, dot, fmt_rational, integerize, nullspace, rank, rref
from .lp import LinearProgram, lp_solve


def canonical_inequality(b: Sequence, gamma) -> tuple[tuple[int, ...], int]:
    """Scale (b, gamma) by a positive factor to coprime integers."""
    v = integerize(list(b) + [gamma])
    if not any(v[:-1]):
        raise ValueError("zero coefficient row")
    return tuple(v[:-1]), v[-1]


@dataclass(frozen=True)
class VRep:
    ambient_dim: int
    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(as_fraction(x) for x in v) for v in self.vertices)
        for v in verts:
            if len(v) != self.ambient_dim:
                raise DimensionMismatch(f"vertex of length {len(v)} in R^{self.ambient_dim}")
        if len(set(verts)) != len(verts):
            raise ValueError("vertices must be pairwise distinct")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_points(cls, points) -> "VRep":
        points = [tuple(p) for p in points]
        if not points:
            raise ValueError("need at least one point")
        return cls(len(points[0]), tuple(points))

    def __len__(self):
        return len(self.vertices)


@dataclass
class HRep:
    """Inequalities b.x <= g (primitive integer rows) and equalities a.x = beta."""

    ambient_dim: int
    inequalities: list = field(default_factory=list)
    equalities: list = field(default_factory=list)

    def __post_init__(self):
        ineqs = []
        for b, g in self.inequalities:
            if len(b) != self.ambient_dim:
                raise DimensionMismatch(f"row of length {len(b)} in R^{self.ambient_dim}")
            ineqs.append(canonical_inequality(b, g))
        self.inequalities = ineqs
        self.equalities = [(tuple(as_fraction(x) for x in a), as_fraction(beta)) for a, beta in self.equalities]

    def __len__(self):
        return len(self.inequalities)


@dataclass(frozen=True)
class AffineHull:
    """{x0 + span(directions)} together with its defining equalities."""

    base: tuple
    directions: list
    equalities: list

    @property
    def dim(self) -> int:
        return len(self.directions)


def affine_hull(points: Sequence[Sequence]) -> AffineHull:
    pts = [[as_fraction(x) for x in p] for p in points]
    base = pts[0]
    D = len(base)
    diffs = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    R, piv = rref(diffs, D) if diffs else ([], [])
    directions = [row for row in R[:len(piv)]]
    normals = nullspace(directions, D) if directions else nullspace([], D)
    eqs = []
    for nvec in normals:
        nv = integerize(nvec)
        eqs.append((tuple(Fraction(x) for x in nv), dot(nv, base)))
    return AffineHull(tuple(base), directions, eqs)


def affinely_independent(points: Sequence[Sequence]) -> bool:
    if len(points) <= 1:
        return True
    base = [as_fraction(x) for x in points[0]]
    diffs = [[as_fraction(x) - y for x, y in zip(p, base)] for p in points[1:]]
    if len(diffs) > len(base):
        return False
    return rank(diffs) == len(diffs)


def _affine_rank(points) -> int:
    """Affine dimension of a point set (-1 for empty)."""
    if not points:
        return -1
    base = points[0]
    diffs = [[x - y for x, y in zip(p, base)] for p in points[1:]]
    return rank(diffs) if diffs else 0


def facet_enumeration(v: VRep, progress=None) -> HRep:
    """All facets of conv(v) by double description, plus the affine-hull equalities.

    Lower-dimensional inputs are projected onto a coordinate subset on which
    the projection is injective, enumerated there, and lifted back with zeros
    in the dropped coordinates.
    """
    if len(v) == 0:
        raise ValueError("empty vertex set")
    D = v.ambient_dim
    verts = sorted(v.vertices)
    hull = affine_hull(verts)
    if hull.dim == 0:
        return HRep(D, [], hull.equalities)
    _, coords = rref(hull.directions, D)
    sub = [[p[j] for j in coords] for p in verts]
    ints, L = scale_to_integer_points(sub)
    raw = facets_of_integer_points(ints, progress=progress)
    ineqs = []
    for b, g in raw:
        full = [0] * D
        for j, bj in zip(coords, b):
            full[j] = bj
        ineqs.append(canonical_inequality(full, Fraction(g, L)))
    ineqs.sort()
    return HRep(D, ineqs, hull.equalities)


def saturating_points(ineq, points):
    b, g = ineq
    g = as_fraction(g)
    sat = []
    for p in points:
        val = dot(b, p)
        if val > g:
            raise NotValidInequality(f"point {p} violates the inequality ({val} > {g})")
        if val == g:
            sat.append(p)
    return sat


def polytope_dimension(v: VRep) -> int:
    return affine_hull(v.vertices).dim


def is_facet_defining(ineq, v: VRep, dim: int | None = None) -> bool:
    """True iff the saturated vertices span an affine space of dimension dim(P) - 1.

    Equivalently, at least dim(P) affinely independent vertices lie on the
    hyperplane, and the hyperplane does not contain the whole polytope.
    """
    b, g = ineq
    if len(b) != v.ambient_dim:
        raise DimensionMismatch("inequality and vertex set differ in dimension")
    sat = saturating_points((b, g), v.vertices)
    if dim is None:
        dim = polytope_dimension(v)
    if len(sat) == len(v):
        return False
    return _affine_rank(sat) == dim - 1


@dataclass
class MembershipResult:
    member: bool
    violated: tuple | None = None

    def __bool__(self):
        return self.member


def membership(point: Sequence, h: HRep) -> MembershipResult:
    p = [as_fraction(x) for x in point]
    if len(p) != h.ambient_dim:
        raise DimensionMismatch("point and H-representation differ in dimension")
    for a, beta in h.equalities:
        if dot(a, p) != beta:
            return MembershipResult(False, ("eq", a, beta))
    for b, g in h.inequalities:
        if dot(b, p) > g:
            return MembershipResult(False, (b, g))
    return MembershipResult(True)


def max_violation(point: Sequence, h: HRep) -> Fraction:
    """max over inequalities of b.p - g (<= 0 iff the inequalities hold)."""
    p = [as_fraction(x) for x in point]
    return max(dot(b, p) - g for b, g in h.inequalities)


def separating_facet(point: Sequence, v: VRep):
    """Decide conv(v) membership by an LP over the polar, exactly.

    With the centroid c as origin, conv(v) = {x : b.(x - c) <= 1 for facet
    normals b}, and the polar {b : b.(v - c) <= 1 for all v} is the convex hull
    of those normals.  Maximising b.(p - c) over the polar therefore lands on a
    facet normal; the point is outside iff the optimum exceeds 1.  Returns
    (is_member, facet or None).  Requires a full-dimensional vertex set.
    """
    verts = [[as_fraction(x) for x in u] for u in v.vertices]
    D = v.ambient_dim
    N = len(verts)
    c = [sum(u[j] for u in verts) / N for j in range(D)]
    p = [as_fraction(x) - cj for x, cj in zip(point, c)]
    A_ub = [[x - cj for x, cj in zip(u, c)] for u in verts]
    res = lp_solve(LinearProgram(p, A_ub, [1] * N, sense="max", nonneg=False))
    if res.value <= 1:
        return True, None
    b = res.x
    gamma = 1 + dot(b, c)
    return False, canonical_inequality(b, gamma)


# ---- serialization ---------------------------------------------------------

def _row(values) -> str:
    return " ".join(fmt_rational(x) for x in values)


def dump_vrep(v: VRep) -> str:
    out = io.StringIO()
    out.write(f"V-representation dim={v.ambient_dim} count={len(v)}\n")
    for p in v.vertices:
        out.write(_row(p) + "\n")
    return out.getvalue()


def load_vrep(text: str) -> VRep:
    lines = [l for l in text.splitlines() if l.strip()]
    head = dict(kv.split("=") for kv in lines[0].split()[1:])
    return VRep(int(head["dim"]), tuple(tuple(Fraction(x) for x in l.split()) for l in lines[1:]))


def dump_hrep(h: HRep) -> str:
    out = io.StringIO()
    out.write(f"H-representation dim={h.ambient_dim} inequalities={len(h.inequalities)} "
              f"equalities={len(h.equalities)}\n")
    for a, beta in h.equalities:
        out.write("= " + _row(list(a) + [beta]) + "\n")
    for b, g in h.inequalities:
        out.write("<= " + _row(list(b) + [g]) + "\n")
    return out.getvalue()


def load_hrep(text: str) -> HRep:
    lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    head = dict(kv.split("=") for kv in lines[0].split()[1:])
    D = int(head["dim"])
    ineqs, eqs = [], []
    for l in lines[1:]:
        kind, *vals = l.split()
        vals = [Fraction(x) for x in vals]
        (eqs if kind == "=" else ineqs).append((vals[:-1], vals[-1]))
    return HRep(D, ineqs, eqs)


class FacetStreamWriter:
    """Append-only facet file; ``close`` writes a trailing sha256 line over the body."""

    def __init__(self, path, ambient_dim: int):
        self.path = Path(path)
        self._fh = open(self.path, "w", encoding="ascii")
        self._hash = hashlib.sha256()
        self.count = 0
        self._write(f"facets dim={ambient_dim}\n")

    def _write(self, line: str):
        self._fh.write(line)
        self._hash.update(line.encode("ascii"))

    def write(self, b, g):
        self._write(_row(list(b) + [g]) + "\n")
        self.count += 1
        if self.count % 4096 == 0:
            self._fh.flush()

    def close(self):
        self._fh.write(f"# sha256 {self._hash.hexdigest()} count={self.count}\n")
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_facet_stream(path, ambient_dim: int, facets: Iterable) -> str:
    with FacetStreamWriter(path, ambient_dim) as w:
        for b, g in facets:
            w.write(b, g)
    return w._hash.hexdigest()


class ChecksumError(ValueError):
    pass


def read_facet_stream(path) -> tuple[int, list[tuple[tuple[int, ...], int]]]:
    """Read a facet file, verifying its trailing checksum."""
    raw = Path(path).read_text(encoding="ascii")
    body, _, tail = raw.rstrip("\n").rpartition("\n")
    if not tail.startswith("# sha256 "):
        raise ChecksumError(f"{path}: missing checksum line (truncated stream?)")
    digest = tail.split()[2]
    body += "\n"
    if hashlib.sha256(body.encode("ascii")).hexdigest() != digest:
        raise ChecksumError(f"{path}: checksum mismatch")
    lines = body.splitlines()
    D = int(lines[0].split("dim=")[1])
    facets = []
    for l in lines[1:]:
        vals = [int(x) for x in l.split()]
        facets.append((tuple(vals[:-1]), vals[-1]))
    return D, facets
