"""Exact convex geometry: rationals, double description, simplex, facet tests."""
from .exact import Rational, as_fraction, fmt_rational, integerize, rank
from .lp import LinearProgram, LPResult, feasible_point, lp_solve
from .polytope import (
    AffineHull,
    ChecksumError,
    FacetStreamWriter,
    HRep,
    MembershipResult,
    VRep,
    affine_hull,
    affinely_independent,
    canonical_inequality,
    dump_hrep,
    dump_vrep,
    facet_enumeration,
    is_facet_defining,
    load_hrep,
    load_vrep,
    max_violation,
    membership,
    polytope_dimension,
    read_facet_stream,
    saturating_points,
    separating_facet,
    write_facet_stream,
)
