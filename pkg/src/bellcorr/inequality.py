"""Bell inequalities on correlators: values, bounds, generators and a catalog.

An inequality is stored in the reduced space as

    offset + sum_{s, k>=1} coeffs[s, k] p(k|s)  <=  gamma_L

where ``offset`` collects the k = 0 terms of a full-k (P') presentation
after substituting p(0|s) = 1 - sum_{k>=1} p(k|s).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .correlator import CorrelatorVector, lhv_vertices
from .errors import LinearFunctionInput, SearchSpaceTooLarge, SettingMismatch, UnknownFamily
from .geometry.exact import as_fraction, fmt_rational, integerize
from .modfunc import FunctionOverSettings, Setting, is_n_partite_linear


def _lcm_den(values) -> int:
    L = 1
    for x in values:
        L = L * x.denominator // math.gcd(L, x.denominator)
    return L


@dataclass(frozen=True)
class BellInequality:
    setting: Setting
    coeffs: tuple
    offset: Fraction = Fraction(0)
    bound: Fraction | None = None
    provenance: str = ""
    name: str = ""

    def __post_init__(self):
        c = tuple(as_fraction(x) for x in self.coeffs)
        if len(c) != self.setting.reduced_dim:
            raise SettingMismatch(
                f"{len(c)} coefficients given for {self.setting} (needs {self.setting.reduced_dim})")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offset", as_fraction(self.offset))
        if self.bound is not None:
            object.__setattr__(self, "bound", as_fraction(self.bound))

    # -- construction -----------------------------------------------------
    @classmethod
    def from_full(cls, setting: Setting, full: Sequence, bound=None, **kw) -> "BellInequality":
        """Project full-k coefficients (d per setting string, k = 0 first) to the reduced space."""
        d = setting.d
        full = [as_fraction(x) for x in full]
        if len(full) != d * setting.num_strings:
            raise SettingMismatch("full-k coefficient vector has the wrong length")
        offset = Fraction(0)
        red = []
        for i in range(setting.num_strings):
            blk = full[i * d:(i + 1) * d]
            offset += blk[0]
            red.extend(x - blk[0] for x in blk[1:])
        return cls(setting, tuple(red), offset, bound, **kw)

    @classmethod
    def from_terms(cls, setting: Setting, weight: Callable[[tuple, int], object], bound=None, **kw):
        """Build from a callable weight(s, k) over all k in 0..d-1 (full-k form)."""
        full = [weight(s, k) for s in setting.strings for k in range(setting.d)]
        return cls.from_full(setting, full, bound, **kw)

    # -- derived quantities ---------------------------------------------------
    def block(self, s_index: int) -> tuple:
        w = self.setting.d - 1
        return self.coeffs[s_index * w:(s_index + 1) * w]

    def full_coeffs(self) -> list[Fraction]:
        """A full-k presentation (k=0 column carries offset / c^n on every block)."""
        N = self.setting.num_strings
        share = self.offset / N
        out = []
        for i in range(N):
            out.append(share)
            out.extend(x + share for x in self.block(i))
        return out

    @cached_property
    def gamma_L(self) -> Fraction:
        return lhv_bound(self)

    @property
    def gamma_P(self) -> Fraction:
        return self.offset + sum(max([Fraction(0), *self.block(i)]) for i in range(self.setting.num_strings))

    @property
    def stated_bound(self) -> Fraction:
        return self.bound if self.bound is not None else self.gamma_L

    def canonical(self) -> tuple[tuple[int, ...], int]:
        """Primitive integer (b, g) with b.p <= g equivalent to this inequality."""
        v = integerize(list(self.coeffs) + [self.stated_bound - self.offset])
        return tuple(v[:-1]), v[-1]

    def is_trivial(self) -> bool:
        """Positivity p(k|s) >= 0 or per-setting normalization sum_k p(k|s) <= 1."""
        b, g = self.canonical()
        nz = [i for i, x in enumerate(b) if x]
        w = self.setting.d - 1
        if len(nz) == 1 and b[nz[0]] == -1 and g == 0:
            return True
        blocks = {i // w for i in nz}
        return (len(blocks) == 1 and len(nz) == w and all(b[i] == 1 for i in nz) and g == 1)

    def to_record(self) -> str:
        return " | ".join([
            self.setting.header(),
            " ".join(fmt_rational(x) for x in self.coeffs),
            fmt_rational(self.offset),
            fmt_rational(self.gamma_L),
            fmt_rational(self.gamma_P),
            self.provenance or self.name or "-",
        ])

    @classmethod
    def from_record(cls, line: str) -> "BellInequality":
        head, coeffs, offset, gl, _gp, prov = [x.strip() for x in line.split("|")]
        st = Setting.parse(head)
        return cls(st, tuple(Fraction(x) for x in coeffs.split()), Fraction(offset), Fraction(gl),
                   provenance=prov)

    def __repr__(self):
        tag = self.name or self.provenance
        return f"BellInequality({tag!r}, {self.setting}, bound={self.stated_bound})"


def bell_from_facet(setting: Setting, b: Sequence[int], g: int, provenance: str = "facet") -> BellInequality:
    return BellInequality(setting, tuple(b), Fraction(0), Fraction(g), provenance=provenance)


@dataclass(frozen=True)
class InputWeights:
    setting: Setting
    weights: tuple

    def __post_init__(self):
        w = tuple(as_fraction(x) for x in self.weights)
        if len(w) != self.setting.num_strings:
            raise SettingMismatch("one weight per setting string required")
        if any(x < 0 for x in w) or sum(w) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, setting: Setting) -> "InputWeights":
        return cls(setting, (Fraction(1, setting.num_strings),) * setting.num_strings)

    def strictly_positive(self) -> bool:
        return all(x > 0 for x in self.weights)


# ---- evaluation and bounds ------------------------------------------------

def evaluate(ineq: BellInequality, corr: CorrelatorVector) -> Fraction:
    if corr.setting != ineq.setting:
        raise SettingMismatch(f"{ineq.setting} vs {corr.setting}")
    return ineq.offset + sum(a * b for a, b in zip(ineq.coeffs, corr.entries) if a)


def _vertex_matrix(setting: Setting) -> np.ndarray:
    return _VERTEX_CACHE.setdefault(setting, np.array(lhv_vertices(setting), dtype=np.int64))


_VERTEX_CACHE: dict = {}


def _integer_coeffs(ineq: BellInequality) -> tuple[np.ndarray, int]:
    L = _lcm_den(ineq.coeffs)
    ints = [int(x * L) for x in ineq.coeffs]
    dtype = np.int64 if max(map(abs, ints), default=0) < 2 ** 40 else object
    return np.array(ints, dtype=dtype), L


def vertex_values(ineq: BellInequality, vertices: np.ndarray | None = None) -> list[Fraction]:
    """Exact values on every LHV vertex (in ``lhv_vertices`` order)."""
    V = _vertex_matrix(ineq.setting) if vertices is None else vertices
    w, L = _integer_coeffs(ineq)
    raw = (V.astype(w.dtype) @ w).tolist()
    return [ineq.offset + Fraction(int(x), L) for x in raw]


def lhv_bound(ineq: BellInequality) -> Fraction:
    """max over n-partite linear functions of the inequality value."""
    V = _vertex_matrix(ineq.setting)
    w, L = _integer_coeffs(ineq)
    return ineq.offset + Fraction(int((V.astype(w.dtype) @ w).max()), L)


def algebraic_max_bruteforce(ineq: BellInequality, limit: int = 10 ** 6) -> Fraction:
    """max over all deterministic correlators, by enumeration (test oracle)."""
    st = ineq.setting
    total = st.d ** st.num_strings
    if total > limit:
        raise SearchSpaceTooLarge(f"{total} functions exceed the limit {limit}")
    w = st.d - 1
    best = None
    for table in itertools.product(range(st.d), repeat=st.num_strings):
        v = ineq.offset + sum(ineq.coeffs[i * w + k - 1] for i, k in enumerate(table) if k)
        best = v if best is None or v > best else best
    return best


def max_violating_vertices(ineq: BellInequality, limit: int = 10 ** 6) -> list[FunctionOverSettings]:
    """Every function whose deterministic correlator attains gamma_P.

    The value of a deterministic correlator is a sum of independent per-setting
    terms, so the maximisers are exactly the product of the per-setting argmax
    sets (k = 0 contributes 0).
    """
    st = ineq.setting
    choices = []
    for i in range(st.num_strings):
        vals = [Fraction(0), *ineq.block(i)]
        top = max(vals)
        choices.append([k for k, v in enumerate(vals) if v == top])
    count = math.prod(len(c) for c in choices)
    if count > limit:
        raise SearchSpaceTooLarge(f"{count} maximising functions exceed the limit {limit}")
    return [FunctionOverSettings(st, t) for t in itertools.product(*choices)]


def nontrivial_from_function(f: FunctionOverSettings, w: InputWeights | None = None) -> BellInequality:
    """Success-probability inequality for computing f: sum_s w(s) p(f(s)|s) <= sup_g ...

    gamma_L is the best weighted agreement of an n-partite linear g with f.
    """
    st = f.setting
    if is_n_partite_linear(f) is not None:
        raise LinearFunctionInput("f is n-partite linear; the resulting inequality is trivial")
    if w is None:
        w = InputWeights.uniform(st)
    if w.setting != st:
        raise SettingMismatch("weights and function live on different settings")
    d = st.d
    full = []
    for i, v in enumerate(f.table):
        full.extend(w.weights[i] if k == v else 0 for k in range(d))
    ineq = BellInequality.from_full(st, full, provenance=f"success-probability f={list(f.table)}")
    return replace(ineq, bound=lhv_bound(ineq))


def count_nonlinear_functions(setting: Setting) -> int:
    return setting.d ** setting.num_strings - setting.num_linear_functions


# ---- catalog -------------------------------------------------------------

def _sign(x: int) -> int:
    return -1 if x % 2 else 1


def _cglmp_weight(d: int, on_support: Callable[[tuple], bool], pair: Callable[[tuple], tuple],
                  origin: tuple):
    """CGLMP-shaped weights on a 2-variable slice.

    pair(s) gives the two slice variables (a, b); the slice sign is (-1)^(a+b).
    The k >= 2 coefficient is (d - k); see the decisions ledger for why.
    """
    def weight(s, k):
        if k == 0 or not on_support(s):
            return 0
        a, b = pair(s)
        sg = _sign(a + b)
        if k == 1:
            return (d if s == origin else 0) - sg
        return sg * (d - k)
    return weight


def _chsh_signed(setting: Setting, window: Callable[[tuple], bool], pair=lambda s: (s[0], s[1]), values=(1,)):
    def weight(s, k):
        if k not in values or not window(s):
            return 0
        a, b = pair(s)
        return _sign(a * b)
    return weight


_VECTORS_225 = {
    "I1": [Fraction(x, 2) for x in (6, 2, 3, 4, 4, -2, 2, 1, 4, -2, 2, 1, -4, 2, -2, -1)],
    "I2": [3, 1, -1, -3, 2, -1, -4, -2, 2, -1, -4, -2, -2, 1, 4, 2],
    "I3": [2, -1, 1, -2, 3, 1, -1, 2, 3, 1, -1, 2, -3, -1, 1, -2],
}

_VECTORS_242 = {
    "B1": [2, 2, 1, 1, 2, -1, -1, -2, 1, -1, -2, 2, 1, -2, 2, 1],
    "B2": [2, 2, 1, 1, 2, -1, -1, -2, 1, -2, 2, 1, 1, -1, -2, 2],
    "B3": [2, 2, 1, 1, 2, -1, -2, -1, 1, -2, 1, 2, 1, -1, 2, -2],
    "B4": [2, 2, 1, 1, 1, -1, 2, -2, 1, -2, 1, 2, 2, -1, -2, -1],
    "B5": [2, 2, 1, 1, 1, -2, 2, 1, 1, -1, -2, 2, 2, -1, -1, -2],
    "B6": [2, 1, 1, 0, 1, -1, -1, 1, 1, -1, -1, -1, 0, 1, -1, 0],
    "B7": [2, 1, 1, 0, 1, -1, -1, 1, 0, 1, -1, 0, 1, -1, -1, -1],
    "B8": [2, 1, 1, 0, 0, 1, -1, 0, 1, -1, -1, 1, 1, -1, -1, -1],
    "B9": [2, 1, 0, 1, 1, -1, 1, -1, 0, 1, 0, -1, 1, -1, -1, -1],
    "B10": [2, 1, 0, 1, 0, 1, 0, -1, 1, -1, 1, -1, 1, -1, -1, -1],
    "B11": [2, 0, 1, 1, 0, 0, 1, -1, 1, 1, -1, -1, 1, -1, -1, -1],
    "C1_c=4": [1, 1, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    "C2_c=4": [1, 1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0],
    "C3_c=4": [1, 0, 1, 0, 0, 0, 0, 0, 1, 0, -1, 0, 0, 0, 0, 0],
}
_VECTORS_242_BOUNDS = {**{f"B{i}": 8 for i in range(1, 6)}, **{f"B{i}": 4 for i in range(6, 12)},
                     "C1_c=4": 2, "C2_c=4": 2, "C3_c=4": 2}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    settings: Callable[[Setting], bool]
    build: Callable[[Setting], BellInequality]
    description: str = ""
    default_setting: Setting | None = None


def _only(*triples):
    allowed = {Setting.of(*t) for t in triples}
    return lambda st: st in allowed


def _build_chsh_delta(st):
    return BellInequality.from_terms(st, lambda s, k: int(k == (s[0] * s[1]) % 2), 3)


def _build_chsh(st):
    return BellInequality.from_terms(st, _chsh_signed(st, lambda s: True), 2)


def _build_cglmp(st):
    d = st.d
    return BellInequality.from_terms(
        st, _cglmp_weight(d, lambda s: True, lambda s: (s[0], s[1]), (0, 0)), d)


def _build_cglmp_slice3(st):
    d = st.d
    return BellInequality.from_terms(
        st, _cglmp_weight(d, lambda s: s[2] == 0, lambda s: (s[0], s[1]), (0, 0, 0)), d)


def _build_cglmp_diag3(st):
    d = st.d
    return BellInequality.from_terms(
        st, _cglmp_weight(d, lambda s: s[0] == s[1], lambda s: (s[0], s[2]), (0, 0, 0)), d)


def _build_svetlichny(st):
    def f(s):
        return (s[0] * (s[1] + s[2]) + s[1] * s[2]) % 2
    return BellInequality.from_terms(st, lambda s, k: int(k == f(s)), 6)


def _build_mermin(st):
    return BellInequality.from_terms(
        st, lambda s, k: (_sign(s[0] * s[2]) if (k == 1 and s[0] == s[1]) else 0), 2)


def _build_c3(st):
    return BellInequality.from_terms(st, _chsh_signed(st, lambda s: s[0] < 2 and s[1] < 2), 2)


def _build_parity224(st):
    return BellInequality.from_terms(st, _chsh_signed(st, lambda s: True, values=(1, 3)), 2)


def _build_third224(st):
    return BellInequality(st, (1, 2, 1, 1, 2, 1, 1, 2, 1, -1, -2, -1), 0, 4)


def _vector_builder(vec, bound):
    return lambda st: BellInequality(st, tuple(vec), 0, bound)


CATALOG: dict[str, CatalogEntry] = {}


def _register(name, settings, build, description, default):
    CATALOG[name] = CatalogEntry(name, settings, build, description, Setting.of(*default))


_register("CHSH", _only((2, 2, 2)), _build_chsh,
          "signed two-party form sum (-1)^(s1 s2) p(1|s) <= 2", (2, 2, 2))
_register("CHSH-delta", _only((2, 2, 2)), _build_chsh_delta,
          "full-k form sum_s p(s1 s2|s) <= 3", (2, 2, 2))
_register("CGLMP", lambda st: st.n == 2 and st.alphabet_sizes == (2, 2), _build_cglmp,
          "two-party, two-setting, d-outcome family; maximiser s1 s2 + 1", (2, 2, 3))
_register("CGLMP-slice", lambda st: st.n == 3 and st.alphabet_sizes == (2, 2, 2), _build_cglmp_slice3,
          "three-party CGLMP supported on s3 = 0", (3, 2, 3))
_register("CGLMP-diagonal", lambda st: st.n == 3 and st.alphabet_sizes == (2, 2, 2), _build_cglmp_diag3,
          "three-party CGLMP supported on s1 = s2 with sign (-1)^(s1+s3)", (3, 2, 3))
_register("Svetlichny", _only((3, 2, 2)), _build_svetlichny,
          "success form for f = s1(s2+s3)+s2 s3, bound 6", (3, 2, 2))
_register("Mermin", _only((3, 2, 2)), _build_mermin,
          "sum_s [s1=s2] (-1)^(s1 s3) p(1|s) <= 2", (3, 2, 2))
_register("C_c=3", _only((2, 3, 2)), _build_c3,
          "CHSH embedded on settings {0,1} x {0,1}", (2, 3, 2))
_register("CHSH-parity", _only((2, 2, 4)), _build_parity224,
          "sum (-1)^(s1 s2) [p(1|s) + p(3|s)] <= 2", (2, 2, 4))
_register("CHSH-parity-plus", _only((2, 2, 4)), _build_third224,
          "(1,2,1,1,2,1,1,2,1,-1,-2,-1).p <= 4; maximiser 2 s1 s2 + 2", (2, 2, 4))
for _name, _vec in _VECTORS_225.items():
    _register(_name, _only((2, 2, 5)), _vector_builder(_vec, 5), f"(2,2,5) coefficient vector {_name}", (2, 2, 5))
for _name, _vec in _VECTORS_242.items():
    _register(_name, _only((2, 4, 2)), _vector_builder(_vec, _VECTORS_242_BOUNDS[_name]),
              f"(2,4,2) coefficient vector {_name}", (2, 4, 2))

ALIASES = {"C_d=2": "CHSH", "C_CGLMP": "CGLMP", "C'_CGLMP": "CGLMP-slice", "C''_CGLMP": "CGLMP-diagonal",
           "C1": "C1_c=4", "C2": "C2_c=4", "C3": "C3_c=4"}


def catalog_names() -> list[str]:
    return list(CATALOG)


def named_family(name: str, setting: Setting | None = None, check: bool = True) -> BellInequality:
    """Catalog inequality ``name`` at ``setting`` (or its default setting).

    With ``check`` the LHV bound is recomputed over all vertices and must equal
    the stored bound exactly.
    """
    key = ALIASES.get(name, name)
    if key not in CATALOG:
        raise UnknownFamily(f"no catalog family named {name!r}")
    entry = CATALOG[key]
    st = entry.default_setting if setting is None else setting
    if not entry.settings(st):
        raise UnknownFamily(f"family {key!r} is not defined at setting {st}")
    ineq = replace(entry.build(st), name=key, provenance=f"catalog:{key}")
    if check and ineq.gamma_L != ineq.bound:
        raise AssertionError(f"{key} at {st}: recomputed LHV bound {ineq.gamma_L} != stated {ineq.bound}")
    return ineq


def catalog_instances() -> list[BellInequality]:
    """Every catalog family at its default setting, plus CGLMP at d = 2, 4, 5."""
    out = [named_family(n) for n in CATALOG]
    out += [named_family("CGLMP", Setting.of(2, 2, d)) for d in (2, 4, 5)]
    out += [named_family(n, Setting.of(3, 2, 2)) for n in ("CGLMP-slice", "CGLMP-diagonal")]
    return out
