"""Modular arithmetic on setting/outcome alphabets and functions over settings.

A function f: Z_{c1} x ... x Z_{cn} -> Z_d is stored as its full value table
(the delta basis), listed in lexicographic setting order with s_1 most
significant.  Polynomial forms are derived views that only exist for prime
moduli.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

from .errors import NonPrimeModulus, SinglePartyInput


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    r = 3
    while r * r <= p:
        if p % r == 0:
            return False
        r += 2
    return True


def prime_factors(c: int) -> tuple[int, ...]:
    """Prime factors of c with multiplicity, nondecreasing."""
    if c < 2:
        raise ValueError(f"alphabet size must be >= 2, got {c}")
    out = []
    p = 2
    while p * p <= c:
        while c % p == 0:
            out.append(p)
            c //= p
        p += 1
    if c > 1:
        out.append(c)
    return tuple(out)


@dataclass(frozen=True)
class Setting:
    """An experiment label: n parties, per-party setting counts, outcome count d."""

    alphabet_sizes: tuple[int, ...]
    outcome_size: int

    def __post_init__(self):
        object.__setattr__(self, "alphabet_sizes", tuple(int(c) for c in self.alphabet_sizes))
        if len(self.alphabet_sizes) < 1:
            raise ValueError("need at least one party")
        if any(c < 2 for c in self.alphabet_sizes):
            raise ValueError(f"setting alphabets must have size >= 2: {self.alphabet_sizes}")
        if self.outcome_size < 2:
            raise ValueError(f"outcome alphabet must have size >= 2: {self.outcome_size}")

    @classmethod
    def of(cls, n: int, c: int, d: int) -> "Setting":
        return cls((c,) * n, d)

    @classmethod
    def parse(cls, text: str) -> "Setting":
        """Parse ``"n,c,d"`` (uniform) or ``"n,c1,...,cn,d"``."""
        parts = [int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip()]
        if len(parts) == 3:
            return cls.of(*parts)
        n = parts[0]
        if len(parts) != n + 2:
            raise ValueError(f"cannot parse setting {text!r}")
        return cls(tuple(parts[1:-1]), parts[-1])

    @property
    def n(self) -> int:
        return len(self.alphabet_sizes)

    triple_n = n

    @property
    def d(self) -> int:
        return self.outcome_size

    @property
    def c(self) -> int:
        if not self.uniform():
            raise ValueError(f"setting {self} has mixed alphabet sizes")
        return self.alphabet_sizes[0]

    def uniform(self) -> bool:
        return len(set(self.alphabet_sizes)) == 1

    @cached_property
    def strings(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(*(range(c) for c in self.alphabet_sizes)))

    @property
    def num_strings(self) -> int:
        return math.prod(self.alphabet_sizes)

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = []
        acc = 1
        for c in reversed(self.alphabet_sizes):
            strides.append(acc)
            acc *= c
        return tuple(reversed(strides))

    def index(self, s: Sequence[int]) -> int:
        return sum(x * st for x, st in zip(s, self._strides))

    @property
    def reduced_dim(self) -> int:
        """Dimension (d-1) * prod(c_j) of the reduced correlator space."""
        return (self.d - 1) * self.num_strings

    @property
    def num_linear_functions(self) -> int:
        return self.d ** (1 + sum(c - 1 for c in self.alphabet_sizes))

    def sub(self, parties: Sequence[int]) -> "Setting":
        return Setting(tuple(self.alphabet_sizes[j] for j in parties), self.d)

    def header(self) -> str:
        return ",".join(str(x) for x in (self.n, *self.alphabet_sizes, self.d))

    def __str__(self):
        if self.uniform():
            return f"({self.n},{self.alphabet_sizes[0]},{self.d})"
        return f"({self.n},{list(self.alphabet_sizes)},{self.d})"


@dataclass(frozen=True)
class FunctionOverSettings:
    setting: Setting
    table: tuple[int, ...]

    def __post_init__(self):
        d = self.setting.d
        table = tuple(int(v) % d for v in self.table)
        if len(table) != self.setting.num_strings:
            raise ValueError(
                f"table has {len(table)} entries, setting {self.setting} needs {self.setting.num_strings}")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, setting: Setting, fn: Callable[..., int]) -> "FunctionOverSettings":
        return cls(setting, tuple(fn(*s) for s in setting.strings))

    @classmethod
    def constant(cls, setting: Setting, value: int = 0) -> "FunctionOverSettings":
        return cls(setting, (value,) * setting.num_strings)

    def __call__(self, *s) -> int:
        if len(s) == 1 and isinstance(s[0], (tuple, list)):
            s = tuple(s[0])
        return self.table[self.setting.index(s)]

    def __add__(self, other: "FunctionOverSettings") -> "FunctionOverSettings":
        if other.setting != self.setting:
            raise ValueError("functions live on different settings")
        return FunctionOverSettings(self.setting, tuple(a + b for a, b in zip(self.table, other.table)))

    def shifted(self, k: int) -> "FunctionOverSettings":
        return FunctionOverSettings(self.setting, tuple(v + k for v in self.table))

    def to_text(self) -> str:
        return self.setting.header() + "\n" + ",".join(str(v) for v in self.table)

    @classmethod
    def from_text(cls, text: str) -> "FunctionOverSettings":
        header, values = text.strip().splitlines()[:2]
        setting = Setting.parse(header)
        return cls(setting, tuple(int(v) for v in values.split(",")))

    def __repr__(self):
        return f"FunctionOverSettings({self.setting}, {list(self.table)})"


@dataclass(frozen=True)
class LinearDecomposition:
    """f(s) = alpha + sum_j sum_{a != 0} beta[(j, a)] * delta(s_j, a)  (mod d)."""

    setting: Setting
    alpha: int
    beta: dict = field(hash=False)

    def __call__(self, s: Sequence[int]) -> int:
        return (self.alpha + sum(self.beta[(j, a)] for j, a in enumerate(s) if a)) % self.setting.d

    def to_function(self) -> FunctionOverSettings:
        return FunctionOverSettings(self.setting, tuple(self(s) for s in self.setting.strings))


def _unit(setting: Setting, j: int, a: int) -> tuple[int, ...]:
    s = [0] * setting.n
    s[j] = a
    return tuple(s)


def is_n_partite_linear(f: FunctionOverSettings) -> LinearDecomposition | None:
    """Return the single-site decomposition of f, or None if f has cross terms."""
    st = f.setting
    d = st.d
    zero = f.table[0]
    beta = {}
    for j, c in enumerate(st.alphabet_sizes):
        for a in range(1, c):
            beta[(j, a)] = (f(_unit(st, j, a)) - zero) % d
    dec = LinearDecomposition(st, zero, beta)
    for s, v in zip(st.strings, f.table):
        if dec(s) != v:
            return None
    return dec


def enumerate_n_partite_linear(setting: Setting) -> Iterator[FunctionOverSettings]:
    """Yield every n-partite linear function once (constant term outermost)."""
    d = setting.d
    slots = [(j, a) for j, c in enumerate(setting.alphabet_sizes) for a in range(1, c)]
    for alpha in range(d):
        for betas in itertools.product(range(d), repeat=len(slots)):
            dec = LinearDecomposition(setting, alpha, dict(zip(slots, betas)))
            yield dec.to_function()


def enumerate_functions(setting: Setting) -> Iterator[FunctionOverSettings]:
    """All d^(prod c_j) functions, tables in lexicographic order."""
    for table in itertools.product(range(setting.d), repeat=setting.num_strings):
        yield FunctionOverSettings(setting, table)


@dataclass(frozen=True)
class BipartiteSplit:
    """Witness that f(s) = fA(s_A) + fB(s_B) mod d for the bipartition A|B."""

    A: tuple[int, ...]
    B: tuple[int, ...]
    fA: FunctionOverSettings
    fB: FunctionOverSettings


def bipartitions(n: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Unordered bipartitions {A, B} of range(n), with party 0 always in A."""
    rest = list(range(1, n))
    for r in range(0, n - 1):
        for extra in itertools.combinations(rest, r):
            A = (0, *extra)
            B = tuple(j for j in range(n) if j not in A)
            yield A, B


def _merge(n: int, A, sA, B, sB) -> tuple[int, ...]:
    s = [0] * n
    for j, x in zip(A, sA):
        s[j] = x
    for j, x in zip(B, sB):
        s[j] = x
    return tuple(s)


def is_bipartite_linear(f: FunctionOverSettings) -> BipartiteSplit | None:
    """Find a bipartition across which f splits additively, if one exists.

    Separability test per bipartition:
    f(sA, sB) + f(0) == f(sA, 0) + f(0, sB)  for all s.
    """
    st = f.setting
    n, d = st.n, st.d
    if n < 2:
        raise SinglePartyInput("bipartite linearity needs at least two parties")
    f0 = f.table[0]
    for A, B in bipartitions(n):
        stA, stB = st.sub(A), st.sub(B)
        zA, zB = (0,) * len(A), (0,) * len(B)
        fA = {sA: (f(_merge(n, A, sA, B, zB)) - f0) % d for sA in stA.strings}
        fB = {sB: f(_merge(n, A, zA, B, sB)) for sB in stB.strings}
        if all((fA[sA] + fB[sB]) % d == f(_merge(n, A, sA, B, sB))
               for sA in stA.strings for sB in stB.strings):
            return BipartiteSplit(
                A, B,
                FunctionOverSettings(stA, tuple(fA[x] for x in stA.strings)),
                FunctionOverSettings(stB, tuple(fB[x] for x in stB.strings)),
            )
    return None


@dataclass(frozen=True)
class MixedRadix:
    """Bijection Z_c <-> Z_{p1} x ... x Z_{pq}; first factor most significant."""

    c: int
    factors: tuple[int, ...]

    def encode(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.c:
            raise ValueError(f"{v} not in Z_{self.c}")
        digits = []
        for p in reversed(self.factors):
            digits.append(v % p)
            v //= p
        return tuple(reversed(digits))

    def decode(self, digits: Sequence[int]) -> int:
        v = 0
        for x, p in zip(digits, self.factors):
            if not 0 <= x < p:
                raise ValueError(f"digit {x} not in Z_{p}")
            v = v * p + x
        return v


def factor_setting_alphabet(c: int) -> MixedRadix:
    return MixedRadix(c, prime_factors(c))


@dataclass(frozen=True)
class PolynomialForm:
    """Polynomial over Z_modulus; ``monomials`` maps exponent tuples to nonzero coefficients."""

    modulus: int
    nvars: int
    monomials: dict = field(hash=False)

    def __call__(self, *x: int) -> int:
        p = self.modulus
        total = 0
        for exps, coef in self.monomials.items():
            term = coef
            for xi, e in zip(x, exps):
                term = term * pow(xi, e, p)
            total += term
        return total % p

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.monomials), default=0)

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.monomials.get(tuple(exps), 0)

    def __str__(self):
        if not self.monomials:
            return "0"
        names = ["s"] if self.nvars == 1 else [f"x{i + 1}" for i in range(self.nvars)]
        terms = []
        for exps in sorted(self.monomials, key=lambda e: (-sum(e), tuple(-x for x in e))):
            coef = self.monomials[exps]
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e)
            if not mono:
                terms.append(str(coef))
            else:
                terms.append(mono if coef == 1 else f"{coef}*{mono}")
        return " + ".join(terms)


def _require_prime(p: int):
    if not is_prime(p):
        raise NonPrimeModulus(f"{p} is not prime; use the value-table form instead")


def delta_polynomial(y: int, c: int) -> PolynomialForm:
    """Expansion of 1 - (s - y)^(c-1) mod c, which is 1 at s == y and 0 elsewhere."""
    _require_prime(c)
    y %= c
    coeffs = {}
    # (s - y)^(c-1) = sum_l C(c-1, l) (-y)^l s^(c-1-l)
    for l in range(c):
        e = c - 1 - l
        term = math.comb(c - 1, l) * pow(-y, l) % c
        coeffs[e] = (coeffs.get(e, 0) - term) % c
    coeffs[0] = (coeffs.get(0, 0) + 1) % c
    return PolynomialForm(c, 1, {(e,): v for e, v in coeffs.items() if v})


def single_site_map_polynomial(g: Callable[[int], int] | Sequence[int], d: int) -> PolynomialForm:
    """Polynomial of degree <= d-1 over Z_d agreeing with the map g pointwise."""
    _require_prime(d)
    values = [g(y) for y in range(d)] if callable(g) else list(g)
    acc: dict[int, int] = {}
    for y, gy in enumerate(values):
        if gy % d == 0:
            continue
        for (e,), coef in delta_polynomial(y, d).monomials.items():
            acc[e] = (acc.get(e, 0) + gy * coef) % d
    return PolynomialForm(d, 1, {(e,): v for e, v in acc.items() if v})


def interpolate_polynomial(table: Sequence[int], nvars: int, p: int) -> PolynomialForm:
    """Unique reduced polynomial (all exponents < p) over Z_p through a value table.

    ``table`` is indexed lexicographically over Z_p^nvars, x_1 most significant.
    """
    _require_prime(p)
    # univariate inverse transform: coefficient vector = M @ values, M from delta polynomials
    M = [[0] * p for _ in range(p)]
    for y in range(p):
        for (e,), coef in delta_polynomial(y, p).monomials.items():
            M[e][y] = coef
    coeffs = list(table)
    shape = [p] * nvars
    for axis in range(nvars):
        stride = p ** (nvars - 1 - axis)
        out = [0] * len(coeffs)
        for base in range(len(coeffs)):
            if (base // stride) % p:
                continue
            fibre = [coeffs[base + t * stride] for t in range(p)]
            for e in range(p):
                out[base + e * stride] = sum(M[e][y] * fibre[y] for y in range(p)) % p
        coeffs = out
    monomials = {}
    for idx, exps in enumerate(itertools.product(*(range(k) for k in shape))):
        if coeffs[idx]:
            monomials[exps] = coeffs[idx]
    return PolynomialForm(p, nvars, monomials)
