"""Linear pre-processing of inputs before local measurements.

Input x in Z_w^L is wired to party j as s_j = alpha_j . x (mod w_j); party j
then applies an arbitrary single-site map g_j : Z_{w_j} -> Z_d.  The
deterministically achievable functions are

    f(x) = sum_j g_j(alpha_j . x)   (mod d),

i.e. the n-fold sumset of the single-party contribution sets.  Sets are
stored modulo additive constants (every table normalized to f(0) = 0),
which is lossless because constant maps are always available.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded
from .modfunc import interpolate_polynomial

DEFAULT_BUDGET = 10 ** 8


@dataclass(frozen=True)
class PreprocessingWiring:
    """Per-party coefficient vectors and wiring moduli."""

    x_len: int
    coefficients: tuple  # coefficients[j] in Z_{moduli[j]}^{x_len}
    moduli: tuple

    def __post_init__(self):
        for a, w in zip(self.coefficients, self.moduli):
            if len(a) != self.x_len or any(not 0 <= v < w for v in a):
                raise ValueError(f"coefficients {a} not in Z_{w}^{self.x_len}")

    def settings(self, x: Sequence[int]) -> tuple:
        return tuple(sum(a * v for a, v in zip(al, x)) % w for al, w in zip(self.coefficients, self.moduli))


def input_points(x_len: int, modulus: int) -> list[tuple]:
    return list(itertools.product(range(modulus), repeat=x_len))


def _canon(rows: np.ndarray, d: int) -> np.ndarray:
    return (rows - rows[:, :1]) % d


def _encode(rows: np.ndarray, d: int) -> np.ndarray:
    X = rows.shape[1]
    if d ** X < 2 ** 62:
        weights = d ** np.arange(X - 1, -1, -1, dtype=np.int64)
        return rows.astype(np.int64) @ weights
    return np.array([r.tobytes() for r in rows.astype(np.uint8)], dtype=object)


def _unique_rows(rows: np.ndarray, d: int) -> np.ndarray:
    if len(rows) == 0:
        return rows
    keys = _encode(rows, d)
    _, idx = np.unique(keys, return_index=True)
    return rows[np.sort(idx)]


@dataclass
class SingleSiteChoice:
    coefficients: tuple
    site_map: tuple  # g(0), ..., g(w-1)


def single_party_contributions(x_len: int, d: int, wiring_modulus: int, input_modulus: int):
    """Distinct normalized tables of x -> g(alpha . x mod w), with one witness each."""
    pts = np.array(input_points(x_len, input_modulus), dtype=np.int64).reshape(-1, x_len)
    w = wiring_modulus
    tables, witnesses = [], []
    seen = set()
    for alpha in itertools.product(range(w), repeat=x_len):
        h = (pts @ np.array(alpha, dtype=np.int64)) % w if x_len else np.zeros(len(pts), np.int64)
        for g in itertools.product(range(d), repeat=w):
            t = np.array(g, dtype=np.int64)[h]
            t = (t - t[0]) % d
            key = t.tobytes()
            if key not in seen:
                seen.add(key)
                tables.append(t)
                witnesses.append(SingleSiteChoice(tuple(alpha), tuple(g)))
    return np.array(tables, dtype=np.int64), witnesses


@dataclass
class BoostedFunctionSet:
    n: int
    x_len: int
    d: int
    input_modulus: int
    wiring_moduli: tuple
    tables: np.ndarray  # normalized (f(0) = 0) tables, one per row
    complete: bool = True
    evaluations: int = 0

    @property
    def points(self) -> list[tuple]:
        return input_points(self.x_len, self.input_modulus)

    def __len__(self) -> int:
        """Number of achievable functions (constants included)."""
        return len(self.tables) * self.d

    @property
    def canonical_count(self) -> int:
        return len(self.tables)

    def contains(self, table: Sequence[int]) -> bool:
        t = np.asarray(table, dtype=np.int64) % self.d
        t = (t - t[0]) % self.d
        return bool(np.any(np.all(self.tables == t, axis=1)))

    def all_tables(self) -> np.ndarray:
        return np.concatenate([(self.tables + c) % self.d for c in range(self.d)])

    def as_set(self) -> set[tuple]:
        return {tuple(int(v) for v in r) for r in self.all_tables()}

    def report(self, samples: int = 5) -> dict:
        lin = linear_functions_on_inputs(self.x_len, self.d, self.input_modulus)
        lin_set = {tuple(int(v) for v in r) for r in lin}
        extra = [tuple(int(v) for v in r) for r in self.tables if tuple(int(v) for v in r) not in lin_set]
        out = {
            "n": self.n, "x_len": self.x_len, "d": self.d,
            "input_modulus": self.input_modulus, "wiring_moduli": list(self.wiring_moduli),
            "achievable": len(self), "linear_on_inputs": len(lin_set) * self.d,
            "strict_superset": len(extra) > 0, "complete": self.complete,
            "samples": [],
        }
        for t in extra[:samples]:
            entry = {"table": list(t)}
            if self.input_modulus == self.d and _is_prime(self.d):
                entry["polynomial"] = str(interpolate_polynomial(t, self.x_len, self.d))
            out["samples"].append(entry)
        return out


def _is_prime(p):
    from .modfunc import is_prime
    return is_prime(p)


def linear_functions_on_inputs(x_len: int, d: int, input_modulus: int | None = None) -> np.ndarray:
    """Normalized tables of x -> sum_i a_i x_i (mod d); with the constants this is the linear set."""
    w = d if input_modulus is None else input_modulus
    pts = np.array(input_points(x_len, w), dtype=np.int64).reshape(-1, x_len)
    rows = [(pts @ np.array(a, dtype=np.int64)) % d for a in itertools.product(range(d), repeat=x_len)]
    return _unique_rows(np.array(rows, dtype=np.int64), d)


def _moduli(n, d, wiring_modulus):
    if wiring_modulus is None:
        return (d,) * n
    if isinstance(wiring_modulus, int):
        return (wiring_modulus,) * n
    w = tuple(int(x) for x in wiring_modulus)
    if len(w) != n:
        raise ValueError("one wiring modulus per party required")
    return w


def _sumset_stages(n, x_len, d, wiring_modulus=None, input_modulus=None, budget=DEFAULT_BUDGET):
    """Yield (k, BoostedFunctionSet for k parties, back-pointers) for k = 1..n."""
    moduli = _moduli(n, d, wiring_modulus)
    if input_modulus is None:
        if len(set(moduli)) != 1:
            raise ValueError("mixed wiring moduli need an explicit input_modulus")
        input_modulus = moduli[0]
    X = input_modulus ** x_len
    cache = {}
    A = np.zeros((1, X), dtype=np.int64)
    back = [{}]
    evals = 0
    for k in range(n):
        w = moduli[k]
        if w not in cache:
            cache[w] = single_party_contributions(x_len, d, w, input_modulus)
        S, wit = cache[w]
        cost = len(A) * len(S)
        if evals + cost > budget:
            partial = BoostedFunctionSet(k, x_len, d, input_modulus, moduli[:k], A, False, evals)
            raise BudgetExceeded(
                f"sumset step {k + 1} needs {cost} evaluations, budget {budget} leaves {budget - evals}",
                partial=partial)
        evals += cost
        combo = (A[:, None, :] + S[None, :, :]) % d
        combo = combo.reshape(-1, X)
        keys = _encode(combo, d)
        uniq, idx = np.unique(keys, return_index=True)
        stage_back = {}
        for key, i in zip(uniq.tolist(), idx.tolist()):
            stage_back[key] = (i // len(S), wit[i % len(S)])
        A = combo[np.sort(idx)]
        back.append(stage_back)
        yield k + 1, BoostedFunctionSet(k + 1, x_len, d, input_modulus, moduli[:k + 1], A, True, evals), back


def achievable_boosted_functions(n: int, x_len: int, d: int, wiring_modulus=None,
                                 input_modulus: int | None = None,
                                 budget: int = DEFAULT_BUDGET) -> BoostedFunctionSet:
    """All functions sum_j g_j(alpha_j . x) achievable with n parties (exhaustive)."""
    result = None
    for _, result, _ in _sumset_stages(n, x_len, d, wiring_modulus, input_modulus, budget):
        pass
    return result


@dataclass
class BoostWitness:
    n: int
    wiring: PreprocessingWiring
    site_maps: tuple  # per party, g_j as a tuple of values
    constant: int

    def evaluate(self, x: Sequence[int], d: int) -> int:
        s = self.wiring.settings(x)
        return (self.constant + sum(g[v] for g, v in zip(self.site_maps, s))) % d


def find_boost_witness(table: Sequence[int], x_len: int, d: int, n_max: int, wiring_modulus=None,
                       input_modulus: int | None = None, budget: int = DEFAULT_BUDGET) -> BoostWitness | None:
    """Smallest-n explicit wiring and site maps realizing ``table``, or None."""
    t = np.asarray(table, dtype=np.int64) % d
    const = int(t[0])
    target = (t - const) % d
    key = int(_encode(target[None, :], d)[0]) if d ** len(t) < 2 ** 62 else target.astype(np.uint8).tobytes()
    for k, bset, back in _sumset_stages(n_max, x_len, d, wiring_modulus, input_modulus, budget):
        if key in back[k]:
            choices = []
            cur = target
            for stage in range(k, 0, -1):
                prev_row, choice = back[stage][_key(cur, d)]
                choices.append(choice)
                g_tab = _choice_table(choice, bset.points, bset.wiring_moduli[stage - 1], d)
                cur = (cur - g_tab) % d
            choices.reverse()
            moduli = bset.wiring_moduli
            wiring = PreprocessingWiring(x_len, tuple(c.coefficients for c in choices), moduli)
            maps = []
            # each stored choice is normalized; fold its g(0 . x) offset into the constant
            offset = 0
            pts = bset.points
            for c, w in zip(choices, moduli):
                raw = _choice_table(c, pts, w, d, normalize=False)
                offset += int(raw[0])
                maps.append(c.site_map)
            return BoostWitness(k, wiring, tuple(maps), (const - offset) % d)
    return None


def _key(row, d):
    return int(_encode(np.asarray(row)[None, :], d)[0]) if d ** len(row) < 2 ** 62 else np.asarray(row).astype(np.uint8).tobytes()


def _choice_table(choice: SingleSiteChoice, points, w, d, normalize=True):
    g = np.array(choice.site_map, dtype=np.int64)
    h = np.array([sum(a * v for a, v in zip(choice.coefficients, x)) % w for x in points], dtype=np.int64)
    t = g[h]
    return (t - t[0]) % d if normalize else t % d


def is_boosted_achievable(table: Sequence[int], x_len: int, d: int, n_max: int, wiring_modulus=None,
                          input_modulus: int | None = None, budget: int = DEFAULT_BUDGET) -> bool:
    t = np.asarray(table, dtype=np.int64) % d
    t = (t - t[0]) % d
    for _, bset, _ in _sumset_stages(n_max, x_len, d, wiring_modulus, input_modulus, budget):
        if bset.contains(t):
            return True
    return False


def boosted_bell_bound(table: Sequence[int], n: int, x_len: int, d: int, weights: Sequence | None = None,
                       wiring_modulus=None, input_modulus: int | None = None,
                       budget: int = DEFAULT_BUDGET) -> Fraction:
    """max over achievable g of sum_x w(x) [g(x) = f(x)] (exact)."""
    bset = achievable_boosted_functions(n, x_len, d, wiring_modulus, input_modulus, budget)
    X = bset.tables.shape[1]
    if weights is None:
        weights = [Fraction(1, X)] * X
    w = [Fraction(x) for x in weights]
    L = 1
    for x in w:
        L = L * x.denominator // np.gcd(L, x.denominator)
    wi = np.array([int(x * L) for x in w], dtype=np.int64)
    f = np.asarray(table, dtype=np.int64) % d
    best = 0
    for c in range(d):
        eq = ((bset.tables + c) % d) == f[None, :]
        best = max(best, int((eq.astype(np.int64) @ wi).max()))
    return Fraction(best, L)


def product_table(x_len: int, d: int, exponent: int | None = None, input_modulus: int | None = None) -> tuple:
    """Table of prod_i x_i^e (default e = d - 1) over Z_w^L."""
    e = d - 1 if exponent is None else exponent
    w = d if input_modulus is None else input_modulus
    return tuple(int(np.prod([pow(v, e) for v in x])) % d for x in input_points(x_len, w))
