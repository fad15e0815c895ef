"""Relabeling group: party permutations, setting shifts, outcome shifts, outcome negation.

A group element g acts on functions by

    (g f)(s) = u * f(tau(s)) + sum_j beta_j(s_j)        (mod d)
    tau(s)_j = s_{perm[j]} + alpha_j                    (mod c_j)

with u in {+1, -1}.  Correlators and inequality coefficients transform in the
dual way, so inequality values and LHV bounds are invariant:

    (g W)[s, k] = W[tau(s), u^{-1} (k - B(s))],   B(s) = sum_j beta_j(s_j).

The group used for classification is generated by party transpositions and
unit shifts (u = +1 throughout).  Elements with u = -1 (global outcome
negation m -> -m) are supported as an optional extension via
``include_negation=True``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .correlator import CorrelatorVector
from .errors import IncompatiblePermutation, SettingMismatch
from .inequality import BellInequality
from .modfunc import FunctionOverSettings, Setting


@dataclass(frozen=True)
class SymmetryElement:
    setting: Setting
    party_perm: tuple
    setting_shift: tuple
    outcome_shift: tuple  # outcome_shift[j][a] = beta_j(a)
    outcome_sign: int = 1

    def __post_init__(self):
        st = self.setting
        n, d = st.n, st.d
        perm = tuple(int(x) for x in self.party_perm)
        if sorted(perm) != list(range(n)):
            raise ValueError(f"{perm} is not a permutation of {n} parties")
        for j, pj in enumerate(perm):
            if st.alphabet_sizes[j] != st.alphabet_sizes[pj]:
                raise IncompatiblePermutation(
                    f"party {pj} (c={st.alphabet_sizes[pj]}) cannot move to slot {j} (c={st.alphabet_sizes[j]})")
        alpha = tuple(int(a) % c for a, c in zip(self.setting_shift, st.alphabet_sizes))
        if len(alpha) != n or len(self.outcome_shift) != n:
            raise ValueError("need one setting shift and one outcome-shift table per party")
        beta = tuple(tuple(int(b) % d for b in row) for row in self.outcome_shift)
        if any(len(row) != c for row, c in zip(beta, st.alphabet_sizes)):
            raise ValueError("outcome-shift table j needs c_j entries")
        if self.outcome_sign not in (1, -1):
            raise ValueError("outcome_sign must be +1 or -1")
        object.__setattr__(self, "party_perm", perm)
        object.__setattr__(self, "setting_shift", alpha)
        object.__setattr__(self, "outcome_shift", beta)

    @classmethod
    def identity(cls, setting: Setting) -> "SymmetryElement":
        return cls(setting, tuple(range(setting.n)), (0,) * setting.n,
                   tuple((0,) * c for c in setting.alphabet_sizes))

    @classmethod
    def random(cls, setting: Setting, rng: random.Random, include_negation: bool = False):
        n = setting.n
        perm = list(range(n))
        # shuffle within blocks of equal alphabet size
        for c in set(setting.alphabet_sizes):
            idx = [j for j in range(n) if setting.alphabet_sizes[j] == c]
            vals = [perm[j] for j in idx]
            rng.shuffle(vals)
            for j, v in zip(idx, vals):
                perm[j] = v
        alpha = [rng.randrange(c) for c in setting.alphabet_sizes]
        beta = [[rng.randrange(setting.d) for _ in range(c)] for c in setting.alphabet_sizes]
        sign = rng.choice((1, -1)) if include_negation else 1
        return cls(setting, tuple(perm), tuple(alpha), tuple(map(tuple, beta)), sign)

    def tau(self, s: Sequence[int]) -> tuple:
        return tuple((s[p] + a) % c for p, a, c in
                     zip(self.party_perm, self.setting_shift, self.setting.alphabet_sizes))

    def shift(self, s: Sequence[int]) -> int:
        return sum(self.outcome_shift[j][x] for j, x in enumerate(s)) % self.setting.d

    def compose(self, other: "SymmetryElement") -> "SymmetryElement":
        """self * other, i.e. apply ``other`` first, then ``self``."""
        g, h = self, other
        st = g.setting
        n, d = st.n, st.d
        perm = tuple(g.party_perm[h.party_perm[j]] for j in range(n))
        alpha = tuple(g.setting_shift[h.party_perm[j]] + h.setting_shift[j] for j in range(n))
        ginv = [0] * n
        for j, p in enumerate(g.party_perm):
            ginv[p] = j
        beta = []
        for i in range(n):
            j = ginv[i]
            c = st.alphabet_sizes[i]
            beta.append(tuple((g.outcome_sign * h.outcome_shift[j][(x + g.setting_shift[j]) % c]
                               + g.outcome_shift[i][x]) % d for x in range(c)))
        return SymmetryElement(st, perm, alpha, tuple(beta), g.outcome_sign * h.outcome_sign)

    __mul__ = compose


def _check(g: SymmetryElement, st: Setting):
    if g.setting != st:
        raise SettingMismatch(f"group element for {g.setting} applied at {st}")


def apply_to_function(g: SymmetryElement, f: FunctionOverSettings) -> FunctionOverSettings:
    st = f.setting
    _check(g, st)
    return FunctionOverSettings(st, tuple(
        g.outcome_sign * f(g.tau(s)) + g.shift(s) for s in st.strings))


def full_index_map(g: SymmetryElement) -> np.ndarray:
    """pi with (g W)_flat = W_flat[pi] on full-k arrays (d entries per setting string)."""
    st = g.setting
    d = st.d
    u_inv = g.outcome_sign  # +-1 are self-inverse
    pi = np.empty(st.num_strings * d, dtype=np.int64)
    for i, s in enumerate(st.strings):
        t = st.index(g.tau(s))
        B = g.shift(s)
        for k in range(d):
            pi[i * d + k] = t * d + (u_inv * (k - B)) % d
    return pi


def apply_to_correlator(g: SymmetryElement, corr: CorrelatorVector) -> CorrelatorVector:
    from .correlator import lift_to_full, project_to_reduced, FullCorrelatorVector
    _check(g, corr.setting)
    full = lift_to_full(corr).entries
    pi = full_index_map(g)
    return project_to_reduced(FullCorrelatorVector(corr.setting, tuple(full[x] for x in pi)))


def apply_to_inequality(g: SymmetryElement, ineq: BellInequality) -> BellInequality:
    st = ineq.setting
    _check(g, st)
    W = ineq.full_coeffs()
    pi = full_index_map(g)
    out = BellInequality.from_full(st, [W[x] for x in pi], ineq.bound,
                                   provenance=ineq.provenance, name=ineq.name)
    return out


# ---- generators and vectorised action ---------------------------------------

def generators(setting: Setting, include_negation: bool = False) -> list[SymmetryElement]:
    """Transpositions of equal-alphabet parties, unit setting shifts, unit outcome shifts, negation."""
    st = setting
    n = st.n
    ident = SymmetryElement.identity(st)
    gens = []
    for i, j in itertools.combinations(range(n), 2):
        if st.alphabet_sizes[i] == st.alphabet_sizes[j]:
            perm = list(range(n))
            perm[i], perm[j] = j, i
            gens.append(SymmetryElement(st, tuple(perm), ident.setting_shift, ident.outcome_shift))
    for j in range(n):
        alpha = [0] * n
        alpha[j] = 1
        gens.append(SymmetryElement(st, ident.party_perm, tuple(alpha), ident.outcome_shift))
    for j, c in enumerate(st.alphabet_sizes):
        for a in range(c):
            beta = [list(r) for r in ident.outcome_shift]
            beta[j][a] = 1
            gens.append(SymmetryElement(st, ident.party_perm, ident.setting_shift, tuple(map(tuple, beta))))
    if include_negation and st.d > 2:
        gens.append(SymmetryElement(st, ident.party_perm, ident.setting_shift, ident.outcome_shift, -1))
    return gens


class _Action:
    """Vectorised action of the generators on canonical inequality keys.

    A key is the primitive integer row (b_reduced..., g) of b.p <= g.
    """

    def __init__(self, setting: Setting, include_negation: bool = False):
        self.setting = setting
        self.d = setting.d
        self.N = setting.num_strings
        self.gens = generators(setting, include_negation)
        self.maps = [full_index_map(g) for g in self.gens]

    def apply(self, keys: np.ndarray, pi: np.ndarray) -> np.ndarray:
        d, N = self.d, self.N
        m = keys.shape[0]
        b = keys[:, :-1].reshape(m, N, d - 1)
        g = keys[:, -1]
        full = np.zeros((m, N, d), dtype=keys.dtype)
        full[:, :, 1:] = b
        full = full.reshape(m, N * d)[:, pi].reshape(m, N, d)
        zero = full[:, :, 0]
        nb = (full[:, :, 1:] - zero[:, :, None]).reshape(m, N * (d - 1))
        ng = g - zero.sum(axis=1)
        return np.concatenate([nb, ng[:, None]], axis=1)


def _keys_of(items: Sequence[BellInequality]) -> np.ndarray:
    rows = []
    for it in items:
        b, g = it.canonical()
        rows.append(list(b) + [g])
    return np.array(rows, dtype=np.int64)


def orbit(ineq: BellInequality, include_negation: bool = False, limit: int | None = None) -> set[bytes]:
    """Canonical keys (as bytes of int64 rows) of the whole orbit of ``ineq``."""
    act = _Action(ineq.setting, include_negation)
    start = _keys_of([ineq])
    return _bfs(act, start, limit)[0]


def _bfs(act: _Action, start: np.ndarray, limit=None):
    seen = {start[0].tobytes()}
    rows = [start[0]]
    frontier = start
    while len(frontier):
        fresh = []
        for pi in act.maps:
            img = act.apply(frontier, pi)
            for r in img:
                key = r.tobytes()
                if key not in seen:
                    seen.add(key)
                    fresh.append(r)
                    rows.append(r)
        if limit is not None and len(seen) > limit:
            raise RuntimeError(f"orbit exceeds {limit} elements")
        frontier = np.array(fresh, dtype=np.int64) if fresh else np.empty((0, start.shape[1]), np.int64)
    return seen, rows


@dataclass
class SymmetryClass:
    representative: BellInequality
    members: list  # indices into the partitioned item list
    orbit_size: int
    trivial: bool

    @property
    def size(self) -> int:
        return len(self.members)


def orbit_partition(items: Sequence[BellInequality], include_negation: bool = False) -> list[SymmetryClass]:
    """Partition ``items`` into symmetry classes.

    Each class is found by a breadth-first closure of one unvisited item under
    the generators, so the result is correct even when ``items`` is not closed
    under the group.  Representatives are the lexicographically least key in
    the full orbit; classes are sorted by that key.
    """
    if not items:
        return []
    st = items[0].setting
    if any(it.setting != st for it in items):
        raise SettingMismatch("all items must share a setting")
    act = _Action(st, include_negation)
    keys = _keys_of(items)
    index: dict[bytes, list[int]] = {}
    for i, r in enumerate(keys):
        index.setdefault(r.tobytes(), []).append(i)
    assigned = np.zeros(len(items), dtype=bool)
    classes = []
    for i in range(len(items)):
        if assigned[i]:
            continue
        seen, rows = _bfs(act, keys[i:i + 1])
        members = []
        for k in seen:
            for j in index.get(k, ()):
                members.append(j)
                assigned[j] = True
        rep_row = min(tuple(r.tolist()) for r in rows)
        rep = BellInequality(st, rep_row[:-1], 0, rep_row[-1], provenance="class representative")
        classes.append(SymmetryClass(rep, sorted(members), len(seen), rep.is_trivial()))
    classes.sort(key=lambda c: c.representative.canonical())
    return classes


def class_counts(classes: Iterable[SymmetryClass]) -> tuple[int, int]:
    """(total classes, non-trivial classes)."""
    classes = list(classes)
    return len(classes), sum(1 for c in classes if not c.trivial)
