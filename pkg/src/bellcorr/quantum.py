"""Quantum correlators and a see-saw lower bound on quantum violations.

Measurement for party j with setting s_j: the orthonormal basis given by the
columns of D(phi) F, where F is the d-point DFT unitary and D(phi) is
diagonal with phases (0, phi_1, ..., phi_{d-1}) (first phase fixed as gauge).
The outcome-m projector is M e_m e_m^dagger M^dagger with M = D F.

Everything here is floating point.  Values are lower bounds: they come from
explicit states and measurements.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch
from .inequality import BellInequality
from .modfunc import Setting

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def dft_matrix(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d)


def ghz_state(n: int, d: int) -> np.ndarray:
    """(1/sqrt d) sum_j |j...j>; the maximally entangled state for n = 2."""
    psi = np.zeros(d ** n, dtype=complex)
    for j in range(d):
        psi[sum(j * d ** i for i in range(n))] = 1
    return psi / math.sqrt(d)


def max_entangled_state(d: int) -> np.ndarray:
    return ghz_state(2, d)


@dataclass
class MeasurementFamily:
    """phases[j] has shape (c_j, d) with column 0 identically zero."""

    setting: Setting
    phases: list

    def __post_init__(self):
        st = self.setting
        if len(self.phases) != st.n:
            raise DimensionMismatch("one phase table per party required")
        out = []
        for j, ph in enumerate(self.phases):
            ph = np.array(ph, dtype=float)
            if ph.shape != (st.alphabet_sizes[j], st.d):
                raise DimensionMismatch(f"party {j}: phase table shape {ph.shape}")
            ph[:, 0] = 0.0
            out.append(ph)
        self.phases = out

    @classmethod
    def random(cls, setting: Setting, rng: np.random.Generator) -> "MeasurementFamily":
        return cls(setting, [rng.uniform(0, 2 * np.pi, size=(c, setting.d)) for c in setting.alphabet_sizes])

    @classmethod
    def zeros(cls, setting: Setting) -> "MeasurementFamily":
        return cls(setting, [np.zeros((c, setting.d)) for c in setting.alphabet_sizes])

    def unitaries(self) -> list[np.ndarray]:
        """Per party an array (c_j, d, d) of D(phi) F."""
        F = dft_matrix(self.setting.d)
        return [np.exp(1j * ph)[:, :, None] * F[None, :, :] for ph in self.phases]

    def copy(self) -> "MeasurementFamily":
        return MeasurementFamily(self.setting, [p.copy() for p in self.phases])


def _digit_sum_index(n: int, d: int) -> np.ndarray:
    grids = np.indices((d,) * n).reshape(n, -1)
    return grids.sum(axis=0) % d


def outcome_probabilities(state: np.ndarray, unitaries: Sequence[np.ndarray], setting: Setting) -> np.ndarray:
    """p(m|s) as an array (num_strings, d^n)."""
    n, d = setting.n, setting.d
    if state.shape != (d ** n,):
        raise DimensionMismatch(f"state of length {state.shape} for {n} parties of dimension {d}")
    T = state.reshape((d,) * n)
    # T carries setting axes for parties already measured, then n outcome axes
    for j in range(n):
        Uh = np.conj(np.swapaxes(unitaries[j], 1, 2))  # Uh[s, m, r] = conj(U[s, r, m])
        set_axes = _LETTERS[:j]
        out_axes = _LETTERS[13:13 + n]
        r = out_axes[j]
        src = set_axes + out_axes
        dst = set_axes + "z" + out_axes.replace(r, "y")
        T = np.einsum(f"zy{r},{src}->{dst}", Uh, T)
    P = np.abs(T) ** 2
    return P.reshape(setting.num_strings, d ** n)


def full_correlator_float(state, meas: MeasurementFamily) -> np.ndarray:
    """p(k|s) for k = 0..d-1, array (num_strings, d)."""
    st = meas.setting
    P = outcome_probabilities(state, meas.unitaries(), st)
    ks = _digit_sum_index(st.n, st.d)
    out = np.zeros((st.num_strings, st.d))
    for k in range(st.d):
        out[:, k] = P[:, ks == k].sum(axis=1)
    return out


def quantum_correlator(state, meas: MeasurementFamily) -> np.ndarray:
    """Reduced correlator vector (k = 1..d-1 inner), floating point."""
    return full_correlator_float(state, meas)[:, 1:].reshape(-1)


def _weights(ineq: BellInequality) -> tuple[float, np.ndarray]:
    st = ineq.setting
    w = np.zeros((st.num_strings, st.d))
    w[:, 1:] = np.array([float(x) for x in ineq.coeffs]).reshape(st.num_strings, st.d - 1)
    return float(ineq.offset), w


def bell_value(ineq: BellInequality, state, meas: MeasurementFamily) -> float:
    off, w = _weights(ineq)
    return off + float((w * full_correlator_float(state, meas)).sum())


def bell_operator(ineq: BellInequality, meas: MeasurementFamily) -> np.ndarray:
    """offset * I + sum_s U_s diag(omega_s[digit sum]) U_s^dagger."""
    st = ineq.setting
    off, w = _weights(ineq)
    Us = meas.unitaries()
    ks = _digit_sum_index(st.n, st.d)
    dim = st.d ** st.n
    B = off * np.eye(dim, dtype=complex)
    for si, s in enumerate(st.strings):
        U = np.array([[1.0 + 0j]])
        for j, sj in enumerate(s):
            U = np.kron(U, Us[j][sj])
        B += (U * w[si][ks][None, :]) @ U.conj().T
    return (B + B.conj().T) / 2


# ---- expectation-value form ---------------------------------------------------

def expectation_moments(full_corr) -> np.ndarray:
    """E_mu(s) = sum_k exp(2 pi i mu k / d) p(k|s) for mu = 0..d-1; array (num_strings, d)."""
    P = np.asarray(full_corr, dtype=float)
    d = P.shape[1]
    k = np.arange(d)
    phase = np.exp(2j * np.pi * np.outer(k, k) / d)  # [k, mu]
    return P @ phase


def expectation_values(full_corr) -> np.ndarray:
    """E(s) = sum_k exp(2 pi i k / d) p(k|s)."""
    return expectation_moments(full_corr)[:, 1 % np.asarray(full_corr).shape[1]]


def fourier_form(ineq: BellInequality) -> np.ndarray:
    """eta[s, mu] = (1/d) sum_{k=0}^{d-1} W[s, k] exp(-2 pi i mu k / d) over the full-k weights."""
    st = ineq.setting
    d = st.d
    W = np.array([float(x) for x in ineq.full_coeffs()]).reshape(st.num_strings, d)
    k = np.arange(d)
    return W @ np.exp(-2j * np.pi * np.outer(k, k) / d) / d


def value_from_fourier(eta: np.ndarray, moments: np.ndarray) -> float:
    """sum_{s, mu} eta[s, mu] E_mu(s) (real part; the imaginary part vanishes)."""
    return float(np.real((eta * moments).sum()))


def reduced_to_full_float(setting: Setting, reduced) -> np.ndarray:
    r = np.asarray(reduced, dtype=float).reshape(setting.num_strings, setting.d - 1)
    return np.concatenate([1 - r.sum(axis=1, keepdims=True), r], axis=1)


# ---- entanglement diagnostics ---------------------------------------------------

def schmidt_coefficients(state: np.ndarray, d: int) -> np.ndarray:
    return np.linalg.svd(state.reshape(d, -1), compute_uv=False)


def is_maximally_entangled(state: np.ndarray, d: int, tol: float = 1e-6) -> bool:
    sc = schmidt_coefficients(state, d)
    return bool(np.all(np.abs(sc - 1 / math.sqrt(d)) <= tol))


def three_tangle(state: np.ndarray) -> float:
    """Coffman-Kundu-Wootters residual tangle of a 3-qubit pure state (1 exactly for GHZ-type up to LU)."""
    a = state.reshape(2, 2, 2)
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return float(4 * abs(d1 - 2 * d2 + 4 * d3))


def ghz_fidelity_lu(state: np.ndarray, n: int, d: int) -> float:
    """Best overlap |<GHZ|(local unitaries)|state>|^2, for the cases we can certify.

    n = 2: (sum of Schmidt coefficients)^2 / d.  n = 3, d = 2: the 3-tangle,
    which equals 1 exactly on the GHZ local-unitary orbit (returned as a
    certificate value, not a fidelity, for other states).
    """
    if n == 2:
        return float(schmidt_coefficients(state, d).sum() ** 2 / d)
    if n == 3 and d == 2:
        return three_tangle(state)
    raise NotImplementedError("local-unitary GHZ test only for two parties or three qubits")


# ---- optimiser ------------------------------------------------------------------

@dataclass
class OptimizerReport:
    inequality: str
    setting: str
    value: float
    gamma_L: float
    violation: bool
    state: np.ndarray
    phases: list
    schmidt: list
    maximally_entangled: bool
    restarts: int
    restart_values: list
    rounds: list = field(default_factory=list)
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps({
            "inequality": self.inequality,
            "setting": self.setting,
            "value": round(self.value, 10),
            "gamma_L": self.gamma_L,
            "violation": self.violation,
            "maximally_entangled": self.maximally_entangled,
            "schmidt_coefficients": [round(x, 10) for x in self.schmidt],
            "phases": [[[round(float(x), 10) for x in row] for row in p] for p in self.phases],
            "restarts": self.restarts,
            "restart_values": [round(v, 10) for v in self.restart_values],
            "seed": self.seed,
        }, indent=2, sort_keys=True)


class _PhaseObjective:
    def __init__(self, ineq: BellInequality):
        self.ineq = ineq
        self.setting = ineq.setting
        self.offset, self.w = _weights(ineq)
        st = self.setting
        self.ks = _digit_sum_index(st.n, st.d)
        # weight per (setting string, outcome string)
        self.wm = self.w[:, self.ks]
        self.F = dft_matrix(st.d)

    def __call__(self, state, phases) -> float:
        Us = [np.exp(1j * ph)[:, :, None] * self.F[None, :, :] for ph in phases]
        P = outcome_probabilities(state, Us, self.setting)
        return self.offset + float((self.wm * P).sum())


def _coordinate_ascent(obj: _PhaseObjective, state, phases, tol=1e-12, max_sweeps=2000):
    """Cyclic exact line maximisation over each free phase.

    With everything else fixed the objective in one phase theta has the form
    C + Re(B exp(i theta)), so three evaluations determine the maximiser.
    """
    d = obj.setting.d
    shifts = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    e = np.exp(-1j * shifts)
    value = obj(state, phases)
    for _ in range(max_sweeps):
        start = value
        for j, ph in enumerate(phases):
            for s in range(ph.shape[0]):
                for r in range(1, d):
                    base = ph[s, r]
                    vals = np.empty(3)
                    vals[0] = value
                    for t in (1, 2):
                        ph[s, r] = base + shifts[t]
                        vals[t] = obj(state, phases)
                    B = (2 / 3) * (vals * e).sum()
                    ph[s, r] = (base - np.angle(B)) % (2 * np.pi)
                    value = obj(state, phases)
        if value - start <= tol:
            break
    return value


def lower_bound_violation(ineq: BellInequality, restarts: int = 50, seed: int = 0,
                          max_rounds: int = 200, tol: float = 1e-8, initial_state=None,
                          fix_state: bool = False) -> OptimizerReport:
    """See-saw lower bound on the maximal quantum value of ``ineq``.

    Per restart: random phases and the GHZ-type warm-start state; maximise
    over phases, then replace the state by the top eigenvector of the Bell
    operator, and repeat until the value moves by less than ``tol``.  With
    ``fix_state`` only the phase step runs.
    """
    st = ineq.setting
    n, d = st.n, st.d
    obj = _PhaseObjective(ineq)
    psi0 = ghz_state(n, d) if initial_state is None else np.asarray(initial_state, dtype=complex)
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    values = []
    for idx, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        meas = MeasurementFamily.random(st, rng)
        phases = meas.phases
        state = psi0.copy()
        value = _coordinate_ascent(obj, state, phases)
        rounds = 0
        if not fix_state:
            for rounds in range(1, max_rounds + 1):
                B = bell_operator(ineq, MeasurementFamily(st, phases))
                evals, evecs = np.linalg.eigh(B)
                state = evecs[:, -1]
                new = _coordinate_ascent(obj, state, phases)
                if abs(new - value) < tol:
                    value = new
                    break
                value = new
        values.append(value)
        if best is None or value > best[0] + 1e-12:
            best = (value, state.copy(), [p.copy() for p in phases], idx, rounds)
    value, state, phases, idx, rounds = best
    sc = schmidt_coefficients(state, d).tolist() if n == 2 else []
    return OptimizerReport(
        inequality=ineq.name or ineq.provenance,
        setting=str(st),
        value=value,
        gamma_L=float(ineq.gamma_L),
        violation=value > float(ineq.gamma_L) + 1e-9,
        state=state,
        phases=phases,
        schmidt=sc,
        maximally_entangled=is_maximally_entangled(state, d) if n == 2 else False,
        restarts=restarts,
        restart_values=values,
        seed=seed,
    )


@dataclass
class GhzCheck:
    free_value: float
    ghz_value: float
    final_state_certificate: float

    @property
    def ghz_attains_optimum(self) -> bool:
        return self.ghz_value >= self.free_value - 1e-6


def ghz_property(ineq: BellInequality, restarts: int = 20, seed: int = 0) -> GhzCheck:
    """Compare the unrestricted see-saw optimum with the optimum over measurements on GHZ."""
    st = ineq.setting
    free = lower_bound_violation(ineq, restarts=restarts, seed=seed)
    fixed = lower_bound_violation(ineq, restarts=restarts, seed=seed, fix_state=True)
    cert = ghz_fidelity_lu(free.state, st.n, st.d)
    return GhzCheck(free.value, fixed.value, cert)
