"""Quantum counterparts of the MAP operations.

A bipolar hypervector ``v`` of length ``D = 2**n`` is carried by the state
``D**-0.5 * sum_i v_i |i>``, prepared by a Hadamard layer followed by the
diagonal phase oracle ``O_v``. Binding composes oracles, permutation is a
QFT sandwich around single-qubit phase shifts, bundling is an LCU block
boosted by oblivious amplitude amplification, and similarity is read off a
Hadamard test.

Register layout: system qubits come first (``0..n-1``); LCU ancillas follow
(``n..n+m-1``). The Hadamard-test ancilla is qubit ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import hdc
from . import rng as _rng
from .errors import (
    CancellationError,
    DegenerateVectorError,
    InvalidArgumentError,
    InvalidDimensionError,
    ResourceLimitError,
)
from .sim import statevector as sv
from .sim.circuit import (
    QFT,
    Block,
    Circuit,
    Controlled,
    Diagonal,
    Gate,
    GlobalPhase,
    H,
    PhaseShift,
    UnitaryMatrix,
    controlled_on_state,
)

PHASE_TOL = 1e-12
SKIP_THRESHOLD = 0.9  # alpha**2 at or above this needs no amplification
TARGET_SUCCESS = 0.98
MAX_ROUNDS = 10
ROUND_GAIN_TOL = 1e-3  # success gain below this does not justify another round


def _log2_exact(d: int) -> int:
    n = int(d).bit_length() - 1
    if d < 2 or (1 << n) != d:
        raise InvalidDimensionError(f"dimension must be a power of two >= 2, got {d}")
    return n


# --------------------------------------------------------------------------
# Oracles and state preparation


@dataclass(frozen=True, eq=False)
class PhaseOracle:
    phases: np.ndarray

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=complex).reshape(-1)
        _log2_exact(ph.shape[0])
        if np.max(np.abs(np.abs(ph) - 1.0)) > PHASE_TOL:
            raise InvalidArgumentError("oracle phases must have unit modulus")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def dim(self) -> int:
        return self.phases.shape[0]

    @property
    def n_qubits(self) -> int:
        return _log2_exact(self.dim)

    @property
    def is_bipolar(self) -> bool:
        return bool(np.all(np.abs(self.phases.imag) <= PHASE_TOL) and np.all(np.abs(np.abs(self.phases.real) - 1) <= PHASE_TOL))

    def decode(self) -> np.ndarray:
        """Recover the bipolar vector; only defined for bipolar oracles."""
        if not self.is_bipolar:
            raise InvalidArgumentError("oracle is not bipolar")
        return np.where(self.phases.real < 0, -1, 1).astype(np.int64)

    def gate(self, qubits: Sequence[int] | None = None) -> Diagonal:
        qubits = tuple(range(self.n_qubits)) if qubits is None else tuple(qubits)
        return Diagonal(qubits, self.phases)


def oracle_from_bipolar(v) -> PhaseOracle:
    v = hdc.as_bipolar(v)
    _log2_exact(v.shape[0])
    return PhaseOracle(v.astype(complex))


def compose_bind(oracles: Sequence[PhaseOracle]) -> PhaseOracle:
    """Product oracle; diagonal operators compose by multiplying phases."""
    if not oracles:
        raise InvalidArgumentError("nothing to compose")
    dims = {o.dim for o in oracles}
    if len(dims) != 1:
        raise InvalidArgumentError(f"oracle dimensions differ: {sorted(dims)}")
    out = np.ones(oracles[0].dim, dtype=complex)
    for o in oracles:
        out = out * o.phases
    if all(o.is_bipolar for o in oracles):
        out = np.where(out.real < 0, -1.0, 1.0).astype(complex)
    return PhaseOracle(out)


def rms_phase_encode(v) -> PhaseOracle:
    """``phi_i = exp(i pi v_i / RMS)`` with ``RMS = sqrt(mean(v**2))``.

    Components at exactly ``+RMS`` and ``-RMS`` both land on ``-1``.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise InvalidArgumentError("expected a 1-D vector")
    rms = float(np.sqrt(np.mean(v * v)))
    if rms == 0.0:
        raise DegenerateVectorError("cannot phase-encode an all-zero vector (RMS = 0)")
    return PhaseOracle(np.exp(1j * np.pi * v / rms))


@dataclass(frozen=True)
class StatePrep:
    """Gates (on qubits ``0..n-1``) that map ``|0...0>`` to an encoded state."""

    gates: tuple[Gate, ...]
    n_qubits: int
    label: str = ""

    @property
    def circuit(self) -> Circuit:
        return Circuit(self.n_qubits, list(self.gates), {"system": tuple(range(self.n_qubits))})

    def block(self) -> Block:
        return Block(self.gates, self.label)

    def state(self) -> sv.Statevector:
        return sv.run(self.gates, n_qubits=self.n_qubits)

    def then(self, gates: Sequence[Gate], label: str | None = None) -> "StatePrep":
        return StatePrep(self.gates + tuple(gates), self.n_qubits, self.label if label is None else label)

    @classmethod
    def from_state(cls, amplitudes, label: str = "state") -> "StatePrep":
        """Wrap a known state as a single unitary whose first column is that state.

        Used for bundled prototypes: the post-selected LCU output is a
        heralded state, and reusing it downstream (e.g. inside a controlled
        Hadamard test) needs a unitary that produces it deterministically.
        """
        a = np.asarray(amplitudes, dtype=complex)
        n = _log2_exact(a.shape[0])
        nrm = np.linalg.norm(a)
        if abs(nrm - 1.0) > 1e-9:
            raise InvalidArgumentError(f"state must be normalized, norm is {nrm}")
        return cls((UnitaryMatrix(tuple(range(n)), householder_completion(a / nrm)),), n, label)


def householder_completion(first_column: np.ndarray) -> np.ndarray:
    """Unitary with the given unit vector as its first column."""
    s = np.asarray(first_column, dtype=complex)
    d = s.shape[0]
    phase = s[0] / abs(s[0]) if abs(s[0]) > 1e-15 else 1.0
    u = s.copy()
    u[0] -= phase
    un = np.vdot(u, u).real
    if un < 1e-30:
        return phase * np.eye(d, dtype=complex)
    Hh = np.eye(d, dtype=complex) - 2.0 * np.outer(u, u.conj()) / un
    return phase * Hh


def gram_schmidt_completion(first_column: np.ndarray) -> np.ndarray:
    """Orthonormal completion that continues with the canonical basis in order."""
    s = np.asarray(first_column, dtype=complex)
    d = s.shape[0]
    cols = [s / np.linalg.norm(s)]
    for j in range(d):
        if len(cols) == d:
            break
        e = np.zeros(d, dtype=complex)
        e[j] = 1.0
        for _ in range(2):  # second pass for numerical orthogonality
            for c in cols:
                e = e - np.vdot(c, e) * c
        nrm = np.linalg.norm(e)
        if nrm > 1e-9:
            cols.append(e / nrm)
    return np.column_stack(cols)


def prepare_state(o: PhaseOracle) -> StatePrep:
    n = o.n_qubits
    return StatePrep(tuple(H(q) for q in range(n)) + (o.gate(),), n, "prep")


def permutation_gates(qubits: Sequence[int], shift: int) -> tuple[Gate, ...]:
    """QFT, one phase shift per qubit, inverse QFT: ``|j> -> |j + shift mod D>``."""
    qubits = tuple(qubits)
    d = 1 << len(qubits)
    s = int(shift) % d
    gates: list[Gate] = [QFT(qubits)]
    for j, q in enumerate(qubits):
        gates.append(PhaseShift(q, 2 * math.pi * s * (1 << j) / d))
    gates.append(QFT(qubits, True))
    return tuple(gates)


def permute_circuit(prep: StatePrep, shift: int) -> StatePrep:
    block = Block(permutation_gates(range(prep.n_qubits), shift), f"perm{int(shift)}")
    return prep.then([block])


def encode(v) -> StatePrep:
    return prepare_state(oracle_from_bipolar(v))


# --------------------------------------------------------------------------
# LCU bundling and amplification


def ancilla_count(K: int) -> int:
    return 0 if K <= 1 else (K - 1).bit_length()


def _as_prep(item) -> StatePrep:
    if isinstance(item, StatePrep):
        return item
    if isinstance(item, PhaseOracle):
        return prepare_state(item)
    return encode(item)


def _normalize_weights(weights, K: int) -> np.ndarray:
    if weights is None:
        return np.full(K, 1.0 / K)
    w = np.asarray(weights, dtype=float)
    if w.shape != (K,):
        raise InvalidArgumentError(f"expected {K} weights, got shape {w.shape}")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidArgumentError("weights must be non-negative and sum to 1")
    return w


@dataclass
class LcuBundlePlan:
    unitaries: tuple[StatePrep, ...]
    weights: np.ndarray
    n_system: int
    m: int
    prep_unitary: np.ndarray
    alpha: float
    rounds: int
    max_rounds: int
    initial: sv.Statevector = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return self.n_system + self.m

    @property
    def system(self) -> tuple[int, ...]:
        return tuple(range(self.n_system))

    @property
    def ancillas(self) -> tuple[int, ...]:
        return tuple(range(self.n_system, self.n_system + self.m))

    @property
    def theta(self) -> float:
        return math.asin(min(1.0, self.alpha))

    def a_gates(self) -> list[Gate]:
        return lcu_gates(self.unitaries, self.prep_unitary, self.n_system, self.m)

    def circuit(self) -> Circuit:
        c = Circuit(self.n_qubits, self.a_gates(), {"system": self.system, "ancilla": self.ancillas})
        return c


def lcu_gates(unitaries: Sequence[StatePrep], prep_unitary: np.ndarray, n_system: int, m: int) -> list[Gate]:
    """``A = PREP -> SELECT -> PREP^dagger`` as a gate list."""
    if m == 0:
        return list(unitaries[0].gates)
    anc = tuple(range(n_system, n_system + m))
    gates: list[Gate] = [UnitaryMatrix(anc, prep_unitary)]
    for k, u in enumerate(unitaries):
        gates.append(controlled_on_state(u.block(), anc, k))
    gates.append(UnitaryMatrix(anc, prep_unitary.conj().T))
    return gates


def lcu_prepare(items: Sequence, weights=None, max_rounds: int = MAX_ROUNDS) -> LcuBundlePlan:
    """Build ``A`` for a weighted sum of preps and measure its success amplitude.

    ``items`` may be StatePreps, PhaseOracles or bipolar vectors.
    """
    preps = tuple(_as_prep(x) for x in items)
    K = len(preps)
    if K == 0:
        raise InvalidArgumentError("LCU needs at least one unitary")
    n = preps[0].n_qubits
    if any(p.n_qubits != n for p in preps):
        raise InvalidArgumentError("all unitaries must act on the same number of qubits")
    w = _normalize_weights(weights, K)
    m = ancilla_count(K)
    if n + m > sv.max_qubits():
        raise ResourceLimitError(f"LCU over {K} terms needs {n + m} qubits, cap is {sv.max_qubits()}")
    col = np.zeros(1 << m, dtype=complex)
    col[:K] = np.sqrt(w)
    prep_u = gram_schmidt_completion(col) if m else np.ones((1, 1), dtype=complex)
    a = sv.run(lcu_gates(preps, prep_u, n, m), n_qubits=n + m)
    good = a.amplitudes[: 1 << n]  # ancilla bits are the high bits
    alpha = float(min(1.0, np.linalg.norm(good)))
    rounds = estimate_rounds(alpha, max_rounds)
    return LcuBundlePlan(preps, w, n, m, prep_u, alpha, rounds, int(max_rounds), a)


def predicted_success(alpha: float, rounds: int) -> float:
    theta = math.asin(min(1.0, max(0.0, alpha)))
    return math.sin((2 * rounds + 1) * theta) ** 2


def estimate_rounds(
    alpha: float,
    max_rounds: int = MAX_ROUNDS,
    threshold: float = SKIP_THRESHOLD,
    target_success: float = TARGET_SUCCESS,
) -> int:
    """Number of amplification rounds for success amplitude ``alpha``.

    Starts from ``floor(pi / (4 theta) - 1/2)`` and scans two rounds either
    side in increasing order, taking the first candidate whose predicted
    success ``sin^2((2r+1) theta)`` reaches ``target_success``. If none does,
    the smallest ``r`` within ``ROUND_GAIN_TOL`` of the best prediction wins,
    so an extra round is never spent on a negligible gain. The result is
    capped at ``max_rounds``.
    """
    if not (0.0 <= alpha <= 1.0) or math.isnan(alpha):
        raise InvalidArgumentError(f"alpha must lie in [0, 1], got {alpha}")
    if max_rounds < 0:
        raise InvalidArgumentError("max_rounds must be >= 0")
    if alpha * alpha >= threshold or alpha == 0.0:
        return 0
    theta = math.asin(alpha)
    r_est = max(0, math.floor(math.pi / (4 * theta) - 0.5))
    window = range(max(0, r_est - 2), r_est + 3)
    probs = {r: predicted_success(alpha, r) for r in window}
    chosen = None
    if target_success is not None:
        chosen = next((r for r in window if probs[r] >= target_success), None)
    if chosen is None:
        best = max(probs.values())
        chosen = min(r for r in window if probs[r] >= best - ROUND_GAIN_TOL)
    return int(min(chosen, max_rounds))


def reflection_gates(plan_n_system: int, m: int, *, s0_sign: float = -1.0) -> tuple[list[Gate], list[Gate]]:
    """(S_psi, S_0): ancilla-zero subspace reflection and all-zero reflection.

    ``s0_sign`` is the phase placed on ``|0...0>``; anything other than ``-1``
    is a deliberate fault used by the self-test.
    """
    total = plan_n_system + m
    if m:
        ph = np.ones(1 << m, dtype=complex)
        ph[0] = -1.0
        s_psi: list[Gate] = [Diagonal(tuple(range(plan_n_system, total)), ph)]
    else:
        s_psi = [GlobalPhase(math.pi)]
    ph0 = np.ones(1 << total, dtype=complex)
    ph0[0] = s0_sign
    s_0: list[Gate] = [Diagonal(tuple(range(total)), ph0)]
    return s_psi, s_0


def oaa_round_gates(plan: LcuBundlePlan, *, s0_sign: float = -1.0) -> list[Gate]:
    """One application of ``Q = -A S_0 A^dagger S_psi`` (time order: right to left)."""
    a = plan.a_gates()
    a_dg = [g.inverse() for g in reversed(a)]
    s_psi, s_0 = reflection_gates(plan.n_system, plan.m, s0_sign=s0_sign)
    return s_psi + a_dg + s_0 + a + [GlobalPhase(math.pi)]


def oaa_amplify(plan: LcuBundlePlan, rounds: int | None = None, *, s0_sign: float = -1.0) -> tuple[sv.Statevector, float]:
    """Apply ``rounds`` (default ``plan.rounds``) iterations of Q to ``A|0>``.

    Returns the full register state and the ancilla-zero probability.
    """
    r = plan.rounds if rounds is None else int(rounds)
    if r < 0:
        raise InvalidArgumentError("rounds must be >= 0")
    state = plan.initial
    if r:
        q = oaa_round_gates(plan, s0_sign=s0_sign)
        state = sv.run(q * r, state=state)
    good = state.amplitudes[: 1 << plan.n_system]
    return state, float(np.vdot(good, good).real)


@dataclass
class BundleResult:
    prep: StatePrep
    state: sv.Statevector
    alpha: float
    rounds: int
    success: float
    plan: LcuBundlePlan = field(repr=False)

    def diagnostics(self) -> dict:
        return {
            "alpha": self.alpha,
            "rounds": self.rounds,
            "success_probability": self.success,
            "K": len(self.plan.unitaries),
            "ancillas": self.plan.m,
        }


def analytic_bundle(items: Sequence, weights=None) -> np.ndarray:
    """Normalized ``sum_k w_k |psi_k>`` computed directly (test oracle)."""
    preps = [_as_prep(x) for x in items]
    w = _normalize_weights(weights, len(preps))
    acc = sum(wk * p.state().amplitudes for wk, p in zip(w, preps))
    nrm = np.linalg.norm(acc)
    if nrm < 1e-12:
        raise CancellationError("bundled states cancel to zero")
    return acc / nrm


def bundle_states(items: Sequence, weights=None, max_rounds: int = MAX_ROUNDS) -> BundleResult:
    """LCU, round estimation, amplification, then post-selection on ancilla zero."""
    plan = lcu_prepare(items, weights, max_rounds)
    if plan.alpha < 1e-12:
        raise CancellationError("bundled states cancel to zero (alpha = 0)")
    state, success = oaa_amplify(plan)
    if plan.m:
        system, _ = sv.reduced_system(state, plan.system, plan.ancillas, 0)
    else:
        system = state
    return BundleResult(StatePrep.from_state(system.amplitudes, "bundle"), system, plan.alpha, plan.rounds, success, plan)


# --------------------------------------------------------------------------
# Probabilistic LCU


@dataclass
class ProbabilisticLcuResult:
    states: list[sv.Statevector]
    ancilla_p0: list[float]
    chosen: list[int]
    control_value: int = 1

    @property
    def final(self) -> sv.Statevector:
        return self.states[-1]


def probabilistic_lcu_gates(unitaries: Sequence[StatePrep], chosen: Sequence[int], n_system: int) -> list[Gate]:
    anc = n_system
    gates: list[Gate] = []
    for k in chosen:
        gates.append(H(anc))
        gates.append(Controlled(unitaries[k].block(), (anc,), (1,)))
        gates.append(H(anc))
    return gates


def probabilistic_lcu(
    items: Sequence,
    weights=None,
    rounds: int = 1,
    rng: np.random.Generator | int | None = None,
) -> ProbabilisticLcuResult:
    """Shallow randomized bundling with one ancilla.

    Each round draws one unitary ``U_k`` from ``weights`` and applies
    ``H(anc); U_k controlled on anc = 1; H(anc)``. The ancilla is never
    measured mid-circuit; ``ancilla_p0`` records ``P(anc = 0)`` after each
    round. The system starts in ``|0...0>``.
    """
    preps = tuple(_as_prep(x) for x in items)
    if not preps:
        raise InvalidArgumentError("need at least one unitary")
    if int(rounds) != rounds or rounds < 1:
        raise InvalidArgumentError("rounds must be a positive integer")
    n = preps[0].n_qubits
    if any(p.n_qubits != n for p in preps):
        raise InvalidArgumentError("all unitaries must act on the same number of qubits")
    w = _normalize_weights(weights, len(preps))
    gen = _rng.as_generator(rng)
    chosen = [int(k) for k in gen.choice(len(preps), size=int(rounds), p=w)]
    state = sv.zero_state(n + 1)
    states, p0 = [], []
    for k in chosen:
        state = sv.run(probabilistic_lcu_gates(preps, [k], n), state=state)
        states.append(state)
        p0.append(sv.outcome_probability(state, [n], [0]))
    return ProbabilisticLcuResult(states, p0, chosen)


# --------------------------------------------------------------------------
# Similarity


@dataclass(frozen=True)
class SimilarityEstimate:
    value: float
    mode: str
    shots: int = 0
    std_error: float = 0.0
    p0: float = float("nan")


def hadamard_test_gates(prep_psi: StatePrep, prep_phi: StatePrep) -> list[Gate]:
    anc = prep_psi.n_qubits
    return [
        H(anc),
        Controlled(prep_psi.block(), (anc,), (0,)),
        Controlled(prep_phi.block(), (anc,), (1,)),
        H(anc),
    ]


def hadamard_test(
    prep_psi: StatePrep,
    prep_phi: StatePrep,
    shots: int = 0,
    rng: np.random.Generator | int | None = None,
    noise: float = 0.0,
) -> SimilarityEstimate:
    """Estimate ``Re<psi|phi>`` as ``P(0) - P(1)`` on the ancilla.

    ``shots == 0`` returns the exact value from amplitudes. Otherwise the
    ancilla is sampled ``shots`` times and ``std_error`` is
    ``sqrt(p (1 - p) / shots)`` at the observed ``p = P(0)``.
    """
    if prep_psi.n_qubits != prep_phi.n_qubits:
        raise InvalidArgumentError("preps act on different numbers of qubits")
    if int(shots) != shots or shots < 0:
        raise InvalidArgumentError("shots must be a non-negative integer")
    n = prep_psi.n_qubits
    state = sv.run(hadamard_test_gates(prep_psi, prep_phi), n_qubits=n + 1)
    p0 = sv.outcome_probability(state, [n], [0])
    if shots == 0:
        return SimilarityEstimate(value=float(2 * p0 - 1), mode="exact", p0=p0)
    res = sv.sample(state, [n], int(shots), rng=rng, noise=noise)
    p_hat = res.probability("0")
    return SimilarityEstimate(
        value=float(2 * p_hat - 1),
        mode="sampled",
        shots=int(shots),
        std_error=float(math.sqrt(p_hat * (1 - p_hat) / shots)),
        p0=p_hat,
    )
