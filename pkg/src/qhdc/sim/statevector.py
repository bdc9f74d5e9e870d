"""Dense statevector engine.

``apply`` returns a new state; ``run`` and the ``_apply_inplace`` helper work on
a private buffer so long circuits do not copy per gate.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import ImpossibleOutcomeError, InvalidArgumentError, ResourceLimitError
from .. import rng as _rng
from . import kernels
from .circuit import (
    CNOT,
    QFT,
    X,
    Block,
    Circuit,
    Controlled,
    Diagonal,
    Gate,
    GlobalPhase,
    OneQubitGate,
    UnitaryMatrix,
)

DEFAULT_MAX_QUBITS = 16
NORM_TOL = 1e-10


def max_qubits() -> int:
    """Register cap; ``QHDC_MAX_QUBITS`` overrides the default of 16."""
    raw = os.environ.get("QHDC_MAX_QUBITS")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise InvalidArgumentError(f"QHDC_MAX_QUBITS must be an integer, got {raw!r}") from None
    return DEFAULT_MAX_QUBITS


def check_register(n: int) -> None:
    cap = max_qubits()
    if n < 1 or n > cap:
        raise ResourceLimitError(f"register of {n} qubits outside the allowed range 1..{cap}")


@dataclass(frozen=True, eq=False)
class Statevector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.shape[0] != 1 << self.n_qubits:
            raise InvalidArgumentError(f"expected {1 << self.n_qubits} amplitudes, got shape {a.shape}")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex], normalize: bool = False) -> "Statevector":
        a = np.array(amps, dtype=complex)
        n = int(a.shape[0]).bit_length() - 1
        if a.ndim != 1 or a.shape[0] < 2 or 1 << n != a.shape[0]:
            raise InvalidArgumentError("amplitude count must be a power of two >= 2")
        nrm = np.linalg.norm(a)
        if normalize:
            if nrm == 0:
                raise InvalidArgumentError("cannot normalize the zero vector")
            a = a / nrm
        elif abs(nrm - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"state norm {nrm} is not 1")
        return cls(a, n)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.n_qubits)


@dataclass(frozen=True)
class ShotResult:
    """Measured bitstrings; character ``i`` of a key is the bit of ``qubits[i]``."""

    counts: dict[str, int]
    shots: int
    qubits: tuple[int, ...]

    def probability(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.shots


def zero_state(n: int) -> Statevector:
    check_register(int(n))
    a = np.zeros(1 << n, dtype=complex)
    a[0] = 1.0
    return Statevector(a, int(n))


def _check_gate(gate: Gate, n: int) -> None:
    bad = [q for q in gate.qubits if q >= n]
    if bad:
        raise InvalidArgumentError(f"gate touches qubit(s) {bad} outside a {n}-qubit register")


def _dense_on_targets(psi: np.ndarray, n: int, targets: tuple[int, ...], cmask: int, cval: int, op) -> None:
    """Apply ``op`` (maps rows of shape ``(-1, 2**k)`` to same) on ``targets``.

    Works through a tensor view of ``psi`` with control axes fixed, so only
    the control-matching subspace is touched.
    """
    T = psi.reshape((2,) * n)
    index: list = [slice(None)] * n
    for q in range(n):
        if (cmask >> q) & 1:
            index[n - 1 - q] = (cval >> q) & 1
    sub = T[tuple(index)]
    free = [q for q in range(n - 1, -1, -1) if not (cmask >> q) & 1]
    axis_of = {q: i for i, q in enumerate(free)}
    # Last axis must be the first target so that it ends up least significant.
    src = [axis_of[q] for q in reversed(targets)]
    k = len(targets)
    dst = list(range(sub.ndim - k, sub.ndim))
    moved = np.moveaxis(sub, src, dst)
    shape = moved.shape
    flat = np.ascontiguousarray(moved).reshape(-1, 1 << k)
    out = op(flat).reshape(shape)
    sub[...] = np.moveaxis(out, dst, src)


def _qft_rows(inverse: bool):
    def op(rows: np.ndarray) -> np.ndarray:
        d = rows.shape[1]
        if inverse:
            return np.fft.fft(rows, axis=1) / np.sqrt(d)
        return np.fft.ifft(rows, axis=1) * np.sqrt(d)

    return op


def _apply_inplace(psi: np.ndarray, n: int, gate: Gate, cmask: int = 0, cval: int = 0) -> None:
    if isinstance(gate, X):
        kernels.apply_x(psi, gate.qubit, cmask, cval)
    elif isinstance(gate, OneQubitGate):
        kernels.apply_1q(psi, gate.matrix(), gate.qubit, cmask, cval)
    elif isinstance(gate, CNOT):
        bit = 1 << gate.control
        kernels.apply_x(psi, gate.target, cmask | bit, cval | bit)
    elif isinstance(gate, Diagonal):
        kernels.apply_diagonal(psi, gate.phases, np.asarray(gate.targets, dtype=np.int64), cmask, cval)
    elif isinstance(gate, GlobalPhase):
        ph = np.exp(1j * gate.angle)
        if cmask == 0:
            psi *= ph
        else:
            kernels.apply_diagonal(psi, np.array([ph]), np.zeros(0, dtype=np.int64), cmask, cval)
    elif isinstance(gate, QFT):
        _dense_on_targets(psi, n, gate.targets, cmask, cval, _qft_rows(gate.inverse_))
    elif isinstance(gate, UnitaryMatrix):
        mt = gate.matrix.T
        _dense_on_targets(psi, n, gate.targets, cmask, cval, lambda rows: rows @ mt)
    elif isinstance(gate, Block):
        for g in gate.gates:
            _apply_inplace(psi, n, g, cmask, cval)
    elif isinstance(gate, Controlled):
        m, v = cmask, cval
        for c, val in zip(gate.controls, gate.values):
            bit = 1 << c
            if m & bit:
                raise InvalidArgumentError(f"qubit {c} controlled twice")
            m |= bit
            if val:
                v |= bit
        _apply_inplace(psi, n, gate.gate, m, v)
    else:
        raise InvalidArgumentError(f"unsupported gate {type(gate).__name__}")


def apply(state: Statevector, gate: Gate) -> Statevector:
    _check_gate(gate, state.n_qubits)
    psi = state.amplitudes.copy()
    _apply_inplace(psi, state.n_qubits, gate)
    return Statevector(psi, state.n_qubits)


def apply_qft(state: Statevector, qubits: Sequence[int], inverse: bool = False) -> Statevector:
    if len(qubits) == 0:
        raise InvalidArgumentError("QFT needs at least one qubit")
    return apply(state, QFT(tuple(qubits), inverse))


def run(circuit: Circuit | Iterable[Gate], state: Statevector | None = None, n_qubits: int | None = None) -> Statevector:
    """Apply gates in order, starting from ``state`` or ``|0...0>``."""
    if isinstance(circuit, Circuit):
        n_qubits = circuit.n_qubits
        gates = circuit.gates
    else:
        gates = list(circuit)
    if state is None:
        if n_qubits is None:
            raise InvalidArgumentError("need a start state or a qubit count")
        state = zero_state(n_qubits)
    elif n_qubits is not None and n_qubits != state.n_qubits:
        raise InvalidArgumentError("start state size does not match the circuit")
    n = state.n_qubits
    psi = state.amplitudes.copy()
    for g in gates:
        _check_gate(g, n)
        _apply_inplace(psi, n, g)
    return Statevector(psi, n)


def unitary_of(gates: Iterable[Gate], n_qubits: int) -> np.ndarray:
    """Dense matrix of a gate sequence (column ``j`` is the image of ``|j>``)."""
    gates = list(gates)
    d = 1 << n_qubits
    U = np.empty((d, d), dtype=complex)
    for j in range(d):
        psi = np.zeros(d, dtype=complex)
        psi[j] = 1.0
        for g in gates:
            _apply_inplace(psi, n_qubits, g)
        U[:, j] = psi
    return U


def inner_product(a: Statevector, b: Statevector) -> complex:
    if a.n_qubits != b.n_qubits:
        raise InvalidArgumentError(f"states have {a.n_qubits} and {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _outcome_mask(n: int, qubits: Sequence[int], bits: Sequence[int]) -> np.ndarray:
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits) or any(q < 0 or q >= n for q in qubits):
        raise InvalidArgumentError(f"bad qubit set {qubits} for {n} qubits")
    if len(bits) != len(qubits):
        raise InvalidArgumentError("one outcome bit per measured qubit")
    idx = np.arange(1 << n)
    sel = np.ones(1 << n, dtype=bool)
    for q, b in zip(qubits, bits):
        if b not in (0, 1):
            raise InvalidArgumentError("outcome bits must be 0 or 1")
        sel &= ((idx >> q) & 1) == b
    return sel


def outcome_probability(state: Statevector, qubits: Sequence[int], bits: Sequence[int]) -> float:
    sel = _outcome_mask(state.n_qubits, qubits, bits)
    return float(np.sum(np.abs(state.amplitudes[sel]) ** 2))


def project(state: Statevector, qubits: Sequence[int], bits: Sequence[int] | int) -> tuple[Statevector, float]:
    """Post-measurement state (renormalized) and the outcome probability."""
    if isinstance(bits, (int, np.integer)):
        bits = [(int(bits) >> i) & 1 for i in range(len(qubits))]
    sel = _outcome_mask(state.n_qubits, qubits, bits)
    out = np.where(sel, state.amplitudes, 0)
    p = float(np.sum(np.abs(out) ** 2))
    if p <= 1e-300:
        raise ImpossibleOutcomeError(f"outcome {list(bits)} on qubits {list(qubits)} has probability 0")
    return Statevector(out / np.sqrt(p), state.n_qubits), p


def reduced_system(state: Statevector, system: Sequence[int], ancillas: Sequence[int], bits: Sequence[int] | int = 0) -> tuple[Statevector, float]:
    """Project ``ancillas`` onto ``bits`` and return the state of ``system`` alone."""
    post, p = project(state, ancillas, bits)
    n = state.n_qubits
    T = post.amplitudes.reshape((2,) * n)
    if isinstance(bits, (int, np.integer)):
        bits = [(int(bits) >> i) & 1 for i in range(len(ancillas))]
    index: list = [slice(None)] * n
    for q, b in zip(ancillas, bits):
        index[n - 1 - q] = b
    sub = T[tuple(index)]
    free = [q for q in range(n - 1, -1, -1) if q not in set(ancillas)]
    order = [free.index(q) for q in reversed(list(system))]
    amps = np.transpose(sub, order).reshape(-1)
    return Statevector(np.ascontiguousarray(amps), len(system)), p


def sample(
    state: Statevector,
    qubits: Sequence[int],
    shots: int,
    rng: np.random.Generator | int | None = None,
    noise: float = 0.0,
) -> ShotResult:
    """Draw ``shots`` measurements of ``qubits``.

    ``noise`` flips each recorded bit independently with that probability. With
    ``noise == 0`` no extra random numbers are consumed, so the counts match the
    noiseless draw exactly for the same seed.
    """
    if int(shots) != shots or shots < 1:
        raise InvalidArgumentError(f"shots must be a positive integer, got {shots}")
    if not 0.0 <= noise <= 1.0:
        raise InvalidArgumentError(f"noise must lie in [0, 1], got {noise}")
    n = state.n_qubits
    qubits = tuple(int(q) for q in qubits)
    if not qubits or len(set(qubits)) != len(qubits) or any(q < 0 or q >= n for q in qubits):
        raise InvalidArgumentError(f"bad qubit set {qubits} for {n} qubits")
    gen = _rng.as_generator(rng)
    probs = state.probabilities()
    idx = np.arange(1 << n)
    local = np.zeros(1 << n, dtype=np.int64)
    for b, q in enumerate(qubits):
        local |= ((idx >> q) & 1) << b
    marg = np.bincount(local, weights=probs, minlength=1 << len(qubits))
    marg = np.clip(marg, 0.0, None)
    marg /= marg.sum()
    draws = gen.choice(marg.shape[0], size=int(shots), p=marg)
    if noise > 0.0:
        flips = gen.random((int(shots), len(qubits))) < noise
        weights = (1 << np.arange(len(qubits))).astype(np.int64)
        draws = draws ^ (flips.astype(np.int64) @ weights)
    values, freq = np.unique(draws, return_counts=True)
    counts = {
        "".join(str((int(v) >> b) & 1) for b in range(len(qubits))): int(c)
        for v, c in zip(values, freq)
    }
    return ShotResult(counts=counts, shots=int(shots), qubits=qubits)
