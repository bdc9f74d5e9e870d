"""Lowering of IR gates (including nested controls) to primitive streams.

Every rule is exact on the whole register up to a global phase, which is
accumulated in ``PrimitiveCircuit.global_phase``. Controls are flattened
before a leaf gate is lowered, so a controlled gate's own global phase is
always realized as a relative phase on the controls rather than dropped.

Rules, with ``k`` controls (all reading 1):

* control value 0: conjugate that control with ``Rx(pi)`` / ``Rx(-pi)``
* diagonal leaves (Diagonal, PhaseShift, Rz, GlobalPhase): one extended
  diagonal over controls and targets, synthesized by Walsh spectrum; a
  singly controlled ``Rz`` uses the two-CNOT identity instead
* ``X`` / ``CNOT``: a CNOT for one control, else ``H . C^k Z . H``
* other single-qubit gates: ``A X B X C`` with ``ABC = I`` around two
  ``C^k X``, plus the determinant phase as a controlled phase
* QFT: lowered to primitives, then each primitive is controlled
* UnitaryMatrix: Givens rotations between Gray-code neighbours (each a
  fully controlled single-qubit gate) and a closing diagonal
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..errors import InvalidArgumentError
from ..sim.circuit import (
    CNOT,
    QFT,
    X,
    Block,
    Controlled,
    Diagonal,
    Gate,
    GlobalPhase,
    H,
    OneQubitGate,
    PhaseShift,
    Rx,
    Ry,
    Rz,
    Unitary1Q,
    UnitaryMatrix,
)
from .diagonal import synth_diagonal
from .primitive import HAD, PS, RX, RY, RZ, Builder, PrimitiveCircuit
from .qft import synth_qft

ANGLE_TOL = 1e-14


def zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    """``(delta, a, b, c)`` with ``u = e^{i delta} Rz(a) Ry(b) Rz(c)``."""
    u = np.asarray(u, dtype=complex)
    delta = float(np.angle(np.linalg.det(u))) / 2
    w = u * np.exp(-1j * delta)
    b = 2.0 * math.atan2(abs(w[1, 0]), abs(w[0, 0]))
    s = 2.0 * float(np.angle(w[1, 1])) if abs(w[1, 1]) > 1e-12 else 0.0
    d = 2.0 * float(np.angle(w[1, 0])) if abs(w[1, 0]) > 1e-12 else 0.0
    a, c = (s + d) / 2, (s - d) / 2
    # The square root of det is only fixed up to sign; fold a -1 into delta.
    probe = _rz(a) @ _ry(b) @ _rz(c)
    if np.max(np.abs(probe - w)) > 1e-9:
        delta += math.pi
    return delta, a, b, c


def _rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rot(b: Builder, kind: int, q: int, angle: float) -> None:
    if abs(angle) > ANGLE_TOL:
        b.add(kind, q, -1, float(angle))


@lru_cache(maxsize=64)
def _mcz_local(k: int) -> PrimitiveCircuit:
    """``C^k Z`` on local wires ``0..k`` (wire ``k`` is the target)."""
    ph = np.ones(1 << (k + 1), dtype=complex)
    ph[-1] = -1.0
    return synth_diagonal(ph, list(range(k + 1)), k + 1)


def _mcx(b: Builder, ctrls: Sequence[int], target: int) -> None:
    if len(ctrls) == 1:
        b.cx(ctrls[0], target)
        return
    b.add(HAD, target)
    b.extend(_mcz_local(len(ctrls)).remap(list(ctrls) + [target], b.n_qubits))
    b.add(HAD, target)


def _controlled_diagonal(b: Builder, ctrls: Sequence[int], targets: Sequence[int], phases: np.ndarray) -> None:
    k = len(ctrls)
    ph = np.asarray(phases, dtype=complex)
    ext = np.ones(1 << (k + len(targets)), dtype=complex)
    ext[((1 << k) - 1) + (np.arange(ph.shape[0]) << k)] = ph
    b.extend(synth_diagonal(ext, list(ctrls) + list(targets), b.n_qubits))


def _controlled_global_phase(b: Builder, ctrls: Sequence[int], phi: float) -> None:
    if abs(phi) <= ANGLE_TOL:
        return
    if not ctrls:
        b.global_phase -= phi  # emitted = e^{-i phi} * (e^{i phi} I)
        return
    if len(ctrls) == 1:
        b.add(PS, ctrls[0], -1, phi)
        return
    ph = np.ones(1 << len(ctrls), dtype=complex)
    ph[-1] = np.exp(1j * phi)
    b.extend(synth_diagonal(ph, list(ctrls), b.n_qubits))


def _one_qubit(b: Builder, g: OneQubitGate, ctrls: tuple[int, ...]) -> None:
    t = g.qubit
    if not ctrls:
        if isinstance(g, H):
            b.add(HAD, t)
        elif isinstance(g, X):
            b.add(RX, t, -1, math.pi)
            b.global_phase -= math.pi / 2  # Rx(pi) = e^{-i pi/2} X
        elif isinstance(g, (PhaseShift, Rz, Ry, Rx)):
            kind = {PhaseShift: PS, Rz: RZ, Ry: RY, Rx: RX}[type(g)]
            _rot(b, kind, t, g.angle)
        else:
            delta, a_, b_, c_ = zyz(g.matrix())
            _rot(b, RZ, t, c_)
            _rot(b, RY, t, b_)
            _rot(b, RZ, t, a_)
            b.global_phase -= delta
        return
    if isinstance(g, X):
        _mcx(b, ctrls, t)
        return
    if isinstance(g, Rz) and len(ctrls) == 1:
        c = ctrls[0]
        _rot(b, RZ, t, g.angle / 2)
        b.cx(c, t)
        _rot(b, RZ, t, -g.angle / 2)
        b.cx(c, t)
        return
    if isinstance(g, (PhaseShift, Rz)):
        _controlled_diagonal(b, ctrls, (t,), np.diag(g.matrix()))
        return
    delta, a_, b_, c_ = zyz(g.matrix())
    _rot(b, RZ, t, (c_ - a_) / 2)
    _mcx(b, ctrls, t)
    _rot(b, RZ, t, -(c_ + a_) / 2)
    _rot(b, RY, t, -b_ / 2)
    _mcx(b, ctrls, t)
    _rot(b, RY, t, b_ / 2)
    _rot(b, RZ, t, a_)
    _controlled_global_phase(b, ctrls, delta)


def givens_decomposition(u: np.ndarray) -> tuple[list[tuple[int, int, np.ndarray]], np.ndarray]:
    """Factor ``u`` into two-level rotations between Gray-code neighbours.

    Returns ``(steps, diag)`` in application order: first ``Diagonal(diag)``,
    then each ``(bit, basis_state, m)`` which applies the 2x2 matrix ``m`` to
    qubit ``bit`` when the other qubits match ``basis_state``.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    i = np.arange(d)
    gray = i ^ (i >> 1)
    v = u[np.ix_(gray, gray)].copy()
    rots: list[tuple[int, np.ndarray]] = []
    for c in range(d - 1):
        for r in range(d - 1, c, -1):
            y = v[r, c]
            if abs(y) < 1e-15:
                continue
            x = v[r - 1, c]
            rho = math.hypot(abs(x), abs(y))
            G = np.array([[np.conj(x), np.conj(y)], [-y, x]], dtype=complex) / rho
            v[[r - 1, r], :] = G @ v[[r - 1, r], :]
            rots.append((r, G))
    diag = np.empty(d, dtype=complex)
    diag[gray] = np.diag(v)
    steps = []
    for r, G in reversed(rots):
        lo, hi = gray[r - 1], gray[r]
        bit = int(lo ^ hi).bit_length() - 1
        m = G.conj().T
        if (lo >> bit) & 1:
            m = m[::-1, ::-1]
        steps.append((bit, int(hi), m))
    return steps, diag


def _unitary_matrix(b: Builder, g: UnitaryMatrix, ctrls: tuple[int, ...]) -> None:
    targets = g.targets
    if len(targets) == 1:
        _lower_into(b, Unitary1Q(targets[0], np.asarray(g.matrix)), ctrls, (1,) * len(ctrls))
        return
    steps, diag = givens_decomposition(g.matrix)
    if ctrls:
        _controlled_diagonal(b, ctrls, targets, diag)
    else:
        b.extend(synth_diagonal(diag, list(targets), b.n_qubits))
    for bit, state, m in steps:
        others = [j for j in range(len(targets)) if j != bit]
        sub_ctrls = ctrls + tuple(targets[j] for j in others)
        vals = (1,) * len(ctrls) + tuple((state >> j) & 1 for j in others)
        _lower_into(b, Unitary1Q(targets[bit], m), sub_ctrls, vals)


def _lower_into(b: Builder, g: Gate, ctrls: tuple[int, ...], vals: tuple[int, ...]) -> None:
    zeros = [c for c, v in zip(ctrls, vals) if v == 0]
    if zeros:
        for c in zeros:
            b.add(RX, c, -1, math.pi)
        _lower_into(b, g, ctrls, (1,) * len(ctrls))
        for c in zeros:
            b.add(RX, c, -1, -math.pi)
        return
    if isinstance(g, Controlled):
        _lower_into(b, g.gate, ctrls + g.controls, vals + g.values)
    elif isinstance(g, Block):
        for child in g.gates:
            _lower_into(b, child, ctrls, vals)
    elif isinstance(g, GlobalPhase):
        _controlled_global_phase(b, ctrls, g.angle)
    elif isinstance(g, OneQubitGate):
        _one_qubit(b, g, ctrls)
    elif isinstance(g, CNOT):
        if ctrls:
            _mcx(b, ctrls + (g.control,), g.target)
        else:
            b.cx(g.control, g.target)
    elif isinstance(g, Diagonal):
        if ctrls:
            _controlled_diagonal(b, ctrls, g.targets, g.phases)
        else:
            b.extend(synth_diagonal(g.phases, list(g.targets), b.n_qubits))
    elif isinstance(g, QFT):
        pc = synth_qft(len(g.targets), g.inverse_, g.targets, b.n_qubits)
        if ctrls:
            for prim in pc.gates():
                _lower_into(b, prim, ctrls, vals)
        else:
            b.extend(pc)
    elif isinstance(g, UnitaryMatrix):
        _unitary_matrix(b, g, ctrls)
    else:
        raise InvalidArgumentError(f"cannot lower gate {type(g).__name__}")


def lower(gates: Gate | Sequence[Gate], n_qubits: int | None = None) -> PrimitiveCircuit:
    """Lower a gate or gate sequence; ``global_phase`` is tracked, not emitted."""
    seq = [gates] if isinstance(gates, Gate) else list(gates)
    if n_qubits is None:
        n_qubits = 1 + max((q for g in seq for q in g.qubits), default=-1)
    b = Builder(n_qubits)
    for g in seq:
        _lower_into(b, g, (), ())
    return b.build()


def lower_controlled(gate: Gate, controls: Sequence[int], values: Sequence[int] | None = None, n_qubits: int | None = None) -> PrimitiveCircuit:
    controls = tuple(controls)
    values = tuple(values) if values is not None else (1,) * len(controls)
    return lower(Controlled(gate, controls, values), n_qubits)


__all__ = ["lower", "lower_controlled", "givens_decomposition", "zyz"]
