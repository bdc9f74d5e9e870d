"""Flat primitive-gate streams.

A synthesized circuit can run to hundreds of thousands of gates, so it is
stored column-wise in numpy arrays rather than as gate objects. Convert
with :meth:`PrimitiveCircuit.gates` when a simulation is needed.

``global_phase`` follows one convention everywhere: the emitted gates
realize ``exp(i * global_phase) * U`` where ``U`` is the source operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..sim.circuit import CNOT, Gate, H, PhaseShift, Rx, Ry, Rz

HAD, PS, RZ, RY, RX, CX = range(6)
KIND_NAMES = ("H", "PhaseShift", "Rz", "Ry", "Rx", "CNOT")
_GATE_OF = {HAD: H, PS: PhaseShift, RZ: Rz, RY: Ry, RX: Rx}


@dataclass
class PrimitiveCircuit:
    n_qubits: int
    kinds: np.ndarray
    q0: np.ndarray
    q1: np.ndarray
    angles: np.ndarray
    global_phase: float = 0.0

    @classmethod
    def empty(cls, n_qubits: int) -> "PrimitiveCircuit":
        return cls(n_qubits, *_empty_arrays())

    def __len__(self) -> int:
        return int(self.kinds.shape[0])

    @property
    def cnot_count(self) -> int:
        return int(np.count_nonzero(self.kinds == CX))

    @property
    def total_gates(self) -> int:
        return len(self)

    def gates(self) -> list[Gate]:
        out: list[Gate] = []
        for k, a, b, ang in zip(self.kinds.tolist(), self.q0.tolist(), self.q1.tolist(), self.angles.tolist()):
            if k == CX:
                out.append(CNOT(a, b))
            elif k == HAD:
                out.append(H(a))
            else:
                out.append(_GATE_OF[k](a, ang))
        return out

    def unitary(self) -> np.ndarray:
        from ..sim.statevector import unitary_of

        return unitary_of(self.gates(), self.n_qubits)

    def inverse(self) -> "PrimitiveCircuit":
        k = self.kinds[::-1].copy()
        ang = self.angles[::-1].copy()
        param = (k != HAD) & (k != CX)
        ang[param] = -ang[param]
        return PrimitiveCircuit(self.n_qubits, k, self.q0[::-1].copy(), self.q1[::-1].copy(), ang, -self.global_phase)

    def remap(self, mapping, n_qubits: int) -> "PrimitiveCircuit":
        """Relabel local wire ``i`` as ``mapping[i]``."""
        m = np.asarray(mapping, dtype=np.int32)
        q1 = np.where(self.q1 >= 0, m[np.maximum(self.q1, 0)], -1).astype(np.int32)
        return PrimitiveCircuit(n_qubits, self.kinds, m[self.q0], q1, self.angles, self.global_phase)

    def counts(self) -> dict[str, int]:
        return {name: int(np.count_nonzero(self.kinds == i)) for i, name in enumerate(KIND_NAMES)}

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "global_phase": self.global_phase,
            "gates": [g.to_dict() for g in self.gates()],
        }


def _empty_arrays():
    return (
        np.zeros(0, dtype=np.int8),
        np.zeros(0, dtype=np.int32),
        np.zeros(0, dtype=np.int32),
        np.zeros(0, dtype=np.float64),
    )


@dataclass
class Builder:
    """Accumulates primitives one at a time or as whole array chunks."""

    n_qubits: int
    global_phase: float = 0.0
    _chunks: list = field(default_factory=list)
    _k: list = field(default_factory=list)
    _a: list = field(default_factory=list)
    _b: list = field(default_factory=list)
    _t: list = field(default_factory=list)

    def add(self, kind: int, q0: int, q1: int = -1, angle: float = 0.0) -> None:
        self._k.append(kind)
        self._a.append(q0)
        self._b.append(q1)
        self._t.append(angle)

    def cx(self, c: int, t: int) -> None:
        self.add(CX, c, t)

    def _flush(self) -> None:
        if self._k:
            self._chunks.append(
                (
                    np.asarray(self._k, dtype=np.int8),
                    np.asarray(self._a, dtype=np.int32),
                    np.asarray(self._b, dtype=np.int32),
                    np.asarray(self._t, dtype=np.float64),
                )
            )
            self._k, self._a, self._b, self._t = [], [], [], []

    def extend(self, pc: PrimitiveCircuit) -> None:
        self._flush()
        if len(pc):
            self._chunks.append((pc.kinds, pc.q0, pc.q1, pc.angles))
        self.global_phase += pc.global_phase

    def extend_arrays(self, kinds, q0, q1, angles) -> None:
        self._flush()
        if len(kinds):
            self._chunks.append((kinds, q0, q1, angles))

    def build(self) -> PrimitiveCircuit:
        self._flush()
        if not self._chunks:
            return PrimitiveCircuit(self.n_qubits, *_empty_arrays(), global_phase=self.global_phase)
        cols = [np.concatenate([c[i] for c in self._chunks]) for i in range(4)]
        return PrimitiveCircuit(self.n_qubits, *cols, global_phase=self.global_phase)
