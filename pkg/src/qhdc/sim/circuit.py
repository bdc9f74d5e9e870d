"""Gate and circuit intermediate representation.

Qubit 0 is the least significant bit of a basis index. Multi-qubit gates
(``Diagonal``, ``QFT``, ``UnitaryMatrix``) index their local basis the same
way: the first listed qubit is the least significant bit.

Gates are immutable. A ``Circuit`` applies its gates in list order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from ..errors import InvalidArgumentError

_UNIT_TOL = 1e-12
_UNITARY_TOL = 1e-10

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _qubits(qs: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(q) for q in qs)
    if len(set(out)) != len(out):
        raise InvalidArgumentError(f"repeated qubit index in {out}")
    if any(q < 0 for q in out):
        raise InvalidArgumentError(f"negative qubit index in {out}")
    return out


class Gate:
    """Common interface. Subclasses are frozen dataclasses."""

    @property
    def qubits(self) -> tuple[int, ...]:
        raise NotImplementedError

    def inverse(self) -> "Gate":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class OneQubitGate(Gate):
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    def matrix(self) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class H(OneQubitGate):
    qubit: int

    def matrix(self) -> np.ndarray:
        return _H

    def inverse(self) -> "H":
        return self

    def to_dict(self) -> dict:
        return {"kind": "H", "qubit": self.qubit}


@dataclass(frozen=True)
class PhaseShift(OneQubitGate):
    """``diag(1, e^{i angle})``."""

    qubit: int
    angle: float

    def matrix(self) -> np.ndarray:
        return np.array([[1, 0], [0, np.exp(1j * self.angle)]], dtype=complex)

    def inverse(self) -> "PhaseShift":
        return PhaseShift(self.qubit, -self.angle)

    def to_dict(self) -> dict:
        return {"kind": "PhaseShift", "qubit": self.qubit, "angle": self.angle}


@dataclass(frozen=True)
class Rz(OneQubitGate):
    """``diag(e^{-i angle/2}, e^{i angle/2})``."""

    qubit: int
    angle: float

    def matrix(self) -> np.ndarray:
        h = self.angle / 2
        return np.array([[np.exp(-1j * h), 0], [0, np.exp(1j * h)]], dtype=complex)

    def inverse(self) -> "Rz":
        return Rz(self.qubit, -self.angle)

    def to_dict(self) -> dict:
        return {"kind": "Rz", "qubit": self.qubit, "angle": self.angle}


@dataclass(frozen=True)
class Ry(OneQubitGate):
    qubit: int
    angle: float

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.angle / 2), np.sin(self.angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)

    def inverse(self) -> "Ry":
        return Ry(self.qubit, -self.angle)

    def to_dict(self) -> dict:
        return {"kind": "Ry", "qubit": self.qubit, "angle": self.angle}


@dataclass(frozen=True)
class Rx(OneQubitGate):
    qubit: int
    angle: float

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.angle / 2), np.sin(self.angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)

    def inverse(self) -> "Rx":
        return Rx(self.qubit, -self.angle)

    def to_dict(self) -> dict:
        return {"kind": "Rx", "qubit": self.qubit, "angle": self.angle}


@dataclass(frozen=True)
class X(OneQubitGate):
    qubit: int

    def matrix(self) -> np.ndarray:
        return _X

    def inverse(self) -> "X":
        return self

    def to_dict(self) -> dict:
        return {"kind": "X", "qubit": self.qubit}


@dataclass(frozen=True, eq=False)
class Unitary1Q(OneQubitGate):
    """Arbitrary single-qubit unitary; appears inside controlled lowerings."""

    qubit: int
    u: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.u

    def inverse(self) -> "Unitary1Q":
        return Unitary1Q(self.qubit, self.u.conj().T)

    def to_dict(self) -> dict:
        return {"kind": "Unitary1Q", "qubit": self.qubit, "matrix": _cplx_list(self.u)}


@dataclass(frozen=True)
class CNOT(Gate):
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise InvalidArgumentError("CNOT control and target must differ")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)

    def inverse(self) -> "CNOT":
        return self

    def to_dict(self) -> dict:
        return {"kind": "CNOT", "control": self.control, "target": self.target}


@dataclass(frozen=True, eq=False)
class Diagonal(Gate):
    """Diagonal unitary: basis state ``|k>`` of ``targets`` picks up ``phases[k]``."""

    targets: tuple[int, ...]
    phases: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "targets", _qubits(self.targets))
        ph = np.asarray(self.phases, dtype=complex).reshape(-1)
        if ph.shape[0] != 1 << len(self.targets):
            raise InvalidArgumentError(
                f"diagonal on {len(self.targets)} qubits needs {1 << len(self.targets)} phases, got {ph.shape[0]}"
            )
        if np.max(np.abs(np.abs(ph) - 1.0)) > _UNIT_TOL:
            raise InvalidArgumentError("diagonal phases must have unit modulus")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets

    def inverse(self) -> "Diagonal":
        return Diagonal(self.targets, self.phases.conj())

    def to_dict(self) -> dict:
        return {"kind": "Diagonal", "qubits": list(self.targets), "phases": _cplx_list(self.phases)}


@dataclass(frozen=True)
class QFT(Gate):
    """``|j> -> D^{-1/2} sum_k exp(+2 pi i j k / D) |k>``; ``inverse`` flips the sign."""

    targets: tuple[int, ...]
    inverse_: bool = False

    def __post_init__(self):
        object.__setattr__(self, "targets", _qubits(self.targets))
        if not self.targets:
            raise InvalidArgumentError("QFT needs at least one qubit")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets

    def inverse(self) -> "QFT":
        return QFT(self.targets, not self.inverse_)

    def to_dict(self) -> dict:
        return {"kind": "InverseQFT" if self.inverse_ else "QFT", "qubits": list(self.targets)}


def InverseQFT(targets: Sequence[int]) -> QFT:
    return QFT(tuple(targets), True)


@dataclass(frozen=True, eq=False)
class UnitaryMatrix(Gate):
    targets: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "targets", _qubits(self.targets))
        m = np.asarray(self.matrix, dtype=complex)
        d = 1 << len(self.targets)
        if m.shape != (d, d):
            raise InvalidArgumentError(f"matrix shape {m.shape} does not match {len(self.targets)} qubits")
        if np.max(np.abs(m.conj().T @ m - np.eye(d))) > _UNITARY_TOL:
            raise InvalidArgumentError("matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets

    def inverse(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.targets, self.matrix.conj().T)

    def to_dict(self) -> dict:
        return {"kind": "UnitaryMatrix", "qubits": list(self.targets), "matrix": _cplx_list(self.matrix)}


@dataclass(frozen=True)
class GlobalPhase(Gate):
    """Scalar ``e^{i angle}``; becomes a relative phase once controlled."""

    angle: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return ()

    def inverse(self) -> "GlobalPhase":
        return GlobalPhase(-self.angle)

    def to_dict(self) -> dict:
        return {"kind": "GlobalPhase", "angle": self.angle}


@dataclass(frozen=True)
class Block(Gate):
    """A named gate sequence treated as one gate (e.g. a state preparation)."""

    gates: tuple[Gate, ...]
    label: str = ""

    @property
    def qubits(self) -> tuple[int, ...]:
        seen: dict[int, None] = {}
        for g in self.gates:
            for q in g.qubits:
                seen[q] = None
        return tuple(seen)

    def inverse(self) -> "Block":
        return Block(tuple(g.inverse() for g in reversed(self.gates)), self.label + "^dg" if self.label else "")

    def to_dict(self) -> dict:
        return {"kind": "Block", "label": self.label, "gates": [g.to_dict() for g in self.gates]}


@dataclass(frozen=True)
class Controlled(Gate):
    """Apply ``gate`` (global phase included) where ``controls`` read ``values``."""

    gate: Gate
    controls: tuple[int, ...]
    values: tuple[int, ...] = ()

    def __post_init__(self):
        controls = _qubits(self.controls)
        values = tuple(int(v) for v in self.values) if self.values else (1,) * len(controls)
        if len(values) != len(controls):
            raise InvalidArgumentError("one control value per control qubit")
        if any(v not in (0, 1) for v in values):
            raise InvalidArgumentError("control values must be 0 or 1")
        if set(controls) & set(self.gate.qubits):
            raise InvalidArgumentError("control qubits overlap the controlled gate")
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "values", values)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + tuple(self.gate.qubits)

    def inverse(self) -> "Controlled":
        return Controlled(self.gate.inverse(), self.controls, self.values)

    def to_dict(self) -> dict:
        return {
            "kind": "Controlled",
            "controls": list(self.controls),
            "values": list(self.values),
            "gate": self.gate.to_dict(),
        }


def controlled_on_state(gate: Gate, controls: Sequence[int], state: int) -> Controlled:
    """Control on the integer ``state`` read from ``controls`` (first = LSB)."""
    values = tuple((state >> b) & 1 for b in range(len(controls)))
    return Controlled(gate, tuple(controls), values)


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    labels: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def append(self, gate: Gate) -> "Circuit":
        bad = [q for q in gate.qubits if q >= self.n_qubits]
        if bad:
            raise InvalidArgumentError(f"qubit(s) {bad} outside a {self.n_qubits}-qubit register")
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, [g.inverse() for g in reversed(self.gates)], dict(self.labels))

    def as_block(self, label: str = "") -> Block:
        return Block(tuple(self.gates), label)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "labels": {k: list(v) for k, v in self.labels.items()},
            "gates": [g.to_dict() for g in self.gates],
        }

    def dumps(self, **kw) -> str:
        """JSON debug dump of the gate list."""
        return json.dumps(self.to_dict(), **kw)


def _cplx_list(a: np.ndarray) -> list:
    a = np.asarray(a)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [_cplx_list(row) for row in a]


def iter_flat(gates: Iterable[Gate]) -> Iterator[Gate]:
    """Expand nested ``Block`` gates into a flat stream."""
    for g in gates:
        if isinstance(g, Block):
            yield from iter_flat(g.gates)
        else:
            yield g
