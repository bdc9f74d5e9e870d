"""Depth and gate counting on lowered circuits.

Depth is the longest chain of primitives along qubit dependencies with
every primitive counted as one step (ASAP scheduling). A block's timing is
summarized by a max-plus matrix ``M`` over its wires: ``M[i, j]`` is the
longest path from wire ``i`` at block entry to wire ``j`` at block exit
(``NEG`` when unreachable, ``0`` on an untouched diagonal). Blocks then
compose by max-plus products, so identical sub-blocks are lowered and
scanned once and reused. This is what makes the flat LCU at 17 qubits
countable: it has hundreds of controlled terms but only a few dozen
distinct ones.

The traversal mirrors :func:`qhdc.synth.lower._lower_into` step for step, so
counts are identical to scanning the fully materialized stream.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from ..sim import kernels
from ..sim.circuit import (
    CNOT,
    QFT,
    Block,
    Controlled,
    Diagonal,
    Gate,
    GlobalPhase,
    OneQubitGate,
    UnitaryMatrix,
)
from .lower import lower
from .primitive import PrimitiveCircuit
from .qft import synth_qft

NEG = kernels.NEG


@dataclass(frozen=True)
class ResourceReport:
    depth: int
    cnot_count: int
    total_gates: int
    n_system: int
    n_ancilla: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BlockStats:
    M: np.ndarray  # (L, L) int64 over the block's local wires
    gates: int
    cnots: int


def _scan(pc: PrimitiveCircuit, n_wires: int) -> np.ndarray:
    T = np.full((n_wires, n_wires), NEG, dtype=np.int64)
    np.fill_diagonal(T, 0)
    if len(pc):
        kernels.maxplus_scan(
            T,
            np.ascontiguousarray(pc.q0, dtype=np.int32),
            np.ascontiguousarray(np.where(pc.kinds == 5, pc.q1, -1), dtype=np.int32),
        )
    return T


def stream_stats(pc: PrimitiveCircuit) -> BlockStats:
    return BlockStats(_scan(pc, pc.n_qubits), len(pc), pc.cnot_count)


def depth_of(pc: PrimitiveCircuit) -> int:
    """Depth of a materialized stream from an idle register."""
    if not len(pc):
        return 0
    T = _scan(pc, pc.n_qubits)
    return int(T.max())


def report_of(pc: PrimitiveCircuit, n_system: int | None = None) -> ResourceReport:
    n_system = pc.n_qubits if n_system is None else n_system
    return ResourceReport(depth_of(pc), pc.cnot_count, len(pc), n_system, pc.n_qubits - n_system)


# --------------------------------------------------------------------------
# structural signatures (local-wire relative, so equal blocks share a key)


def _rb(a) -> bytes:
    return np.round(np.asarray(a, dtype=complex), 12).tobytes()


def _sig(g: Gate, idx: dict[int, int]):
    if isinstance(g, Block):
        return ("B", tuple(_sig(c, idx) for c in g.gates))
    if isinstance(g, Controlled):
        return ("C", tuple(idx[c] for c in g.controls), g.values, _sig(g.gate, idx))
    if isinstance(g, Diagonal):
        return ("D", tuple(idx[q] for q in g.targets), _rb(g.phases))
    if isinstance(g, UnitaryMatrix):
        return ("U", tuple(idx[q] for q in g.targets), _rb(g.matrix))
    if isinstance(g, QFT):
        return ("Q", tuple(idx[q] for q in g.targets), g.inverse_)
    if isinstance(g, CNOT):
        return ("X2", idx[g.control], idx[g.target])
    if isinstance(g, GlobalPhase):
        return ("G", round(g.angle, 12))
    if isinstance(g, OneQubitGate):
        return (type(g).__name__, idx[g.qubit], _rb(g.matrix()))
    raise TypeError(f"no signature for {type(g).__name__}")


def _wires(g: Gate) -> list[int]:
    seen: dict[int, None] = {}
    for q in g.qubits:
        seen[q] = None
    return list(seen)


class ResourceCounter:
    """Counts resources of gate sequences, caching per-structure statistics."""

    def __init__(self) -> None:
        self._cache: dict = {}
        self.hits = 0
        self.misses = 0

    # A "frame" is a row vector t over global wires: longest path ending there.
    def count(self, gates: Iterable[Gate], n_qubits: int, n_system: int | None = None) -> ResourceReport:
        t = np.zeros(n_qubits, dtype=np.int64)
        totals = [0, 0]
        for g in gates:
            self._walk(g, (), (), t, totals)
        n_system = n_qubits if n_system is None else n_system
        return ResourceReport(int(t.max()) if totals[0] else 0, totals[1], totals[0], n_system, n_qubits - n_system)

    def _apply(self, t: np.ndarray, wires: Sequence[int], st: BlockStats, totals: list[int]) -> None:
        w = np.asarray(wires, dtype=np.int64)
        t[w] = np.max(t[w][:, None] + st.M, axis=0)
        totals[0] += st.gates
        totals[1] += st.cnots

    def _walk(self, g: Gate, ctrls: tuple[int, ...], vals: tuple[int, ...], t: np.ndarray, totals: list[int]) -> None:
        zeros = [c for c, v in zip(ctrls, vals) if v == 0]
        if zeros:
            for c in zeros:
                t[c] += 1
            totals[0] += len(zeros)
            self._walk(g, ctrls, (1,) * len(ctrls), t, totals)
            for c in zeros:
                t[c] += 1
            totals[0] += len(zeros)
            return
        if isinstance(g, Controlled):
            self._walk(g.gate, ctrls + g.controls, vals + g.values, t, totals)
            return
        if isinstance(g, GlobalPhase) and not ctrls:
            return
        wires = list(ctrls) + [q for q in _wires(g) if q not in ctrls]
        st = self.stats(g, ctrls, wires)
        self._apply(t, wires, st, totals)

    def stats(self, g: Gate, ctrls: tuple[int, ...], wires: list[int]) -> BlockStats:
        """Statistics of ``g`` controlled (value 1) by ``ctrls`` over ``wires``."""
        idx = {q: i for i, q in enumerate(wires)}
        key = (len(wires), tuple(idx[c] for c in ctrls), _sig(g, idx))
        hit = self._cache.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        L = len(wires)
        local_ctrls = tuple(range(len(ctrls)))
        if isinstance(g, Block) or (isinstance(g, QFT) and ctrls):
            children = g.gates if isinstance(g, Block) else synth_qft(len(g.targets), g.inverse_, g.targets, max(wires) + 1).gates()
            t = np.full((L, L), NEG, dtype=np.int64)
            np.fill_diagonal(t, 0)
            totals = [0, 0]
            ones = (1,) * len(ctrls)
            for child in children:
                self._walk_matrix(child, ctrls, ones, t, idx, totals)
            st = BlockStats(t, totals[0], totals[1])
        else:
            local = _relocate(g, idx)
            pc = lower(Controlled(local, local_ctrls) if ctrls else local, L)
            st = stream_stats(pc)
        self._cache[key] = st
        return st

    def _walk_matrix(self, g: Gate, ctrls: tuple[int, ...], vals: tuple[int, ...], T: np.ndarray, idx: dict[int, int], totals: list[int]) -> None:
        """Like ``_walk`` but composing into a full max-plus matrix ``T``."""
        zeros = [c for c, v in zip(ctrls, vals) if v == 0]
        if zeros:
            for c in zeros:
                col = T[:, idx[c]]
                col[col > NEG] += 1
            totals[0] += len(zeros)
            self._walk_matrix(g, ctrls, (1,) * len(ctrls), T, idx, totals)
            for c in zeros:
                col = T[:, idx[c]]
                col[col > NEG] += 1
            totals[0] += len(zeros)
            return
        if isinstance(g, Controlled):
            self._walk_matrix(g.gate, ctrls + g.controls, vals + g.values, T, idx, totals)
            return
        if isinstance(g, GlobalPhase) and not ctrls:
            return
        wires = list(ctrls) + [q for q in _wires(g) if q not in ctrls]
        st = self.stats(g, ctrls, wires)
        pos = np.asarray([idx[q] for q in wires], dtype=np.int64)
        sub = T[:, pos]  # (L, w)
        new = np.max(sub[:, :, None] + st.M[None, :, :], axis=1)
        T[:, pos] = np.where(new < NEG // 2, NEG, new)
        totals[0] += st.gates
        totals[1] += st.cnots


def _relocate(g: Gate, idx: dict[int, int]) -> Gate:
    """Rewrite a leaf gate onto local wire numbers."""
    if isinstance(g, CNOT):
        return CNOT(idx[g.control], idx[g.target])
    if isinstance(g, (Diagonal, UnitaryMatrix, QFT)):
        return replace(g, targets=tuple(idx[q] for q in g.targets))
    if isinstance(g, OneQubitGate):
        return replace(g, qubit=idx[g.qubit])
    if isinstance(g, GlobalPhase):
        return g
    raise TypeError(f"cannot relocate {type(g).__name__}")


def resources(gates: Gate | Iterable[Gate], n_qubits: int, n_system: int | None = None, counter: ResourceCounter | None = None) -> ResourceReport:
    """Resource report of the lowered circuit (counted compositionally)."""
    seq = [gates] if isinstance(gates, Gate) else list(gates)
    return (counter or ResourceCounter()).count(seq, n_qubits, n_system)
