"""Textbook QFT in the primitive basis.

Qubit ``n-1`` is the most significant bit, so the Hadamard/controlled-phase
ladder runs from the top qubit down and the closing swaps reverse the order.
Each controlled phase costs two CNOTs and three phase shifts; each swap is
three CNOTs.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..errors import InvalidArgumentError
from .primitive import HAD, PS, Builder, PrimitiveCircuit


def controlled_phase(b: Builder, control: int, target: int, lam: float) -> None:
    b.add(PS, control, -1, lam / 2)
    b.cx(control, target)
    b.add(PS, target, -1, -lam / 2)
    b.cx(control, target)
    b.add(PS, target, -1, lam / 2)


def swap(b: Builder, a: int, c: int) -> None:
    b.cx(a, c)
    b.cx(c, a)
    b.cx(a, c)


@lru_cache(maxsize=32)
def _qft_local(n: int) -> PrimitiveCircuit:
    b = Builder(n)
    for i in range(n - 1, -1, -1):
        b.add(HAD, i)
        for j in range(i - 1, -1, -1):
            controlled_phase(b, j, i, math.pi / (1 << (i - j)))
    for q in range(n // 2):
        swap(b, q, n - 1 - q)
    return b.build()


def synth_qft(n: int, inverse: bool = False, qubits: Sequence[int] | None = None, n_qubits: int | None = None) -> PrimitiveCircuit:
    """QFT (``|j> -> D^-1/2 sum_k e^{2 pi i jk/D} |k>``) on ``qubits``; exact, no phase."""
    if n < 1:
        raise InvalidArgumentError("QFT needs n >= 1")
    pc = _qft_local(int(n))
    if inverse:
        pc = pc.inverse()
    qubits = list(range(n)) if qubits is None else list(qubits)
    if len(qubits) != n:
        raise InvalidArgumentError("qubit list length must equal n")
    total = n_qubits if n_qubits is not None else max(qubits) + 1
    if qubits == list(range(n)) and total == n:
        return PrimitiveCircuit(n, pc.kinds, pc.q0, pc.q1, pc.angles, pc.global_phase)
    return pc.remap(np.asarray(qubits), total)


__all__ = ["synth_qft", "controlled_phase", "swap"]
