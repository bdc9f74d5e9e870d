"""Walsh-spectrum synthesis of diagonal unitaries and Ry multiplexors.

Write the phases of a diagonal as ``exp(i theta_x)`` and expand
``theta_x = sum_j a_j (-1)^{popcount(j & x)}``. Each term with ``j != 0`` is
a ``Z``-parity rotation, realized as an ``Rz`` on the highest bit of ``j``
after CNOTs fold the other bits of ``j`` into it. Visiting the lower bits in
Gray-code order means consecutive parities differ by one CNOT, which gives
``2**n - 2`` CNOTs in total. ``a_0`` is a global phase.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..errors import InvalidArgumentError
from .primitive import CX, RY, RZ, Builder, PrimitiveCircuit

COEF_TOL = 1e-12


def walsh_transform(theta: np.ndarray) -> np.ndarray:
    """``a_j = 2**-n * sum_x theta_x (-1)^{popcount(j & x)}`` by fast butterflies."""
    a = np.array(theta, dtype=float)
    d = a.shape[0]
    h = 1
    while h < d:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1).reshape(-1)
        h *= 2
    return a / d


def phase_angles(phases: np.ndarray) -> np.ndarray:
    ph = np.asarray(phases, dtype=complex).reshape(-1)
    if np.max(np.abs(np.abs(ph) - 1.0)) > 1e-12:
        raise InvalidArgumentError("diagonal phases must have unit modulus")
    theta = np.angle(ph)
    # -1 may come out as +pi or -pi depending on a signed zero; pin it to +pi.
    theta[np.abs(theta + math.pi) < 1e-12] = math.pi
    return theta


@lru_cache(maxsize=64)
def _gray_tables(t: int) -> tuple[np.ndarray, np.ndarray]:
    i = np.arange(1 << t, dtype=np.int64)
    gray = i ^ (i >> 1)
    # bit toggled between step i-1 and step i (entry 0 unused)
    toggle = np.zeros(1 << t, dtype=np.int64)
    if t:
        ii = i[1:]
        toggle[1:] = np.log2(ii & -ii).astype(np.int64)
    return gray, toggle


def parity_rotation_stream(coeffs: np.ndarray, qubits: Sequence[int], n_qubits: int) -> PrimitiveCircuit:
    """Emit ``prod_{j != 0} exp(i a_j Z_j)`` for Walsh coefficients ``coeffs``."""
    qubits = np.asarray(qubits, dtype=np.int32)
    n = qubits.shape[0]
    b = Builder(n_qubits)
    for t in range(n):
        gray, toggle = _gray_tables(t)
        c = coeffs[(1 << t) | gray]
        nz = np.abs(c) > COEF_TOL
        if not nz.any():
            continue
        tq = qubits[t]
        steps = 1 << t
        # slot 2i: CNOT before rotation i (none for i = 0); slot 2i+1: Rz
        kinds = np.empty(2 * steps, dtype=np.int8)
        q0 = np.empty(2 * steps, dtype=np.int32)
        q1 = np.empty(2 * steps, dtype=np.int32)
        ang = np.zeros(2 * steps, dtype=np.float64)
        kinds[0::2] = CX
        q0[0::2] = qubits[toggle]
        q1[0::2] = tq
        kinds[1::2] = RZ
        q0[1::2] = tq
        q1[1::2] = -1
        ang[1::2] = -2.0 * c
        keep = np.ones(2 * steps, dtype=bool)
        keep[0] = False
        keep[1::2] = nz
        b.extend_arrays(kinds[keep], q0[keep], q1[keep], ang[keep])
        if t:
            b.cx(int(qubits[t - 1]), int(tq))
    return b.build()


def synth_diagonal(phases, qubits: Sequence[int] | None = None, n_qubits: int | None = None) -> PrimitiveCircuit:
    """Primitive circuit for ``Diagonal(qubits, phases)``.

    Uses at most ``2**n - 2`` CNOTs; ``global_phase`` is ``-a_0``.
    """
    theta = phase_angles(phases)
    n = int(theta.shape[0]).bit_length() - 1
    if 1 << n != theta.shape[0]:
        raise InvalidArgumentError("phase count must be a power of two")
    qubits = list(range(n)) if qubits is None else list(qubits)
    if len(qubits) != n:
        raise InvalidArgumentError(f"{len(qubits)} qubits given for {n}-qubit phases")
    if n_qubits is None:
        n_qubits = max(qubits) + 1 if qubits else 0
    a = walsh_transform(theta)
    pc = parity_rotation_stream(a, qubits, n_qubits)
    pc.global_phase = -float(a[0]) if n else float(theta[0])
    return pc


def multiplexed_ry(angles, controls: Sequence[int], target: int, n_qubits: int) -> PrimitiveCircuit:
    """Uniformly controlled ``Ry``: angle ``angles[x]`` when ``controls`` read ``x``.

    ``controls[0]`` is the least significant bit of ``x``. Exact (no phase).
    """
    th = np.asarray(angles, dtype=float)
    k = len(controls)
    if th.shape[0] != 1 << k:
        raise InvalidArgumentError("need one angle per control value")
    b = Builder(n_qubits)
    if k == 0:
        if abs(th[0]) > COEF_TOL:
            b.add(RY, target, -1, float(th[0]))
        return b.build()
    beta = walsh_transform(th)
    gray, toggle = _gray_tables(k)
    steps = 1 << k
    for i in range(steps):
        c = beta[gray[i]]
        if abs(c) > COEF_TOL:
            b.add(RY, target, -1, float(c))
        nxt = toggle[i + 1] if i + 1 < steps else k - 1
        b.cx(int(controls[nxt]), target)
    return b.build()


def real_state_prep(amplitudes, qubits: Sequence[int] | None = None, n_qubits: int | None = None) -> PrimitiveCircuit:
    """Ry tree mapping ``|0...0>`` to a real amplitude vector.

    Only the first column is specified; the rest of the unitary is whatever
    the multiplexors produce.
    """
    amps = np.asarray(amplitudes, dtype=float)
    m = int(amps.shape[0]).bit_length() - 1
    if 1 << m != amps.shape[0]:
        raise InvalidArgumentError("amplitude count must be a power of two")
    if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
        raise InvalidArgumentError("amplitudes must be normalized")
    qubits = list(range(m)) if qubits is None else list(qubits)
    if n_qubits is None:
        n_qubits = max(qubits) + 1 if qubits else 0
    b = Builder(n_qubits)
    for t in range(m - 1, -1, -1):
        blocks = amps.reshape(-1, 2, 1 << t)  # [high bits above t, bit t, low bits]
        if t == 0:
            a0, a1 = blocks[:, 0, 0], blocks[:, 1, 0]
        else:
            a0 = np.linalg.norm(blocks[:, 0, :], axis=1)
            a1 = np.linalg.norm(blocks[:, 1, :], axis=1)
        theta = 2.0 * np.arctan2(a1, a0)
        b.extend(multiplexed_ry(theta, qubits[t + 1 :], qubits[t], n_qubits))
    return b.build()
