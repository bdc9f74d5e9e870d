"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``.

Same signatures, same in-place semantics. Index sets are cached per
``(size, target, mask, value)`` because circuits hit the same few patterns
over and over.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

NEG = -(1 << 40)


@lru_cache(maxsize=512)
def _pair_indices(n: int, target: int, cmask: int, cval: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(n, dtype=np.int64)
    tbit = 1 << target
    sel = ((idx & tbit) == 0) & ((idx & cmask) == cval)
    i0 = idx[sel]
    return i0, i0 | tbit


@lru_cache(maxsize=512)
def _diag_indices(n: int, qubits: tuple[int, ...], cmask: int, cval: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(n, dtype=np.int64)
    sel = idx[(idx & cmask) == cval]
    k = np.zeros_like(sel)
    for b, q in enumerate(qubits):
        k |= ((sel >> q) & 1) << b
    return sel, k


def apply_1q(psi: np.ndarray, u, target: int, cmask: int, cval: int) -> None:
    i0, i1 = _pair_indices(psi.shape[0], int(target), int(cmask), int(cval))
    a = psi[i0]
    b = psi[i1]
    psi[i0] = u[0, 0] * a + u[0, 1] * b
    psi[i1] = u[1, 0] * a + u[1, 1] * b


def apply_x(psi: np.ndarray, target: int, cmask: int, cval: int) -> None:
    i0, i1 = _pair_indices(psi.shape[0], int(target), int(cmask), int(cval))
    psi[i0], psi[i1] = psi[i1], psi[i0].copy()


def apply_diagonal(psi: np.ndarray, phases: np.ndarray, qubits: np.ndarray, cmask: int, cval: int) -> None:
    sel, k = _diag_indices(psi.shape[0], tuple(int(q) for q in qubits), int(cmask), int(cval))
    psi[sel] *= phases[k]


def maxplus_scan(T: np.ndarray, q0: np.ndarray, q1: np.ndarray) -> None:
    for a, b in zip(q0.tolist(), q1.tolist()):
        if b < 0:
            col = T[:, a]
            col[col > NEG] += 1
        else:
            m = np.maximum(T[:, a], T[:, b])
            live = m > NEG
            T[live, a] = m[live] + 1
            T[live, b] = m[live] + 1
