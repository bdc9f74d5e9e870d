# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the statevector engine and the depth scheduler.

Every function mirrors one in ``_pykernels`` exactly; the two are selected at
import time by ``qhdc.sim.kernels``.
"""

import numpy as np
cimport numpy as cnp

from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


cdef int64_t NEG = -((<int64_t>1) << 40)


def apply_1q(double complex[::1] psi, object u, int target, uint64_t cmask, uint64_t cval):
    """In place: 2x2 matrix ``u`` on ``target`` where ``idx & cmask == cval``."""
    cdef double complex u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    cdef uint64_t n = psi.shape[0]
    cdef uint64_t tbit = (<uint64_t>1) << target
    cdef uint64_t i, j
    cdef double complex a, b
    with nogil:
        for i in range(n):
            if i & tbit:
                continue
            if (i & cmask) != cval:
                continue
            j = i | tbit
            a = psi[i]
            b = psi[j]
            psi[i] = u00 * a + u01 * b
            psi[j] = u10 * a + u11 * b


def apply_x(double complex[::1] psi, int target, uint64_t cmask, uint64_t cval):
    cdef uint64_t n = psi.shape[0]
    cdef uint64_t tbit = (<uint64_t>1) << target
    cdef uint64_t i, j
    cdef double complex a
    with nogil:
        for i in range(n):
            if i & tbit:
                continue
            if (i & cmask) != cval:
                continue
            j = i | tbit
            a = psi[i]
            psi[i] = psi[j]
            psi[j] = a


def apply_diagonal(double complex[::1] psi, const double complex[::1] phases,
                   const int64_t[::1] qubits, uint64_t cmask, uint64_t cval):
    """In place: multiply by ``phases[k]`` where ``k`` gathers the bits of ``qubits``."""
    cdef uint64_t n = psi.shape[0]
    cdef Py_ssize_t nq = qubits.shape[0]
    cdef uint64_t i, k
    cdef Py_ssize_t b
    with nogil:
        for i in range(n):
            if (i & cmask) != cval:
                continue
            k = 0
            for b in range(nq):
                k |= ((i >> qubits[b]) & 1) << b
            psi[i] = psi[i] * phases[k]


def maxplus_scan(int64_t[:, ::1] T, const int[::1] q0, const int[::1] q1):
    """ASAP longest-path update of ``T`` (rows: start wires, cols: wires).

    Gate ``g`` acts on wire ``q0[g]`` and, when ``q1[g] >= 0``, also on
    ``q1[g]``. Entries at or below ``NEG`` are unreachable and stay so.
    """
    cdef Py_ssize_t rows = T.shape[0]
    cdef Py_ssize_t ng = q0.shape[0]
    cdef Py_ssize_t g, r
    cdef int a, b
    cdef int64_t m
    with nogil:
        for g in range(ng):
            a = q0[g]
            b = q1[g]
            if b < 0:
                for r in range(rows):
                    if T[r, a] > NEG:
                        T[r, a] += 1
            else:
                for r in range(rows):
                    m = T[r, a]
                    if T[r, b] > m:
                        m = T[r, b]
                    if m > NEG:
                        T[r, a] = m + 1
                        T[r, b] = m + 1

