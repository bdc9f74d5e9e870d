"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``QHDC_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND: str

if os.environ.get("QHDC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"


def use(name: str) -> None:
    """Switch backend at runtime (``"cython"`` or ``"python"``)."""
    global _impl, BACKEND
    if name == "python":
        _impl = _pykernels
    elif name == "cython":
        from . import _ckernels

        _impl = _ckernels
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    BACKEND = name


def available() -> list[str]:
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return names


NEG = _pykernels.NEG


def apply_1q(psi, u, target, cmask, cval):
    _impl.apply_1q(psi, u, target, cmask, cval)


def apply_x(psi, target, cmask, cval):
    _impl.apply_x(psi, target, cmask, cval)


def apply_diagonal(psi, phases, qubits, cmask, cval):
    _impl.apply_diagonal(psi, phases, qubits, cmask, cval)


def maxplus_scan(T, q0, q1):
    _impl.maxplus_scan(T, q0, q1)
