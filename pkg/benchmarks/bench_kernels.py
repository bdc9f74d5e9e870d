"""Compiled vs numpy kernels, plus one end-to-end simulation.

    python benchmarks/bench_kernels.py [--qubits 12 16 20] [--repeat 5]

Reports the best-of-``repeat`` wall time per call and the speedup. The
numpy fallback caches index sets, so its timings are warm-cache numbers.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from qhdc import ops
from qhdc.sim import kernels


def _state(n: int, g: np.random.Generator) -> np.ndarray:
    psi = g.normal(size=1 << n) + 1j * g.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def cases(n: int, g: np.random.Generator) -> dict:
    psi = _state(n, g)
    u = np.linalg.qr(g.normal(size=(2, 2)) + 1j * g.normal(size=(2, 2)))[0]
    qs = np.arange(min(n, 8), dtype=np.int64)
    ph = np.exp(1j * g.uniform(0, 2 * np.pi, size=1 << len(qs)))
    wires = 12
    T = np.zeros((wires, wires), dtype=np.int64)
    q0 = g.integers(0, wires, size=1 << n).astype(np.int32)
    q1 = np.where(g.random(1 << n) < 0.5, (q0 + 1) % wires, -1).astype(np.int32)
    return {
        "apply_1q (controlled)": lambda: kernels.apply_1q(psi, u, n // 2, 1, 1),
        "apply_x": lambda: kernels.apply_x(psi, n - 1, 0, 0),
        f"apply_diagonal ({len(qs)} qubits)": lambda: kernels.apply_diagonal(psi, ph, qs, 0, 0),
        f"maxplus_scan ({1 << n} ops)": lambda: kernels.maxplus_scan(T, q0, q1),
    }


def end_to_end(n: int) -> float:
    g = np.random.default_rng(1)
    a = ops.encode(np.where(g.random(1 << n) < 0.5, -1, 1))
    b = ops.encode(np.where(g.random(1 << n) < 0.5, -1, 1))
    return min(timeit.repeat(lambda: ops.hadamard_test(a, b), number=3, repeat=3)) / 3


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[12, 16, 20])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.available()
    if "cython" not in backends:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'kernel':<28} {'n':>3} " + " ".join(f"{b:>12}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for n in args.qubits:
        names = list(cases(n, np.random.default_rng(0)))
        times = {b: {} for b in backends}
        for b in backends:
            kernels.use(b)
            fns = cases(n, np.random.default_rng(0))
            for name, fn in fns.items():
                fn()  # warm caches
                number = 3
                times[b][name] = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
        for name in names:
            row = " ".join(f"{times[b][name] * 1e3:>10.3f}ms" for b in backends)
            sp = f"   {times['python'][name] / times['cython'][name]:6.1f}x" if len(backends) > 1 else ""
            print(f"{name:<28} {n:>3} {row}{sp}")
    print()
    for b in backends:
        kernels.use(b)
        print(f"hadamard_test end to end, D=1024, {b:>6}: {end_to_end(10) * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
