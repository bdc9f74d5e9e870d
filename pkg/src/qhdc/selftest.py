"""Fast invariant suite behind ``qhdc selftest``.

Each check returns ``(passed, detail)``. ``s0_sign`` is a fault-injection
hook: anything other than ``-1`` corrupts the all-zero reflection, which the
Grover-law check must catch.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import hdc, ops
from . import rng as _rng
from .sim import kernels
from .sim import statevector as sv
from .sim.circuit import QFT, Block, Controlled, Diagonal, UnitaryMatrix

GROVER_ALPHAS = (0.05, 0.11, 0.3, 0.5)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return asdict(self)


def grover_probe(alpha: float, n: int = 4, seed: int = 0) -> ops.LcuBundlePlan:
    """Two-term LCU with success amplitude exactly ``alpha``.

    Terms ``v`` and ``-v`` with weights ``(1 + alpha)/2`` and ``(1 - alpha)/2``
    sum to ``alpha * v``.
    """
    v = hdc.random_hypervector(1 << n, _rng.derive(seed, _rng.SAMPLE))
    return ops.lcu_prepare([v, -v], [(1 + alpha) / 2, (1 - alpha) / 2])


def grover_law_error(alphas=GROVER_ALPHAS, max_rounds: int = 10, n: int = 4, s0_sign: float = -1.0) -> float:
    worst = 0.0
    for a in alphas:
        plan = grover_probe(a, n)
        for r in range(max_rounds + 1):
            _, p = ops.oaa_amplify(plan, r, s0_sign=s0_sign)
            worst = max(worst, abs(p - ops.predicted_success(a, r)))
    return worst


def tracked_phase_error(pc, reference: np.ndarray) -> float:
    """Max entry error of a lowered stream against ``exp(i gamma) * reference``."""
    return float(np.max(np.abs(pc.unitary() - np.exp(1j * pc.global_phase) * reference)))


# --------------------------------------------------------------------------
# checks


def check_backends(seed: int = 0, **_) -> tuple[bool, str]:
    names = kernels.available()
    g = _rng.derive(seed, _rng.SAMPLE, 1)
    n = 6
    psi0 = (g.normal(size=1 << n) + 1j * g.normal(size=1 << n))
    psi0 /= np.linalg.norm(psi0)
    u = np.linalg.qr(g.normal(size=(2, 2)) + 1j * g.normal(size=(2, 2)))[0]
    ph = np.exp(1j * g.uniform(0, 2 * np.pi, size=8))
    outs = []
    prev = kernels.BACKEND
    try:
        for name in names:
            kernels.use(name)
            psi = psi0.copy()
            kernels.apply_1q(psi, u, 2, 0b1, 0b1)
            kernels.apply_x(psi, 4, 0b100000, 0)
            kernels.apply_diagonal(psi, ph, np.array([0, 3, 5], dtype=np.int64), 0, 0)
            outs.append(psi)
    finally:
        kernels.use(prev)
    diff = max((float(np.max(np.abs(o - outs[0]))) for o in outs), default=0.0)
    return diff < 1e-12, f"backends {names}, max difference {diff:.1e}"


def check_qft(**_) -> tuple[bool, str]:
    worst = 0.0
    for n in range(1, 7):
        D = 1 << n
        U = sv.unitary_of([QFT(tuple(range(n)))], n)
        worst = max(worst, float(np.max(np.abs(U - np.fft.ifft(np.eye(D), axis=0) * math.sqrt(D)))))
    return worst < 1e-10, f"QFT vs DFT matrix, max error {worst:.1e}"


def check_permutation(**_) -> tuple[bool, str]:
    worst = 0.0
    for n in range(1, 6):
        D = 1 << n
        for s in range(D):
            U = sv.unitary_of(list(ops.permutation_gates(range(n), s)), n)
            P = np.roll(np.eye(D), s, axis=0)
            worst = max(worst, float(np.max(np.abs(U - P))))
    return worst < 1e-10, f"|j> -> |j+s mod D> for n <= 5, max error {worst:.1e}"


def check_round_estimate(**_) -> tuple[bool, str]:
    r = ops.estimate_rounds(0.11)
    p = ops.predicted_success(0.11, r)
    return r == 6 and abs(p - 0.98) <= 0.005, f"alpha 0.11 -> {r} rounds, predicted success {p:.4f}"


def check_grover(s0_sign: float = -1.0, **_) -> tuple[bool, str]:
    err = grover_law_error(s0_sign=s0_sign)
    return err < 1e-6, f"OAA success vs sin^2((2r+1) theta), max error {err:.1e}"


def check_bundling(seed: int = 0, **_) -> tuple[bool, str]:
    worst = 0.0
    for K in (2, 3, 5):
        g = _rng.derive(seed, _rng.SAMPLE, K)
        vs = [hdc.random_hypervector(16, g) for _ in range(K)]
        res = ops.bundle_states(vs)
        exact = ops.analytic_bundle(vs)
        worst = max(worst, 1 - abs(np.vdot(exact, res.state.amplitudes)) ** 2)
    return worst < 1e-9, f"bundle fidelity deficit {worst:.1e}"


def check_similarity(seed: int = 0, **_) -> tuple[bool, str]:
    g = _rng.derive(seed, _rng.SAMPLE, 2)
    worst = 0.0
    for D in (16, 64):
        for _ in range(5):
            a, b = (hdc.random_hypervector(D, g) for _ in range(2))
            est = ops.hadamard_test(ops.encode(a), ops.encode(b))
            worst = max(worst, abs(est.value - hdc.cosine(a, b)))
    return worst < 1e-10, f"Hadamard test vs cosine, max error {worst:.1e}"


def check_reasoning(seed: int = 0, **_) -> tuple[bool, str]:
    from .tasks.reasoning import ENTITIES, ReasoningProblem, reasoning_query_classical, reasoning_query_quantum

    p = ReasoningProblem.generate(16, seed)
    c = reasoning_query_classical(p, "raw").similarities
    q = reasoning_query_quantum(p).similarities
    worst = max(abs(c[e] - q[e]) for e in ENTITIES)
    return worst < 1e-10, f"classical raw vs quantum-exact table at D=16, max error {worst:.1e}"


def check_feature_decode(seed: int = 0, **_) -> tuple[bool, str]:
    from .tasks.classify import level_codebook

    levels = level_codebook(16, seed)
    bad = 0
    for b in (0, 1):
        base = ops.encode(levels[b])
        for p in range(16):
            amps = ops.permute_circuit(base, p).state().amplitudes * 4.0
            if np.max(np.abs(amps - hdc.permute(levels[b], p))) > 1e-10:
                bad += 1
    return bad == 0, f"{32 - bad}/32 feature circuits decode to shifted level vectors"


def check_synthesis(seed: int = 0, **_) -> tuple[bool, str]:
    from .synth.lower import lower

    g = _rng.derive(seed, _rng.SAMPLE, 3)
    worst = 0.0
    cx_ok = True
    for n in (2, 3, 4):
        D = 1 << n
        ph = np.exp(1j * g.uniform(-np.pi, np.pi, size=D))
        M = np.linalg.qr(g.normal(size=(4, 4)) + 1j * g.normal(size=(4, 4)))[0]
        cases = [
            [Diagonal(tuple(range(n)), ph)],
            [QFT(tuple(range(n)))],
            [Controlled(Block((QFT((0, 1)), Diagonal((0, 1), ph[:4]))), (n,), (0,))],
            [Controlled(UnitaryMatrix((0, 1), M), (n, n - 1) if n > 2 else (n,))],
        ]
        for gates in cases:
            width = n + 1
            pc = lower(gates, width)
            ref = sv.unitary_of(gates, width)
            worst = max(worst, tracked_phase_error(pc, ref))
        cx_ok &= lower([Diagonal(tuple(range(n)), ph)], n).cnot_count <= D
    return worst < 1e-9 and cx_ok, f"lowered vs source unitary, max error {worst:.1e}; diagonal CNOTs <= 2^n: {cx_ok}"


def check_resource_counting(seed: int = 0, **_) -> tuple[bool, str]:
    from .synth.lower import lower
    from .synth.resources import ResourceCounter, report_of
    from .synth.scaling import flat_lcu_gates, synthetic_terms

    levels, bits = synthetic_terms(3, 2, 4, seed)
    gates, n, m = flat_lcu_gates(levels, bits)
    fast = ResourceCounter().count(gates, n + m, n)
    slow = report_of(lower(gates, n + m), n)
    return fast == slow, f"compositional {fast.depth}/{fast.cnot_count} vs materialized {slow.depth}/{slow.cnot_count}"


CHECKS: dict[str, Callable[..., tuple[bool, str]]] = {
    "kernel-backends-agree": check_backends,
    "qft-matches-dft": check_qft,
    "permutation-oracle": check_permutation,
    "round-estimate": check_round_estimate,
    "grover-law": check_grover,
    "bundle-fidelity": check_bundling,
    "hadamard-equals-cosine": check_similarity,
    "reasoning-equivalence": check_reasoning,
    "feature-circuit-decode": check_feature_decode,
    "synthesis-unitaries": check_synthesis,
    "resource-counting": check_resource_counting,
}


def run_selftest(seed: int = 0, s0_sign: float = -1.0) -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        try:
            ok, detail = fn(seed=seed, s0_sign=s0_sign)
        except Exception as exc:  # a crash is a failed invariant, reported by name
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return out
