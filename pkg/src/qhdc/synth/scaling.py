"""Circuits for the resource-scaling experiments.

A class prototype bundles ``samples * features`` feature terms. Term
``(s, p)`` is the level oracle for pixel bit ``b = bits[s, p]`` followed by a
cyclic shift by ``p``, applied to the uniform superposition. The flat LCU
selects all terms coherently from ``ceil(log2 K)`` ancillas; the
probabilistic LCU applies one randomly drawn term per round from a single
ancilla.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .. import hdc
from .. import rng as _rng
from ..errors import InvalidArgumentError
from ..ops import ancilla_count, hadamard_test_gates, permutation_gates, prepare_state, rms_phase_encode
from ..sim.circuit import Block, Controlled, Diagonal, Gate, H, controlled_on_state
from .diagonal import real_state_prep
from .resources import ResourceCounter, ResourceReport

INFEASIBLE_DEPTH = 100_000
DEFAULT_SAMPLES = 50
DEFAULT_FEATURES = 16


@dataclass(frozen=True)
class ScalingRow:
    n_qubits: int
    mode: str
    rounds: int
    depth: int
    cnot_count: int
    total_gates: int
    n_system: int
    n_ancilla: int
    infeasible: bool

    def to_dict(self) -> dict:
        return asdict(self)


def feature_gates(level: np.ndarray, shift: int, n: int) -> tuple[Gate, ...]:
    """Level oracle then a cyclic shift by ``shift`` (omitted when it is zero)."""
    gates: list[Gate] = [Diagonal(tuple(range(n)), np.asarray(level, dtype=complex))]
    if shift % (1 << n):
        gates.append(Block(permutation_gates(range(n), shift), f"perm{shift}"))
    return tuple(gates)


def synthetic_terms(n: int, samples: int, features: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded level codebook ``(2, D)`` and feature bits ``(samples, features)``."""
    levels = hdc.Codebook.generate(["level0", "level1"], 1 << n, seed)
    bits = _rng.derive(seed, _rng.SAMPLE).integers(0, 2, size=(samples, features))
    return np.stack([levels["level0"], levels["level1"]]), bits


def _terms(levels: np.ndarray, bits: np.ndarray, n: int) -> list[Block]:
    cache: dict[tuple[int, int], Block] = {}
    out = []
    for s in range(bits.shape[0]):
        for p in range(bits.shape[1]):
            key = (int(bits[s, p]), p)
            if key not in cache:
                cache[key] = Block(feature_gates(levels[key[0]], p, n), f"f{key[0]}_{p}")
            out.append(cache[key])
    return out


def flat_lcu_gates(levels: np.ndarray, bits: np.ndarray) -> tuple[list[Gate], int, int]:
    """Uniform-weight LCU over all feature terms: ``(gates, n_system, n_ancilla)``."""
    D = levels.shape[1]
    n = int(D).bit_length() - 1
    terms = _terms(levels, bits, n)
    K = len(terms)
    m = ancilla_count(K)
    anc = tuple(range(n, n + m))
    gates: list[Gate] = [H(q) for q in range(n)]
    if m == 0:
        return gates + list(terms[0].gates), n, 0
    amps = np.zeros(1 << m)
    amps[:K] = math.sqrt(1.0 / K)
    prep = real_state_prep(amps, list(anc), n + m)
    prep_block = Block(tuple(prep.gates()), "prep")
    gates.append(prep_block)
    for k, term in enumerate(terms):
        gates.append(controlled_on_state(term, anc, k))
    gates.append(prep_block.inverse())
    return gates, n, m


def flat_lcu_alpha(levels: np.ndarray, bits: np.ndarray) -> float:
    """Success amplitude of the flat LCU, from the classical bundle."""
    K = bits.size
    acc = np.zeros(levels.shape[1])
    for s in range(bits.shape[0]):
        for p in range(bits.shape[1]):
            acc += hdc.permute(levels[bits[s, p]], p)
    return float(np.linalg.norm(acc) / (K * math.sqrt(levels.shape[1])))


def probabilistic_lcu_resource_gates(levels: np.ndarray, bits: np.ndarray, rounds: int, seed: int) -> tuple[list[Gate], int]:
    D = levels.shape[1]
    n = int(D).bit_length() - 1
    terms = _terms(levels, bits, n)
    picks = _rng.derive(seed, _rng.PROBABILISTIC_LCU).integers(0, len(terms), size=rounds)
    anc = n
    gates: list[Gate] = [H(q) for q in range(n)]
    for k in picks:
        gates += [H(anc), Controlled(terms[int(k)], (anc,), (1,)), H(anc)]
    return gates, n


def _row(rep: ResourceReport, mode: str, rounds: int, threshold: int) -> ScalingRow:
    return ScalingRow(
        n_qubits=rep.n_system,
        mode=mode,
        rounds=rounds,
        depth=rep.depth,
        cnot_count=rep.cnot_count,
        total_gates=rep.total_gates,
        n_system=rep.n_system,
        n_ancilla=rep.n_ancilla,
        infeasible=rep.depth > threshold,
    )


def scaling_row(
    n: int,
    mode: str,
    samples: int = DEFAULT_SAMPLES,
    features: int = DEFAULT_FEATURES,
    rounds: int = 15,
    seed: int = 0,
    threshold: int = INFEASIBLE_DEPTH,
    counter: ResourceCounter | None = None,
) -> ScalingRow:
    """One table row: lowered depth and CNOT count of a class-prototype circuit."""
    if n < 1:
        raise InvalidArgumentError("need at least one system qubit")
    levels, bits = synthetic_terms(n, samples, features, seed)
    counter = counter or ResourceCounter()
    if mode == "flat":
        gates, n_sys, m = flat_lcu_gates(levels, bits)
        rep = counter.count(gates, n_sys + m, n_sys)
        return _row(rep, "flat", 0, threshold)
    if mode == "probabilistic":
        if rounds < 1:
            raise InvalidArgumentError("rounds must be >= 1")
        gates, n_sys = probabilistic_lcu_resource_gates(levels, bits, rounds, seed)
        rep = counter.count(gates, n_sys + 1, n_sys)
        return _row(rep, "probabilistic", rounds, threshold)
    raise InvalidArgumentError(f"unknown mode {mode!r}")


def hadamard_test_report(dim: int, seed: int = 0, counter: ResourceCounter | None = None) -> ResourceReport:
    """Lowered Hadamard test between two RMS-encoded prototypes of size ``dim``."""
    n = int(dim).bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise InvalidArgumentError("dimension must be a power of two")
    g = _rng.derive(seed, _rng.SAMPLE, dim)
    a = prepare_state(rms_phase_encode(g.normal(size=dim)))
    b = prepare_state(rms_phase_encode(g.normal(size=dim)))
    return (counter or ResourceCounter()).count(hadamard_test_gates(a, b), n + 1, n)
