"""The "dollar of Mexico" analogy, classically and through the quantum ops."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import hdc, ops
from .. import rng as _rng
from ..errors import InvalidArgumentError

SYMBOLS = (
    "country", "currency", "capital",
    "USA", "Dollar", "WashingtonDC",
    "Mexico", "Peso", "MexicoCity",
)
ROLES = ("country", "currency", "capital")
USA = ("USA", "Dollar", "WashingtonDC")
MEXICO = ("Mexico", "Peso", "MexicoCity")
ENTITIES = USA + MEXICO
ANSWER = "Peso"


@dataclass
class ReasoningProblem:
    dim: int
    seed: int
    codebook: hdc.Codebook = field(repr=False)

    @classmethod
    def generate(cls, dim: int, seed: int) -> "ReasoningProblem":
        return cls(int(dim), int(seed), hdc.Codebook.generate(SYMBOLS, dim, seed))

    def __getitem__(self, name: str) -> np.ndarray:
        return self.codebook[name]


@dataclass
class ReasoningReport:
    similarities: dict[str, float]
    mode: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def answer(self) -> str:
        # insertion order follows ENTITIES, so max() keeps the first of ties
        return max(self.similarities, key=self.similarities.__getitem__)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "answer": self.answer,
            "similarities": dict(self.similarities),
            "diagnostics": dict(self.diagnostics),
        }


def country_record(problem: ReasoningProblem, fillers: tuple[str, ...], bundle_mode: str = "raw") -> np.ndarray:
    terms = [hdc.bind(problem[r], problem[f]) for r, f in zip(ROLES, fillers)]
    if bundle_mode == "raw":
        return hdc.bundle(terms)
    if bundle_mode == "sign":
        return hdc.bundle_sign(terms)
    raise InvalidArgumentError(f"bundle_mode must be 'raw' or 'sign', got {bundle_mode!r}")


def reasoning_query_classical(problem: ReasoningProblem, bundle_mode: str = "raw") -> ReasoningReport:
    v_usa = country_record(problem, USA, bundle_mode)
    v_mex = country_record(problem, MEXICO, bundle_mode)
    query = problem["Dollar"] * (v_usa * v_mex)
    sims = {e: hdc.cosine(query, problem[e]) for e in ENTITIES}
    return ReasoningReport(sims, f"classical-{bundle_mode}")


def cross_term_oracles(problem: ReasoningProblem) -> list[ops.PhaseOracle]:
    """``Dollar * (role_i * usa_i) * (role_j * mex_j)`` for all nine ``(i, j)``."""
    o = {s: ops.oracle_from_bipolar(problem[s]) for s in SYMBOLS}
    return [
        ops.compose_bind([o["Dollar"], o[ri], o[fi], o[rj], o[fj]])
        for ri, fi in zip(ROLES, USA)
        for rj, fj in zip(ROLES, MEXICO)
    ]


def reasoning_query_quantum(
    problem: ReasoningProblem,
    shots: int = 0,
    rng: np.random.Generator | int | None = None,
    max_rounds: int = ops.MAX_ROUNDS,
) -> ReasoningReport:
    """Bundle the nine cross terms by LCU + OAA, then Hadamard-test each entity.

    ``shots == 0`` gives exact similarities. With shots, entity ``k`` draws
    from its own stream derived from ``rng`` (an int seed or generator).
    """
    ops._log2_exact(problem.dim)
    bundle = ops.bundle_states([ops.prepare_state(o) for o in cross_term_oracles(problem)], max_rounds=max_rounds)
    base_seed = None
    if shots:
        base_seed = int(_rng.as_generator(rng).integers(0, 2**63 - 1))
    sims: dict[str, float] = {}
    errors: dict[str, float] = {}
    for k, e in enumerate(ENTITIES):
        gen = _rng.derive(base_seed, _rng.SHOTS, k) if shots else None
        est = ops.hadamard_test(bundle.prep, ops.encode(problem[e]), shots=shots, rng=gen)
        sims[e] = est.value
        errors[e] = est.std_error
    diag = bundle.diagnostics()
    if shots:
        diag["shots"] = int(shots)
        diag["std_error"] = errors
    return ReasoningReport(sims, "quantum-sampled" if shots else "quantum-exact", diag)
