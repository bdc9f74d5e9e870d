"""Classical MAP (multiply-add-permute) hypervector algebra.

Hypervectors are plain numpy arrays. Bipolar vectors hold ``+1/-1`` as
``int64``; raw bundles hold the unthresholded integer sum, and retrained
prototypes may be real valued. Functions never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import rng as _rng
from .errors import (
    InvalidArgumentError,
    InvalidDimensionError,
    UndefinedSimilarityError,
)

TIE_VALUE = 1  # sign_normalize maps exact zeros here


def as_bipolar(v) -> np.ndarray:
    """Validate ``v`` as a bipolar hypervector and return it as ``int64``."""
    arr = np.asarray(v)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidArgumentError("hypervector must be a non-empty 1-D sequence")
    if not np.all((arr == 1) | (arr == -1)):
        raise InvalidArgumentError("bipolar hypervector entries must be +1 or -1")
    return arr.astype(np.int64)


def random_hypervector(dim: int, rng: np.random.Generator | int) -> np.ndarray:
    """Draw a uniform random bipolar vector of length ``dim``.

    ``rng`` may be a generator or an integer seed.
    """
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {dim}")
    gen = _rng.as_generator(rng)
    bits = gen.integers(0, 2, size=int(dim), dtype=np.int64)
    return 1 - 2 * bits


def _check_same_dim(vs: Sequence[np.ndarray]) -> int:
    dims = {np.shape(v) for v in vs}
    if len(dims) != 1:
        raise InvalidArgumentError(f"dimension mismatch: {sorted(d[0] for d in dims)}")
    (shape,) = dims
    if len(shape) != 1:
        raise InvalidArgumentError("hypervectors must be 1-D")
    return shape[0]


def bind(a, b) -> np.ndarray:
    """Element-wise product. Self-inverse for bipolar inputs."""
    a, b = np.asarray(a), np.asarray(b)
    _check_same_dim([a, b])
    return a * b


def bundle(vs: Iterable) -> np.ndarray:
    """Raw element-wise sum of the given vectors, with no thresholding."""
    vs = [np.asarray(v) for v in vs]
    if not vs:
        raise InvalidArgumentError("cannot bundle an empty list")
    _check_same_dim(vs)
    return np.sum(vs, axis=0)


def sign_normalize(s) -> np.ndarray:
    """Threshold a bundle back to bipolar; zeros go to ``TIE_VALUE`` (+1)."""
    s = np.asarray(s)
    out = np.where(s < 0, -1, 1).astype(np.int64)
    if TIE_VALUE != 1:
        out[s == 0] = TIE_VALUE
    return out


def bundle_sign(vs: Iterable) -> np.ndarray:
    return sign_normalize(bundle(vs))


def permute(v, shift: int) -> np.ndarray:
    """Cyclic shift that moves entry ``i`` to index ``(i + shift) mod D``.

    This is the same direction as the basis map ``|j> -> |j + s>`` realised by
    the QFT permutation circuit.
    """
    return np.roll(np.asarray(v), int(shift))


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_same_dim([a, b])
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine similarity of a zero-norm vector is undefined")
    value = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, value))


def cosine_many(prototypes: np.ndarray, q) -> np.ndarray:
    """Cosine of ``q`` against every row of ``prototypes``."""
    P = np.asarray(prototypes, dtype=float)
    q = np.asarray(q, dtype=float)
    if P.ndim != 2 or P.shape[1] != q.shape[0]:
        raise InvalidArgumentError("prototype matrix and query disagree on dimension")
    norms = np.linalg.norm(P, axis=1)
    nq = np.linalg.norm(q)
    if nq == 0.0 or np.any(norms == 0.0):
        raise UndefinedSimilarityError("cosine similarity of a zero-norm vector is undefined")
    return (P @ q) / (norms * nq)


def nearest(prototypes: np.ndarray, q) -> int:
    """Index of the most similar prototype; the lowest index wins ties."""
    sims = cosine_many(prototypes, q)
    return int(np.flatnonzero(sims == sims.max())[0])


def retrain_epoch(prototypes: np.ndarray, samples: np.ndarray, labels) -> tuple[np.ndarray, int]:
    """One perceptron-style pass over the training set.

    Each misclassified sample is subtracted from the predicted prototype and
    added to the true one, sequentially, so later predictions see earlier
    updates. Returns the updated copy and the number of misclassifications.
    """
    samples = np.asarray(samples)
    labels = np.asarray(labels, dtype=np.int64)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise InvalidArgumentError("retraining needs a non-empty 2-D sample matrix")
    P = np.array(prototypes, dtype=np.result_type(prototypes, samples), copy=True)
    if P.shape[1] != samples.shape[1]:
        raise InvalidArgumentError("prototype and sample dimensions differ")
    if len(labels) != samples.shape[0]:
        raise InvalidArgumentError("one label per sample required")
    errors = 0
    for x, y in zip(samples, labels):
        pred = nearest(P, x)
        if pred != y:
            P[pred] -= x
            P[y] += x
            errors += 1
    return P, errors


def training_errors(prototypes: np.ndarray, samples: np.ndarray, labels) -> int:
    """Misclassifications of ``samples`` under fixed prototypes (lowest index wins ties)."""
    S = np.asarray(samples, dtype=float) @ np.asarray(prototypes, dtype=float).T
    norms = np.linalg.norm(np.asarray(prototypes, dtype=float), axis=1)
    if np.any(norms == 0.0):
        raise UndefinedSimilarityError("cosine similarity of a zero-norm vector is undefined")
    return int(np.sum(np.argmax(S / norms, axis=1) != np.asarray(labels)))


def retrain(prototypes, samples, labels, epochs: int = 10, keep_best: bool = False) -> tuple[np.ndarray, list[int]]:
    """Run up to ``epochs`` retraining passes, stopping early at zero errors.

    ``history`` holds the per-pass misclassification counts. With
    ``keep_best`` the returned prototypes are whichever of the starting point
    and the per-epoch results has the fewest training errors (earliest wins
    ties); on non-separable data the plain passes can cycle.
    """
    history: list[int] = []
    P = np.asarray(prototypes)
    best = (training_errors(P, samples, labels), P) if keep_best else None
    for _ in range(epochs):
        P, count = retrain_epoch(P, samples, labels)
        history.append(count)
        if keep_best:
            e = training_errors(P, samples, labels)
            if e < best[0]:
                best = (e, P)
        if count == 0:
            break
    return (best[1] if keep_best else P), history


@dataclass
class Codebook:
    """Named random bipolar vectors, reproducible from ``(seed, dim, names)``.

    Entry ``k`` of ``names`` is drawn from its own stream keyed by ``k``, so
    adding names at the end never changes existing entries.
    """

    names: tuple[str, ...]
    dim: int
    seed: int
    entries: dict[str, np.ndarray] = field(repr=False)

    @classmethod
    def generate(cls, names: Sequence[str], dim: int, seed: int) -> "Codebook":
        names = tuple(names)
        if len(set(names)) != len(names):
            raise InvalidArgumentError("codebook names must be unique")
        entries = {
            name: random_hypervector(dim, _rng.derive(seed, _rng.CODEBOOK, k))
            for k, name in enumerate(names)
        }
        return cls(names=names, dim=int(dim), seed=int(seed), entries=entries)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.entries[name]

    def __len__(self) -> int:
        return len(self.names)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "seed": self.seed,
            "names": list(self.names),
            "entries": {k: self.entries[k].astype(int).tolist() for k in self.names},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Codebook":
        entries = {k: as_bipolar(v) for k, v in d["entries"].items()}
        return cls(names=tuple(d["names"]), dim=int(d["dim"]), seed=int(d["seed"]), entries=entries)
