"""Binary digit classification with level/position hypervector encoding.

A 16-bit sample encodes as ``sum_p permute(level[bit_p], p)``. Class
prototypes are sums of their samples' encodings. Inference compares a
query against each prototype by cosine (classical) or by a Hadamard test
between RMS phase-encoded states (quantum).
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .. import hdc, ops
from .. import rng as _rng
from ..errors import (
    DegenerateVectorError,
    FormatError,
    InsufficientDataError,
    InvalidArgumentError,
    UndefinedSimilarityError,
)
from ..synth.resources import ResourceCounter
from .data import _seed32, stratified_split

FORMAT_VERSION = 1
MODES = ("classical", "quantum-exact", "quantum-sampled")
DEFAULT_RETRAIN = {"classical": 10, "hybrid": 0}


# --------------------------------------------------------------------------
# encoding


def level_codebook(dim: int, seed: int) -> np.ndarray:
    """Two independent bipolar level vectors, for pixel values 0 and 1."""
    return np.stack([hdc.random_hypervector(dim, _rng.derive(seed, _rng.LEVELS, b)) for b in (0, 1)])


def _shift_tables(levels: np.ndarray, n_features: int) -> tuple[np.ndarray, np.ndarray]:
    """Base encoding of the all-zero sample and the per-pixel deltas."""
    s0 = np.stack([hdc.permute(levels[0], p) for p in range(n_features)])
    s1 = np.stack([hdc.permute(levels[1], p) for p in range(n_features)])
    return s0.sum(axis=0), s1 - s0


def encode_samples(X: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Encodings of a batch of binary feature rows, as exact integers."""
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    if not np.isin(X, (0, 1)).all():
        raise InvalidArgumentError("features must be 0/1")
    base, delta = _shift_tables(np.asarray(levels, dtype=np.int64), X.shape[1])
    return base[None, :] + X @ delta


def encode_sample(features, model: "ClassifierModel | np.ndarray") -> np.ndarray:
    levels = model.levels if isinstance(model, ClassifierModel) else model
    return encode_samples(np.asarray(features)[None, :], levels)[0]


# --------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 10_000
    seed: int = 0
    mode: str = "classical"  # or "hybrid"
    retrain_epochs: int | None = None  # None: 10 for classical, 0 for hybrid

    def resolved_epochs(self) -> int:
        return DEFAULT_RETRAIN[self.mode] if self.retrain_epochs is None else int(self.retrain_epochs)


@dataclass(eq=False)
class ClassifierModel:
    dim: int
    seed: int
    classes: tuple[int, int]
    levels: np.ndarray  # (2, D) bipolar
    prototypes: np.ndarray  # (2, D) int64, one row per entry of ``classes``
    hybrid: bool = False
    retrain_epochs: int = 0
    retrain_history: list[int] = field(default_factory=list)

    @property
    def n_qubits(self) -> int | None:
        n = self.dim.bit_length() - 1
        return n if 1 << n == self.dim else None

    @cached_property
    def rms_oracles(self) -> tuple[ops.PhaseOracle, ...]:
        if self.n_qubits is None:
            raise InvalidArgumentError(f"quantum inference needs a power-of-two dimension, got {self.dim}")
        return tuple(ops.rms_phase_encode(p) for p in self.prototypes)

    @cached_property
    def _preps(self) -> tuple[ops.StatePrep, ...]:
        return tuple(ops.prepare_state(o) for o in self.rms_oracles)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "D": self.dim,
            "seed": self.seed,
            "classes": list(self.classes),
            "level_codebook": self.levels.astype(int).tolist(),
            "prototypes": self.prototypes.astype(int).tolist(),
            "rms": self.hybrid,
            "retrain_epochs": self.retrain_epochs,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierModel":
        if d.get("format_version") != FORMAT_VERSION:
            raise FormatError(f"unsupported model format_version {d.get('format_version')!r}")
        levels = np.asarray(d["level_codebook"], dtype=np.int64)
        protos = np.asarray(d["prototypes"], dtype=np.int64)
        D = int(d["D"])
        if levels.shape != (2, D) or protos.shape != (2, D):
            raise FormatError("codebook or prototype shape does not match D")
        return cls(D, int(d["seed"]), tuple(d["classes"]), levels, protos, bool(d["rms"]), int(d.get("retrain_epochs", 0)))

    @classmethod
    def loads(cls, text: str) -> "ClassifierModel":
        return cls.from_dict(json.loads(text))


def train(X: np.ndarray, y: np.ndarray, config: TrainConfig = TrainConfig()) -> ClassifierModel:
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size != 2:
        raise InsufficientDataError(f"training needs exactly two classes, got {classes.tolist()}")
    if config.mode not in DEFAULT_RETRAIN:
        raise InvalidArgumentError(f"unknown training mode {config.mode!r}")
    levels = level_codebook(config.dim, config.seed)
    enc = encode_samples(X, levels)
    idx = np.searchsorted(classes, y)
    protos = np.stack([enc[idx == c].sum(axis=0) for c in range(2)])
    epochs = config.resolved_epochs()
    history: list[int] = []
    if epochs:
        try:
            protos, history = hdc.retrain(protos, enc, idx, epochs, keep_best=True)
        except UndefinedSimilarityError as exc:
            raise DegenerateVectorError("a class prototype cancelled to zero during retraining") from exc
    if not np.all(np.any(protos != 0, axis=1)):
        raise DegenerateVectorError("a class prototype is the all-zero vector")
    model = ClassifierModel(
        config.dim, config.seed, (int(classes[0]), int(classes[1])), levels, protos,
        config.mode == "hybrid", epochs, history,
    )
    if model.hybrid:
        model.rms_oracles  # validate the dimension and prototypes up front
    return model


# --------------------------------------------------------------------------
# inference


@dataclass(frozen=True)
class Prediction:
    label: int
    score: float  # sim(first class) - sim(second class)
    similarities: tuple[float, float]
    std_error: float = 0.0
    degenerate: bool = False


def _decide(model: ClassifierModel, sims: Sequence[float], err: float = 0.0) -> Prediction:
    s0, s1 = float(sims[0]), float(sims[1])
    label = model.classes[0] if s0 >= s1 else model.classes[1]
    return Prediction(label, s0 - s1, (s0, s1), err)


def infer_encoded(
    model: ClassifierModel,
    q: np.ndarray,
    mode: str = "classical",
    shots: int = 0,
    rng: np.random.Generator | int | None = None,
) -> Prediction:
    if not np.any(q):
        raise DegenerateVectorError("query encoding is the all-zero vector")
    if mode == "classical":
        try:
            return _decide(model, hdc.cosine_many(model.prototypes, q))
        except UndefinedSimilarityError as exc:
            raise DegenerateVectorError(str(exc)) from exc
    if mode not in MODES:
        raise InvalidArgumentError(f"unknown inference mode {mode!r}")
    sampled = mode == "quantum-sampled"
    if sampled and shots < 1:
        raise InvalidArgumentError("quantum-sampled inference needs shots >= 1")
    query = ops.prepare_state(ops.rms_phase_encode(q))
    gen = _rng.as_generator(rng) if sampled else None
    ests = [ops.hadamard_test(query, p, shots=shots if sampled else 0, rng=gen) for p in model._preps]
    return _decide(model, [e.value for e in ests], max(e.std_error for e in ests))


def infer(
    model: ClassifierModel,
    features,
    mode: str = "classical",
    shots: int = 0,
    rng: np.random.Generator | int | None = None,
) -> Prediction:
    return infer_encoded(model, encode_sample(features, model), mode, shots, rng)


def infer_many(
    model: ClassifierModel,
    X: np.ndarray,
    mode: str = "classical",
    shots: int = 0,
    seed: int = 0,
    stream: tuple[int, ...] = (),
) -> list[Prediction]:
    """Batch inference; sample ``i`` draws shots from ``(seed, SHOTS, *stream, i)``.

    An all-zero query encoding (possible when ``D`` is at most the number of
    features) has no defined similarity; in a batch it is scored as a tie
    and flagged ``degenerate`` instead of aborting the evaluation.
    """
    enc = encode_samples(X, model.levels)
    out = []
    for i, q in enumerate(enc):
        if not np.any(q):
            out.append(Prediction(model.classes[0], 0.0, (0.0, 0.0), 0.0, True))
            continue
        out.append(infer_encoded(model, q, mode, shots, _rng.derive(seed, _rng.SHOTS, *stream, i) if shots else None))
    return out


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class EvalConfig:
    dim: int = 10_000
    mode: str = "classical"
    shots: int = 0
    folds: int = 5
    train_size: int = 100
    test_size: int = 50
    retrain_epochs: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgumentError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.shots < 0:
            raise InvalidArgumentError("shots must be >= 0")
        if self.mode == "quantum-sampled" and self.shots == 0:
            raise InvalidArgumentError("quantum-sampled mode needs shots >= 1")
        if self.mode != "classical":
            n = self.dim.bit_length() - 1
            if self.dim < 2 or 1 << n != self.dim:
                raise InvalidArgumentError(f"quantum modes need a power-of-two dimension, got {self.dim}")
        if self.folds < 2:
            raise InvalidArgumentError("need at least two folds")

    @property
    def train_config(self) -> TrainConfig:
        kind = "classical" if self.mode == "classical" else "hybrid"
        return TrainConfig(self.dim, self.seed, kind, self.retrain_epochs)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EvalReport:
    mode: str
    classes: tuple[int, int]
    confusion: list[list[int]]  # rows: true class, columns: predicted
    fold_f1: list[float]
    auc: float
    fold_seconds: list[float]
    max_std_error: float
    config: dict
    degenerate_queries: int = 0

    @property
    def f1_mean(self) -> float:
        return float(np.mean(self.fold_f1))

    @property
    def f1_std(self) -> float:
        return float(np.std(self.fold_f1))

    @property
    def n_test(self) -> int:
        return int(np.sum(self.confusion))

    def to_dict(self, timings: bool = True) -> dict:
        d = {
            "mode": self.mode,
            "classes": list(self.classes),
            "confusion": self.confusion,
            "f1_weighted_mean": self.f1_mean,
            "f1_weighted_std": self.f1_std,
            "fold_f1": list(self.fold_f1),
            "auc": self.auc,
            "n_test": self.n_test,
            "max_std_error": self.max_std_error,
            "degenerate_queries": self.degenerate_queries,
            "config": dict(self.config),
        }
        if timings:
            d["fold_seconds"] = list(self.fold_seconds)
        return d


@dataclass
class FoldResult:
    y_true: np.ndarray
    preds: list[Prediction]
    seconds: float


def fold_indices(y: np.ndarray, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    from sklearn.model_selection import StratifiedKFold

    counts = np.unique(y, return_counts=True)[1]
    if counts.size < 2 or counts.min() < k:
        raise InsufficientDataError(f"every class needs at least {k} samples for {k} folds, got counts {counts.tolist()}")
    skf = StratifiedKFold(n_splits=k, shuffle=True, random_state=_seed32(seed))
    return list(skf.split(np.zeros(len(y)), y))


def _subsample(idx: np.ndarray, y: np.ndarray, size: int, seed: int, key: int) -> np.ndarray:
    from sklearn.model_selection import train_test_split

    if size >= len(idx):
        return idx
    part, _ = train_test_split(idx, train_size=size, stratify=y[idx], random_state=_seed32(seed, key))
    return np.sort(part)


def _run_fold(X, y, cfg: EvalConfig, f: int, tr: np.ndarray, te: np.ndarray) -> FoldResult:
    t0 = time.perf_counter()
    tr = _subsample(tr, y, cfg.train_size, cfg.seed, 2 * f)
    te = _subsample(te, y, cfg.test_size, cfg.seed, 2 * f + 1)
    if np.unique(y[te]).size < 2 or np.unique(y[tr]).size < 2:
        raise InsufficientDataError(f"fold {f} is missing a class")
    model = train(X[tr], y[tr], cfg.train_config)
    preds = infer_many(model, X[te], cfg.mode, cfg.shots, cfg.seed, (f,))
    return FoldResult(y[te], preds, time.perf_counter() - t0)


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(*it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda it: fn(*it), items))


def cross_validate(X: np.ndarray, y: np.ndarray, config: EvalConfig = EvalConfig(), workers: int = 1) -> EvalReport:
    """Seeded stratified k-fold evaluation; output does not depend on ``workers``."""
    from sklearn.metrics import confusion_matrix, f1_score, roc_auc_score

    X = np.asarray(X)
    y = np.asarray(y)
    classes = tuple(int(c) for c in np.unique(y))
    if len(classes) != 2:
        raise InsufficientDataError(f"cross-validation needs exactly two classes, got {list(classes)}")
    splits = fold_indices(y, config.folds, config.seed)
    results = _map(
        lambda f, tr, te: _run_fold(X, y, config, f, tr, te),
        [(f, tr, te) for f, (tr, te) in enumerate(splits)],
        workers,
    )
    conf = np.zeros((2, 2), dtype=np.int64)
    f1s, scores, truth = [], [], []
    for r in results:
        pred = np.array([p.label for p in r.preds])
        conf += confusion_matrix(r.y_true, pred, labels=list(classes))
        f1s.append(float(f1_score(r.y_true, pred, average="weighted", labels=list(classes), zero_division=0)))
        scores.extend(p.score for p in r.preds)
        truth.extend(r.y_true.tolist())
    # score favours the first class, so it is the positive label for AUC
    auc = float(roc_auc_score(np.asarray(truth) == classes[0], scores))
    max_err = max((p.std_error for r in results for p in r.preds), default=0.0)
    return EvalReport(
        mode=config.mode,
        classes=classes,
        confusion=conf.tolist(),
        fold_f1=f1s,
        auc=auc,
        fold_seconds=[r.seconds for r in results],
        max_std_error=float(max_err),
        config=config.to_dict(),
        degenerate_queries=sum(p.degenerate for r in results for p in r.preds),
    )


# --------------------------------------------------------------------------
# dimensionality sweep


@dataclass(frozen=True)
class SweepRow:
    dim: int
    f1: float
    depth: int
    cnot_count: int
    total_gates: int

    def to_dict(self) -> dict:
        return asdict(self)


SWEEP_DIMS = (16, 32, 64, 128, 256)


def dimensionality_sweep(
    X: np.ndarray,
    y: np.ndarray,
    dims: Sequence[int] = SWEEP_DIMS,
    seed: int = 0,
    train_size: int = 100,
    test_size: int = 50,
    mode: str = "quantum-exact",
    workers: int = 1,
) -> list[SweepRow]:
    """Noise-free F1 on one fixed split, plus the lowered Hadamard-test cost.

    The circuit costed at each ``D`` is the test between the two trained
    class prototypes' RMS-encoded states.
    """
    from sklearn.metrics import f1_score

    X = np.asarray(X)
    y = np.asarray(y)
    tr, te = stratified_split(y, train_size, test_size, seed)

    def point(D: int) -> SweepRow:
        cfg = EvalConfig(dim=D, mode=mode, folds=2, seed=seed)
        model = train(X[tr], y[tr], cfg.train_config)
        preds = infer_many(model, X[te], mode, 0, seed)
        f1 = float(f1_score(y[te], [p.label for p in preds], average="weighted", zero_division=0))
        a, b = model._preps
        rep = ResourceCounter().count(ops.hadamard_test_gates(a, b), a.n_qubits + 1, a.n_qubits)
        return SweepRow(int(D), f1, rep.depth, rep.cnot_count, rep.total_gates)

    return _map(point, [(int(D),) for D in dims], workers)


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    head = "dim,f1,depth,cnot_count,total_gates"
    return "\n".join([head] + [f"{r.dim},{r.f1!r},{r.depth},{r.cnot_count},{r.total_gates}" for r in rows]) + "\n"


__all__ = [
    "ClassifierModel", "EvalConfig", "EvalReport", "Prediction", "SweepRow", "TrainConfig",
    "cross_validate", "dimensionality_sweep", "encode_sample", "encode_samples", "infer",
    "infer_many", "level_codebook", "sweep_csv", "train",
]
