"""MNIST ingestion, a synthetic stand-in, and 4x4 binary preprocessing."""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import rng as _rng
from ..errors import FormatError, InsufficientDataError, InvalidArgumentError

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
CLASSES = (3, 6)
POOL = 7
GRID = 4
THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class Dataset:
    images: np.ndarray  # (N, 28, 28) float64 in [0, 1]
    labels: np.ndarray  # (N,) int64
    source: str

    def __post_init__(self):
        if self.images.ndim != 3 or self.images.shape[0] != self.labels.shape[0]:
            raise InvalidArgumentError("images and labels disagree on sample count")
        if self.images.size and (self.images.min() < 0.0 or self.images.max() > 1.0):
            raise InvalidArgumentError("pixel values must lie in [0, 1]")

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def filter(self, classes: Sequence[int] = CLASSES) -> "Dataset":
        keep = np.isin(self.labels, classes)
        return Dataset(self.images[keep], self.labels[keep], self.source)


def _read(path: Path) -> bytes:
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def _parse_idx(raw: bytes, magic: int, ndim: int, name: str) -> np.ndarray:
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise FormatError(f"{name}: header needs {header} bytes, file has {len(raw)}")
    (found,) = struct.unpack_from(">I", raw, 0)
    if found != magic:
        raise FormatError(f"{name}: bad magic 0x{found:08x} at byte offset 0, expected 0x{magic:08x}")
    dims = struct.unpack_from(f">{ndim}I", raw, 4)
    expected = header + int(np.prod(dims, dtype=np.int64))
    if len(raw) != expected:
        kind = "truncated" if len(raw) < expected else "trailing data"
        raise FormatError(
            f"{name}: {kind}: expected {expected} bytes for dims {tuple(dims)}, got {len(raw)} "
            f"(payload starts at byte offset {header})"
        )
    return np.frombuffer(raw, dtype=np.uint8, offset=header).reshape(dims)


def load_mnist(images_path: str | Path, labels_path: str | Path) -> Dataset:
    """Read an IDX image/label pair (plain or gzipped); pixels scaled to [0, 1]."""
    imgs = _parse_idx(_read(Path(images_path)), IMAGES_MAGIC, 3, str(images_path))
    lbls = _parse_idx(_read(Path(labels_path)), LABELS_MAGIC, 1, str(labels_path))
    if imgs.shape[0] != lbls.shape[0]:
        raise FormatError(f"{imgs.shape[0]} images but {lbls.shape[0]} labels (counts at byte offset 4)")
    return Dataset(imgs.astype(np.float64) / 255.0, lbls.astype(np.int64), "mnist-idx")


# 4x4 block templates; each cell becomes a 7x7 patch.
_TEMPLATES = {
    3: np.array([[1, 1, 1, 1], [0, 0, 1, 1], [0, 1, 1, 1], [1, 1, 1, 1]]),
    6: np.array([[1, 1, 0, 0], [1, 0, 0, 0], [1, 1, 1, 1], [1, 1, 1, 1]]),
}


def synthetic_dataset(seed: int, per_class: int, noise: float = 0.15) -> Dataset:
    """Two block-pattern families labelled 3 and 6.

    Stroke intensity varies per sample in [0.7, 1.0] and Gaussian pixel noise
    of scale ``noise`` is added before clipping. With ``noise == 0`` every
    sample pools to its class template exactly.
    """
    if int(per_class) != per_class or per_class < 1:
        raise InvalidArgumentError("per_class must be a positive integer")
    if noise < 0:
        raise InvalidArgumentError("noise must be >= 0")
    g = _rng.derive(seed, _rng.DATASET)
    images, labels = [], []
    for label in CLASSES:
        base = np.kron(_TEMPLATES[label], np.ones((POOL, POOL)))
        for _ in range(per_class):
            img = base * g.uniform(0.7, 1.0)
            if noise:
                img = img + g.normal(0.0, noise, size=img.shape)
            images.append(np.clip(img, 0.0, 1.0))
            labels.append(label)
    return Dataset(np.asarray(images), np.asarray(labels, dtype=np.int64), "synthetic")


def downscale(images: np.ndarray) -> np.ndarray:
    """Mean-pool non-overlapping 7x7 blocks: (N, 28, 28) -> (N, 4, 4)."""
    images = np.asarray(images, dtype=float)
    if images.ndim == 2:
        images = images[None]
    if images.shape[1:] != (28, 28):
        raise InvalidArgumentError(f"expected 28x28 images, got {images.shape[1:]}")
    return images.reshape(-1, GRID, POOL, GRID, POOL).mean(axis=(2, 4))


def binarize(pooled: np.ndarray) -> np.ndarray:
    """Values at or above 0.5 become 1; flattened row-major to 16 features."""
    return (np.asarray(pooled) >= THRESHOLD).astype(np.int64).reshape(len(pooled), -1)


def preprocess(
    dataset: Dataset,
    seed: int | None = None,
    train_size: int | None = None,
    test_size: int | None = None,
) -> tuple[np.ndarray, np.ndarray] | tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Pool, threshold and (optionally) shuffle and split.

    Without sizes this returns ``(X, y)`` in dataset order (shuffled when
    ``seed`` is given). With both sizes it returns ``((X_train, y_train),
    (X_test, y_test))`` drawn stratified from a seeded shuffle.
    """
    X = binarize(downscale(dataset.images))
    y = dataset.labels.copy()
    if seed is not None:
        order = _rng.derive(seed, _rng.SHUFFLE).permutation(len(y))
        X, y = X[order], y[order]
    if train_size is None and test_size is None:
        return X, y
    if train_size is None or test_size is None:
        raise InvalidArgumentError("give both train_size and test_size, or neither")
    tr, te = stratified_split(y, int(train_size), int(test_size), 0 if seed is None else seed)
    return (X[tr], y[tr]), (X[te], y[te])


def stratified_split(y: np.ndarray, train_size: int, test_size: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    from sklearn.model_selection import train_test_split

    idx = np.arange(len(y))
    if train_size + test_size > len(y):
        raise InsufficientDataError(f"need {train_size + test_size} samples, have {len(y)}")
    rest = len(y) - train_size - test_size
    tr, other = train_test_split(idx, train_size=train_size, stratify=y, random_state=_seed32(seed, 0))
    if rest == 0:
        return tr, other
    te, _ = train_test_split(other, train_size=test_size, stratify=y[other], random_state=_seed32(seed, 1))
    return tr, te


def _seed32(seed: int, *keys: int) -> int:
    """A 32-bit integer seed for libraries that take ``random_state``."""
    return int(_rng.derive(seed, _rng.FOLD, *keys).integers(0, 2**31 - 1))
