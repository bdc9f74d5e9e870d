import gzip
import struct

import numpy as np
import pytest

from qhdc.errors import FormatError, InsufficientDataError, InvalidArgumentError
from qhdc.tasks import data
from conftest import mnist_paths


def idx_bytes(arr, magic):
    arr = np.asarray(arr, dtype=np.uint8)
    return struct.pack(">I", magic) + struct.pack(f">{arr.ndim}I", *arr.shape) + arr.tobytes()


@pytest.fixture
def idx_pair(tmp_path):
    imgs = np.arange(3 * 28 * 28, dtype=np.uint8).reshape(3, 28, 28)
    labels = np.array([3, 6, 1], dtype=np.uint8)
    ip, lp = tmp_path / "img.idx", tmp_path / "lbl.idx.gz"
    ip.write_bytes(idx_bytes(imgs, data.IMAGES_MAGIC))
    lp.write_bytes(gzip.compress(idx_bytes(labels, data.LABELS_MAGIC)))
    return ip, lp, imgs, labels


def test_load_round_trip(idx_pair):
    ip, lp, imgs, labels = idx_pair
    ds = data.load_mnist(ip, lp)
    assert ds.images.shape == (3, 28, 28)
    assert np.allclose(ds.images, imgs / 255.0)
    assert list(ds.labels) == [3, 6, 1]
    assert list(ds.filter().labels) == [3, 6]


def test_bad_magic(idx_pair, tmp_path):
    ip, lp, imgs, _ = idx_pair
    bad = tmp_path / "bad"
    bad.write_bytes(idx_bytes(imgs, 0x0802))
    with pytest.raises(FormatError, match="offset 0"):
        data.load_mnist(bad, lp)


def test_truncated(idx_pair, tmp_path):
    ip, lp, *_ = idx_pair
    cut = tmp_path / "cut"
    cut.write_bytes(ip.read_bytes()[:-5])
    with pytest.raises(FormatError, match=r"truncated.*expected \d+ bytes.*got \d+"):
        data.load_mnist(cut, lp)
    tiny = tmp_path / "tiny"
    tiny.write_bytes(b"\x00\x00")
    with pytest.raises(FormatError, match="header"):
        data.load_mnist(tiny, lp)


def test_count_mismatch(idx_pair, tmp_path):
    ip, _, _, _ = idx_pair
    lp = tmp_path / "two"
    lp.write_bytes(idx_bytes([3, 6], data.LABELS_MAGIC))
    with pytest.raises(FormatError, match="3 images but 2 labels"):
        data.load_mnist(ip, lp)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        data.load_mnist(tmp_path / "nope", tmp_path / "nope2")


@pytest.mark.skipif(mnist_paths() is None, reason="bundled MNIST subset not present")
def test_bundled_subset():
    ds = data.load_mnist(*mnist_paths())
    assert ds.images.shape[1:] == (28, 28)
    assert set(np.unique(ds.labels)) == {3, 6}
    assert np.sum(ds.labels == 3) == np.sum(ds.labels == 6)


def test_synthetic_dataset():
    a = data.synthetic_dataset(4, 50)
    b = data.synthetic_dataset(4, 50)
    assert len(a) == 100
    assert np.array_equal(a.images, b.images) and np.array_equal(a.labels, b.labels)
    clean = data.synthetic_dataset(0, 10, noise=0.0)
    X, y = data.preprocess(clean)
    for label, tmpl in data._TEMPLATES.items():
        assert np.all(X[y == label] == tmpl.reshape(-1))
    with pytest.raises(InvalidArgumentError):
        data.synthetic_dataset(0, 0)


def test_preprocess_examples():
    imgs = np.zeros((3, 28, 28))
    imgs[0] = 1.0
    imgs[2, 7:14, 14:21] = 1.0  # block (row 1, col 2)
    X = data.binarize(data.downscale(imgs))
    assert list(X[0]) == [1] * 16
    assert list(X[1]) == [0] * 16
    assert X[2].sum() == 1 and X[2, 1 * 4 + 2] == 1


def test_threshold_is_inclusive():
    img = np.zeros((1, 28, 28))
    img[0, :7, :7] = 0.5
    assert data.binarize(data.downscale(img))[0, 0] == 1


def test_downscale_rejects_wrong_size():
    with pytest.raises(InvalidArgumentError):
        data.downscale(np.zeros((2, 27, 28)))


def test_split_sizes_and_stratification():
    ds = data.synthetic_dataset(1, 60)
    (Xtr, ytr), (Xte, yte) = data.preprocess(ds, seed=3, train_size=40, test_size=20)
    assert len(ytr) == 40 and len(yte) == 20
    assert abs(np.sum(ytr == 3) - 20) <= 1 and abs(np.sum(yte == 3) - 10) <= 1
    again = data.preprocess(ds, seed=3, train_size=40, test_size=20)
    assert np.array_equal(again[0][0], Xtr)
    with pytest.raises(InsufficientDataError):
        data.preprocess(ds, seed=3, train_size=100, test_size=50)
