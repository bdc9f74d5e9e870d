"""Write the 3/6 digits of a CSV MNIST subset as gzipped IDX files.

The input is the 5,000-image subset that ships inside the ``mlxtend`` wheel
(``mlxtend/data/data/mnist_5k.csv.gz``: 784 pixel columns in 0..255, then the
label). Pass either that CSV or the wheel itself::

    python tools/mnist_subset_to_idx.py mlxtend-0.24.0-py3-none-any.whl data/

Output: ``mnist36-images-idx3-ubyte.gz`` and ``mnist36-labels-idx1-ubyte.gz``.
"""

from __future__ import annotations

import argparse
import gzip
import io
import struct
import zipfile
from pathlib import Path

import numpy as np

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def read_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    if path.suffix == ".whl":
        with zipfile.ZipFile(path) as zf:
            raw = gzip.decompress(zf.read(MEMBER))
    else:
        raw = path.read_bytes()
        if path.suffix == ".gz":
            raw = gzip.decompress(raw)
    table = np.loadtxt(io.BytesIO(raw), delimiter=",", dtype=np.int64)
    return table[:, :-1].astype(np.uint8), table[:, -1].astype(np.uint8)


def write_idx(out_dir: Path, images: np.ndarray, labels: np.ndarray, prefix: str = "mnist36") -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    img_path = out_dir / f"{prefix}-images-idx3-ubyte.gz"
    lbl_path = out_dir / f"{prefix}-labels-idx1-ubyte.gz"
    n = images.shape[0]
    # mtime=0 keeps the gzip bytes reproducible
    with gzip.GzipFile(img_path, "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        f.write(images.reshape(n, 784).tobytes())
    with gzip.GzipFile(lbl_path, "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, n))
        f.write(labels.tobytes())
    return img_path, lbl_path


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", type=Path, help="mnist_5k.csv[.gz] or the mlxtend wheel")
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--digits", type=int, nargs="+", default=[3, 6])
    args = ap.parse_args(argv)
    images, labels = read_csv(args.source)
    keep = np.isin(labels, args.digits)
    paths = write_idx(args.out_dir, images[keep], labels[keep])
    print(f"wrote {int(keep.sum())} images to {paths[0]} and {paths[1]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
