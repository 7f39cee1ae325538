"""MNIST IDX reader/writer and dataset-root discovery."""

import gzip
import hashlib
import os
import struct
from pathlib import Path

import numpy as np

from ..errors import IDXFormatError
from ..nn import Batch

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
DATA_ENV = "MILC_DATA_DIR"

_MNIST_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


def _open(path):
    path = Path(path)
    return gzip.open(path, "rb") if path.suffix == ".gz" else open(path, "rb")


def read_idx(path, expected_magic):
    """Parse an unsigned-byte IDX file (big-endian header) into a ``uint8`` array."""
    with _open(path) as fh:
        raw = fh.read()
    if len(raw) < 8:
        raise IDXFormatError(f"{path}: file too short for an IDX header")
    (magic,) = struct.unpack(">I", raw[:4])
    if magic != expected_magic:
        raise IDXFormatError(f"{path}: bad magic 0x{magic:08x}, expected 0x{expected_magic:08x}")
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise IDXFormatError(f"{path}: truncated header")
    shape = struct.unpack(f">{ndim}I", raw[4:header])
    expected = int(np.prod(shape))
    if len(raw) - header != expected:
        raise IDXFormatError(f"{path}: payload has {len(raw) - header} bytes, header promises {expected}")
    return np.frombuffer(raw, dtype=np.uint8, offset=header).reshape(shape)


def write_idx(path, array):
    """Write a ``uint8`` array as an uncompressed IDX file."""
    array = np.ascontiguousarray(array, dtype=np.uint8)
    magic = 0x00000800 | array.ndim
    with open(path, "wb") as fh:
        fh.write(struct.pack(f">I{array.ndim}I", magic, *array.shape))
        fh.write(array.tobytes())


def mnist_paths(root):
    """Locate the four MNIST files under ``root``, accepting ``.gz`` variants."""
    root = Path(root)
    found = {}
    for key, stem in _MNIST_FILES.items():
        for name in (stem, stem + ".gz", stem.replace("-idx", ".idx"), stem.replace("-idx", ".idx") + ".gz"):
            if (root / name).is_file():
                found[key] = root / name
                break
        else:
            raise FileNotFoundError(f"no {stem}[.gz] under {root}")
    return found


def default_mnist_dir():
    """``$MILC_DATA_DIR/mnist`` (or ``$MILC_DATA_DIR`` itself if it holds the files), else ``~/data/mnist``."""
    env = os.environ.get(DATA_ENV)
    if env:
        base = Path(env)
        return base / "mnist" if (base / "mnist").is_dir() else base
    return Path.home() / "data" / "mnist"


def _split(images_path, labels_path):
    images = read_idx(images_path, IMAGES_MAGIC)
    labels = read_idx(labels_path, LABELS_MAGIC)
    if images.shape[0] != labels.shape[0]:
        raise IDXFormatError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    x = images.reshape(images.shape[0], -1).astype(np.float32) / np.float32(255.0)
    return Batch(x, labels.astype(np.int64))


def load_mnist(root=None):
    """Return ``(train, test)`` batches with flattened 784-pixel inputs scaled to ``[0, 1]``."""
    paths = mnist_paths(root if root is not None else default_mnist_dir())
    train = _split(paths["train_images"], paths["train_labels"])
    test = _split(paths["test_images"], paths["test_labels"])
    return train, test


def git_blob_hash(path):
    """Content hash in the same format git uses for blobs."""
    data = Path(path).read_bytes()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()
