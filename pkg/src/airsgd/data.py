"""Dataset ingestion, synthetic data generation, and device partitioning.

Supports the IDX binary container (the MNIST distribution format: big-endian
magic and dimension words followed by raw unsigned bytes) and synthetic
Gaussian class clusters for desk-scale runs. Partitioning mirrors a
realistic edge deployment: every device samples its local set independently
from the training pool, so devices overlap and some samples go unused.
"""

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng

__all__ = [
    "LocalDataset",
    "DataError",
    "IdxFormatError",
    "IdxTruncatedError",
    "IdxCountMismatchError",
    "load_idx",
    "write_idx_images",
    "write_idx_labels",
    "SyntheticSpec",
    "make_synthetic",
    "partition",
    "scale_to_unit",
]

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


class DataError(Exception):
    """Base class for dataset errors."""


class IdxFormatError(DataError):
    """Bad magic number or out-of-range content in an IDX file."""


class IdxTruncatedError(DataError):
    """IDX file shorter than its header promises."""


class IdxCountMismatchError(DataError):
    """Image and label files disagree on the sample count."""


@dataclass
class LocalDataset:
    """Feature matrix plus integer labels, optionally tagged with a device id."""

    features: np.ndarray  # (n, F) float64
    labels: np.ndarray  # (n,) int64
    device_id: Optional[int] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] == 0:
            raise DataError(f"features must be a nonempty (n, F) matrix, got {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise DataError(
                f"labels shape {self.labels.shape} does not match {self.features.shape[0]} samples"
            )

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices, device_id=None) -> "LocalDataset":
        return LocalDataset(self.features[indices], self.labels[indices], device_id=device_id)


def _read_exact(f, count: int, path, what: str) -> bytes:
    buf = f.read(count)
    if len(buf) != count:
        raise IdxTruncatedError(f"{path}: expected {count} bytes of {what}, got {len(buf)}")
    return buf


def load_idx(images_path, labels_path) -> LocalDataset:
    """Load an IDX image/label file pair into a dataset.

    Pixels become row-major float vectors with raw byte values (0..255);
    apply :func:`scale_to_unit` for [0, 1] features. Labels must lie in
    [0, 10).
    """
    with open(images_path, "rb") as f:
        magic, count, rows, cols = struct.unpack(">IIII", _read_exact(f, 16, images_path, "header"))
        if magic != IDX_IMAGE_MAGIC:
            raise IdxFormatError(f"{images_path}: bad image magic 0x{magic:08x}")
        pixels = np.frombuffer(
            _read_exact(f, count * rows * cols, images_path, "pixel data"), dtype=np.uint8
        )
    with open(labels_path, "rb") as f:
        magic, label_count = struct.unpack(">II", _read_exact(f, 8, labels_path, "header"))
        if magic != IDX_LABEL_MAGIC:
            raise IdxFormatError(f"{labels_path}: bad label magic 0x{magic:08x}")
        labels = np.frombuffer(_read_exact(f, label_count, labels_path, "label data"), dtype=np.uint8)
    if label_count != count:
        raise IdxCountMismatchError(
            f"{images_path} holds {count} images but {labels_path} holds {label_count} labels"
        )
    if labels.size and labels.max() >= 10:
        raise IdxFormatError(f"{labels_path}: label {labels.max()} outside [0, 10)")
    features = pixels.reshape(count, rows * cols).astype(np.float64)
    return LocalDataset(features, labels.astype(np.int64))


def write_idx_images(path, images: np.ndarray) -> None:
    """Write a (count, rows, cols) uint8 array as an IDX image file."""
    images = np.ascontiguousarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ValueError(f"images must be (count, rows, cols), got {images.shape}")
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, *images.shape))
        f.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    """Write a 1-d uint8 label array as an IDX label file."""
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    if labels.ndim != 1:
        raise ValueError(f"labels must be 1-d, got shape {labels.shape}")
    with open(path, "wb") as f:
        f.write(struct.pack(">II", IDX_LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes())


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian class-cluster dataset description.

    Cluster means sit at distance ``margin`` from the origin along mutually
    orthogonal random directions (unit-variance clusters), so margin >= 10
    gives an essentially separable problem. When classes outnumber features
    the means fall back to a line with spacing ``margin``.
    """

    classes: int
    features: int
    train_per_class: int
    test_per_class: int
    margin: float
    seed: int

    def __post_init__(self):
        if self.classes < 2:
            raise ValueError(f"need at least 2 classes, got {self.classes}")
        if self.features < 1:
            raise ValueError(f"need at least 1 feature, got {self.features}")
        if self.train_per_class < 1 or self.test_per_class < 1:
            raise ValueError("per-class sample counts must be positive")


def make_synthetic(spec: SyntheticSpec):
    """Generate disjoint (train, test) draws of Gaussian class clusters."""
    gen = rng.generator(rng.substream(spec.seed, rng.DATASET))
    C, F = spec.classes, spec.features
    if C <= F:
        raw = gen.standard_normal((F, C))
        q, _ = np.linalg.qr(raw)
        means = spec.margin * q.T  # (C, F), pairwise distance margin * sqrt(2)
    else:
        means = np.zeros((C, F))
        means[:, 0] = spec.margin * np.arange(C)

    def draw(per_class):
        feats = np.concatenate(
            [means[c] + gen.standard_normal((per_class, F)) for c in range(C)]
        )
        labels = np.repeat(np.arange(C), per_class)
        order = gen.permutation(per_class * C)
        return LocalDataset(feats[order], labels[order])

    return draw(spec.train_per_class), draw(spec.test_per_class)


def partition(train: LocalDataset, M: int, per_device: int, seed) -> list:
    """Assign each of M devices a random local subset of the training pool.

    Each device draws ``per_device`` distinct sample indices uniformly,
    independently of the other devices: local sets may overlap across
    devices and some training samples may remain unassigned.
    """
    if M < 1:
        raise ValueError(f"device count M must be >= 1, got {M}")
    if per_device > len(train):
        raise ValueError(f"per_device={per_device} exceeds dataset size {len(train)}")
    if per_device < 1:
        raise ValueError(f"per_device must be >= 1, got {per_device}")
    gen = rng.generator(seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed))
    devices = []
    for m in range(1, M + 1):
        indices = gen.choice(len(train), size=per_device, replace=False)
        devices.append(train.subset(indices, device_id=m))
    return devices


def scale_to_unit(dataset: LocalDataset) -> LocalDataset:
    """Rescale 0..255 pixel features into [0, 1]."""
    return LocalDataset(dataset.features / 255.0, dataset.labels, device_id=dataset.device_id)
