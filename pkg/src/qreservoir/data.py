"""Image ingestion and the classical-to-quantum encoding front end.

The input layer maps one 28x28 grayscale image to N qubits: project the
centered image onto the top 2N principal components of the training set,
rescale each coefficient to an angle in [0, pi] using that component's
training min/max, then use the first N angles as polar angles theta and
the last N as phases phi of single-qubit states

    |psi_l> = cos(theta_l / 2)|0> + e^{i phi_l} sin(theta_l / 2)|1>.

The product of those N states is the reservoir input.  Test images reuse
the training mean, basis and min/max; coefficients that land outside the
training range are clamped to the ends of [0, pi].
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049
PIXELS = 784


class IdxFormatError(ValueError):
    """Raised on malformed IDX files (bad magic, truncation, count mismatch)."""


@dataclass(frozen=True)
class ImageDataset:
    """Flattened byte images (n, 784) with integer labels 0-9."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise IdxFormatError(
                f"image/label count mismatch: {len(self.images)} images vs "
                f"{len(self.labels)} labels"
            )

    def __len__(self) -> int:
        return len(self.images)

    def subset(self, indices: np.ndarray) -> "ImageDataset":
        return ImageDataset(images=self.images[indices], labels=self.labels[indices])


def _open_maybe_gz(path):
    p = str(path)
    if p.endswith(".gz"):
        return gzip.open(p, "rb")
    return open(p, "rb")


def _read_exact(f, count: int, path, what: str) -> bytes:
    data = f.read(count)
    if len(data) != count:
        raise IdxFormatError(
            f"{path}: truncated while reading {what}: wanted {count} bytes, "
            f"got {len(data)} (at offset {f.tell() - len(data)})"
        )
    return data


def load_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into a (count, 784) uint8 array."""
    with _open_maybe_gz(path) as f:
        magic, count, rows, cols = struct.unpack(">iiii", _read_exact(f, 16, path, "header"))
        if magic != IMAGE_MAGIC:
            raise IdxFormatError(
                f"{path}: bad magic {magic} at offset 0, expected {IMAGE_MAGIC} "
                f"for an image file"
            )
        if rows * cols != PIXELS:
            raise IdxFormatError(
                f"{path}: expected 28x28 images, file declares {rows}x{cols}"
            )
        raw = _read_exact(f, count * rows * cols, path, f"{count} images")
    return np.frombuffer(raw, dtype=np.uint8).reshape(count, PIXELS)


def load_idx_labels(path) -> np.ndarray:
    """Parse an IDX label file into a (count,) int64 array."""
    with _open_maybe_gz(path) as f:
        magic, count = struct.unpack(">ii", _read_exact(f, 8, path, "header"))
        if magic != LABEL_MAGIC:
            raise IdxFormatError(
                f"{path}: bad magic {magic} at offset 0, expected {LABEL_MAGIC} "
                f"for a label file"
            )
        raw = _read_exact(f, count, path, f"{count} labels")
    return np.frombuffer(raw, dtype=np.uint8).astype(np.int64)


def load_mnist_idx(images_path, labels_path) -> ImageDataset:
    """Load a paired IDX image/label set, checking that the counts agree."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise IdxFormatError(
            f"count mismatch: {images_path} has {len(images)} images but "
            f"{labels_path} has {len(labels)} labels"
        )
    return ImageDataset(images=images, labels=labels)


def write_idx_images(path, images: np.ndarray) -> None:
    """Write (n, 784) uint8 images in IDX format (inverse of the loader)."""
    images = np.asarray(images, dtype=np.uint8).reshape(-1, PIXELS)
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", IMAGE_MAGIC, len(images), 28, 28))
        f.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">ii", LABEL_MAGIC, len(labels)))
        f.write(labels.tobytes())


@dataclass(frozen=True)
class PcaModel:
    """Training-set PCA basis plus the per-component projection extrema.

    ``basis`` rows are orthonormal 784-vectors ordered by descending
    explained variance; ``train_min``/``train_max`` are the min/max of
    the training projections onto each row, the anchors of the angle map.
    """

    mean: np.ndarray
    basis: np.ndarray
    train_min: np.ndarray
    train_max: np.ndarray

    @property
    def num_components(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class EncodedSample:
    """Bloch angles for one image: theta and phi per qubit, in [0, pi]."""

    thetas: np.ndarray
    phis: np.ndarray


def fit_pca(train: ImageDataset, num_components: int | None) -> PcaModel:
    """Mean-centered PCA of the training images.

    Basis vectors are the top right singular vectors of the centered
    data matrix, sign-fixed so each vector's largest-|entry| coordinate
    is positive (SVD signs are otherwise arbitrary and would scramble
    the angle map between runs).  ``num_components=None`` keeps every
    informative component (the numerical rank), which is what the
    no-quantum-layer baseline uses.
    """
    if len(train) == 0:
        raise ValueError("fit_pca needs a nonempty training set")
    if num_components is not None and num_components > PIXELS:
        raise ValueError(f"num_components {num_components} exceeds {PIXELS}")
    x = train.images.astype(np.float64)
    mean = x.mean(axis=0)
    xc = x - mean
    _, s, vt = np.linalg.svd(xc, full_matrices=False)
    rank = int(np.sum(s > s[0] * max(xc.shape) * np.finfo(np.float64).eps)) if s[0] > 0 else 0
    if num_components is None:
        num_components = rank
    if num_components > rank:
        raise ValueError(
            f"num_components {num_components} exceeds the data rank {rank}"
        )
    if num_components == 0:
        raise ValueError("training data has rank 0 (all images identical)")
    basis = vt[:num_components].copy()
    flip = np.sign(basis[np.arange(num_components), np.argmax(np.abs(basis), axis=1)])
    basis *= flip[:, None]
    proj = xc @ basis.T
    return PcaModel(
        mean=mean,
        basis=basis,
        train_min=proj.min(axis=0),
        train_max=proj.max(axis=0),
    )


def project(pca: PcaModel, images: np.ndarray) -> np.ndarray:
    """Centered projections onto the PCA basis, (n, num_components)."""
    x = np.atleast_2d(np.asarray(images, dtype=np.float64))
    return (x - pca.mean) @ pca.basis.T


def angles_from_projections(pca: PcaModel, proj: np.ndarray) -> np.ndarray:
    """Affine map of each coefficient to [0, pi], clamped outside the range."""
    span = pca.train_max - pca.train_min
    ang = np.pi * (proj - pca.train_min) / span
    return np.clip(ang, 0.0, np.pi)


def encode_angles(pca: PcaModel, image: np.ndarray) -> EncodedSample:
    """Angles (theta, phi) for one image; first half theta, second half phi."""
    ang = angles_from_projections(pca, project(pca, image))[0]
    n = pca.num_components // 2
    return EncodedSample(thetas=ang[:n], phis=ang[n:])


def encode_angles_batch(pca: PcaModel, images: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(thetas, phis) arrays of shape (n, N) for a batch of images."""
    ang = angles_from_projections(pca, project(pca, images))
    n = pca.num_components // 2
    return ang[:, :n], ang[:, n:]


def prepare_state(enc: EncodedSample) -> np.ndarray:
    """Product state of the N encoded qubits as a 2^N amplitude vector."""
    state = _kernels.product_states(enc.thetas[None, :], enc.phis[None, :])[0]
    return state


def stratified_subsample(labels: np.ndarray, size: int, seed: int) -> np.ndarray:
    """Seeded label-stratified index selection, returned in ascending order.

    Per-class quotas follow the class proportions (largest-remainder
    rounding), so a balanced set stays balanced.
    """
    labels = np.asarray(labels)
    total = len(labels)
    if size > total:
        raise ValueError(f"cannot subsample {size} from {total}")
    if size == total:
        return np.arange(total)
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(labels, return_counts=True)
    exact = counts * size / total
    quotas = np.floor(exact).astype(np.int64)
    remainder = size - quotas.sum()
    order = np.argsort(-(exact - quotas), kind="stable")
    quotas[order[:remainder]] += 1
    picked = []
    for cls, quota in zip(classes, quotas):
        idx = np.nonzero(labels == cls)[0]
        picked.append(rng.choice(idx, size=quota, replace=False))
    return np.sort(np.concatenate(picked))
