"""On-disk artifact formats: propagators, feature matrices, PCA, checkpoints.

Feature extraction is the expensive stage, so its outputs are cached and
reused across classifier sweeps.  Every format is little-endian, raw
arrays behind a small fixed header; headers carry enough provenance to
refuse a cache file produced under different parameters instead of
silently serving stale data.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import PcaModel
from .dynamics import DriveParameters
from .onn import OnnModel
from .readout import ShotConfig

PROP_MAGIC = b"QRPG"
FEAT_MAGIC = b"QRFC"
PCA_MAGIC = b"QRPC"
VERSION = 1


class CacheMismatchError(RuntimeError):
    """Cache file exists but its header disagrees with the requested key."""


def _read_exact(f, count: int, path, what: str) -> bytes:
    data = f.read(count)
    if len(data) != count:
        raise OSError(f"{path}: truncated {what}: wanted {count} bytes, got {len(data)}")
    return data


# -- propagator ---------------------------------------------------------

_PROP_HEADER = "<IdddQdq"  # N, epsilon, j0t, alpha, periods, disorder_width, seed


def save_propagator(path, params: DriveParameters, prop: np.ndarray) -> None:
    """Raw little-endian complex-double matrix behind the drive-parameter header."""
    prop = np.ascontiguousarray(prop, dtype="<c16")
    with open(path, "wb") as f:
        f.write(PROP_MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(
            struct.pack(
                _PROP_HEADER,
                params.num_qubits,
                params.epsilon,
                params.j0t,
                params.alpha,
                params.periods,
                params.disorder_width,
                params.seed,
            )
        )
        f.write(prop.tobytes())


def load_propagator(path, params: DriveParameters) -> np.ndarray:
    """Load a cached propagator, refusing a header that mismatches ``params``."""
    with open(path, "rb") as f:
        if _read_exact(f, 4, path, "magic") != PROP_MAGIC:
            raise CacheMismatchError(f"{path}: not a propagator cache file")
        (version,) = struct.unpack("<I", _read_exact(f, 4, path, "version"))
        if version != VERSION:
            raise CacheMismatchError(f"{path}: unsupported version {version}")
        header = struct.unpack(
            _PROP_HEADER, _read_exact(f, struct.calcsize(_PROP_HEADER), path, "header")
        )
        expected = (
            params.num_qubits,
            params.epsilon,
            params.j0t,
            params.alpha,
            params.periods,
            params.disorder_width,
            params.seed,
        )
        if header != expected:
            raise CacheMismatchError(
                f"{path}: header {header} does not match requested parameters {expected}"
            )
        dim = 2**params.num_qubits
        raw = _read_exact(f, dim * dim * 16, path, "matrix")
    return np.frombuffer(raw, dtype="<c16").reshape(dim, dim).copy()


# -- PCA model -----------------------------------------------------------


def save_pca(path, pca: PcaModel) -> None:
    k, dim = pca.basis.shape
    with open(path, "wb") as f:
        f.write(PCA_MAGIC)
        f.write(struct.pack("<III", VERSION, k, dim))
        f.write(np.ascontiguousarray(pca.mean, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(pca.basis, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(pca.train_min, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(pca.train_max, dtype="<f8").tobytes())


def load_pca(path) -> PcaModel:
    with open(path, "rb") as f:
        if _read_exact(f, 4, path, "magic") != PCA_MAGIC:
            raise CacheMismatchError(f"{path}: not a PCA artifact")
        version, k, dim = struct.unpack("<III", _read_exact(f, 12, path, "header"))
        if version != VERSION:
            raise CacheMismatchError(f"{path}: unsupported version {version}")
        mean = np.frombuffer(_read_exact(f, dim * 8, path, "mean"), dtype="<f8")
        basis = np.frombuffer(
            _read_exact(f, k * dim * 8, path, "basis"), dtype="<f8"
        ).reshape(k, dim)
        lo = np.frombuffer(_read_exact(f, k * 8, path, "train_min"), dtype="<f8")
        hi = np.frombuffer(_read_exact(f, k * 8, path, "train_max"), dtype="<f8")
    return PcaModel(mean=mean.copy(), basis=basis.copy(), train_min=lo.copy(), train_max=hi.copy())


def pca_hash(pca: PcaModel) -> str:
    """Content hash of a PCA model, part of the feature-cache key."""
    h = hashlib.sha256()
    for arr in (pca.mean, pca.basis, pca.train_min, pca.train_max):
        h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return h.hexdigest()


# -- feature matrices ----------------------------------------------------

_FEAT_HEADER = "<QQBQq"  # num_samples, dim, mode, shots, seed


@dataclass(frozen=True)
class FeatureKey:
    """Provenance of one feature matrix; hashed into the cache header.

    ``dataset_digest`` pins the exact images/labels the features came
    from; without it a changed subsample with unchanged drive parameters
    would silently collide.
    """

    params: DriveParameters
    shots: ShotConfig
    pca_digest: str
    standardize_axis: str = "sample"
    split: str = "train"
    dataset_digest: str = ""

    def digest(self) -> bytes:
        h = hashlib.sha256()
        h.update(repr(self.params).encode())
        h.update(repr(self.shots).encode())
        h.update(self.pca_digest.encode())
        h.update(self.standardize_axis.encode())
        h.update(self.split.encode())
        h.update(self.dataset_digest.encode())
        return h.digest()


def dataset_hash(images: np.ndarray, labels: np.ndarray) -> str:
    """Content hash of an image/label pair."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(images).tobytes())
    h.update(np.ascontiguousarray(labels).tobytes())
    return h.hexdigest()


def save_features(path, key: FeatureKey, features: np.ndarray, labels: np.ndarray) -> None:
    features = np.ascontiguousarray(features, dtype="<f8")
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    mode_byte = 0 if key.shots.mode == "exact" else 1
    with open(path, "wb") as f:
        f.write(FEAT_MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(
            struct.pack(
                _FEAT_HEADER,
                features.shape[0],
                features.shape[1],
                mode_byte,
                key.shots.shots,
                key.shots.seed,
            )
        )
        f.write(key.digest())
        f.write(features.tobytes())
        f.write(labels.tobytes())


def load_features(path, key: FeatureKey) -> tuple[np.ndarray, np.ndarray]:
    """Load a cached feature matrix, refusing on any provenance mismatch."""
    with open(path, "rb") as f:
        if _read_exact(f, 4, path, "magic") != FEAT_MAGIC:
            raise CacheMismatchError(f"{path}: not a feature cache file")
        (version,) = struct.unpack("<I", _read_exact(f, 4, path, "version"))
        if version != VERSION:
            raise CacheMismatchError(f"{path}: unsupported version {version}")
        num, dim, mode_byte, shots, seed = struct.unpack(
            _FEAT_HEADER, _read_exact(f, struct.calcsize(_FEAT_HEADER), path, "header")
        )
        digest = _read_exact(f, 32, path, "key digest")
        if digest != key.digest():
            raise CacheMismatchError(
                f"{path}: cache was built under a different configuration "
                f"(key digest mismatch); refusing to reuse it"
            )
        expect_mode = 0 if key.shots.mode == "exact" else 1
        if (mode_byte, shots, seed) != (expect_mode, key.shots.shots, key.shots.seed):
            raise CacheMismatchError(f"{path}: shot header mismatch")
        features = np.frombuffer(
            _read_exact(f, num * dim * 8, path, "features"), dtype="<f8"
        ).reshape(num, dim)
        labels = np.frombuffer(_read_exact(f, num, path, "labels"), dtype=np.uint8)
    return features.copy(), labels.astype(np.int64)


def export_features_csv(path, features: np.ndarray, labels: np.ndarray, header_comment: str = "") -> None:
    """Plain-text dump (label, then features) for inspection."""
    with open(path, "w") as f:
        if header_comment:
            f.write(f"# {header_comment}\n")
        f.write("label," + ",".join(f"x{i}" for i in range(features.shape[1])) + "\n")
        for row, lab in zip(features, labels):
            f.write(f"{int(lab)}," + ",".join(f"{v:.17g}" for v in row) + "\n")


# -- classifier checkpoints ----------------------------------------------


def save_checkpoint(path, model: OnnModel, sidecar_text: str = "") -> None:
    """Flat binary (m, 10, W row-major, B) plus an optional text sidecar."""
    w = np.ascontiguousarray(model.weights, dtype="<f8")
    b = np.ascontiguousarray(model.bias, dtype="<f8")
    with open(path, "wb") as f:
        f.write(struct.pack("<QQ", w.shape[0], w.shape[1]))
        f.write(w.tobytes())
        f.write(b.tobytes())
    if sidecar_text:
        Path(str(path) + ".txt").write_text(sidecar_text)


def load_checkpoint(path) -> OnnModel:
    with open(path, "rb") as f:
        m, c = struct.unpack("<QQ", _read_exact(f, 16, path, "header"))
        w = np.frombuffer(_read_exact(f, m * c * 8, path, "weights"), dtype="<f8").reshape(m, c)
        b = np.frombuffer(_read_exact(f, c * 8, path, "bias"), dtype="<f8")
    return OnnModel(weights=w.copy(), bias=b.copy())
