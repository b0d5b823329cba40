"""End-to-end feature extraction: image -> angles -> state -> F^n -> z-score.

The propagator F^n is computed (or loaded) exactly once per parameter
set; each sample then costs one product-state synthesis and one
matrix-vector product.  Work proceeds in chunks so the complex state
batches never exceed a few tens of MB regardless of dataset size.

Per-sample work is pure; chunk boundaries affect nothing but the BLAS
rounding of the evolution product (last-bit level), and with the fixed
default chunk the caches are bit-identical across reruns of the same
configuration.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import _kernels, cache
from .data import ImageDataset, PcaModel, encode_angles_batch
from .dynamics import DriveParameters, propagator
from .readout import ShotConfig, sample_distributions, standardize_features

DEFAULT_CHUNK = 1024


def extract_features(
    dataset: ImageDataset,
    pca: PcaModel,
    params: DriveParameters,
    shots: ShotConfig = ShotConfig(),
    standardize_axis: str = "sample",
    prop: np.ndarray | None = None,
    chunk: int = DEFAULT_CHUNK,
) -> np.ndarray:
    """Feature matrix (num_samples, 2^N) for a whole dataset.

    ``prop`` lets callers pass a precomputed/cached F^n; otherwise it is
    built here once.
    """
    if pca.num_components != 2 * params.num_qubits:
        raise ValueError(
            f"PCA has {pca.num_components} components but {params.num_qubits} "
            f"qubits need {2 * params.num_qubits}"
        )
    if prop is None:
        prop = propagator(params)
    prop_t = np.ascontiguousarray(prop.T)
    num = len(dataset)
    dim = params.dim
    probs = np.empty((num, dim), dtype=np.float64)
    for start in range(0, num, chunk):
        stop = min(start + chunk, num)
        thetas, phis = encode_angles_batch(pca, dataset.images[start:stop])
        states = _kernels.product_states(thetas, phis)
        evolved = states @ prop_t
        p = _kernels.probabilities(evolved)
        if shots.mode == "sampled":
            p = sample_distributions(p, shots, start_index=start)
        probs[start:stop] = p
    if standardize_axis == "sample":
        return _kernels.standardize_rows(probs)
    return standardize_features(probs, axis=standardize_axis)


def classical_pca_features(dataset: ImageDataset, pca: PcaModel, standardize_axis: str = "sample") -> np.ndarray:
    """Baseline features without the quantum layer: z-scored PCA projections."""
    from .data import project

    proj = project(pca, dataset.images)
    return standardize_features(proj, axis=standardize_axis)


def propagator_cached(params: DriveParameters, cache_dir) -> np.ndarray:
    """Load F^n from ``cache_dir`` or compute and store it."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    name = (
        f"prop_N{params.num_qubits}_eps{params.epsilon:g}_j{params.j0t:g}_"
        f"a{params.alpha:g}_n{params.periods}_W{params.disorder_width:g}_"
        f"s{params.seed}.bin"
    )
    path = cache_dir / name
    if path.exists():
        return cache.load_propagator(path, params)
    prop = propagator(params)
    cache.save_propagator(path, params, prop)
    return prop


def features_cached(
    dataset: ImageDataset,
    pca: PcaModel,
    params: DriveParameters,
    shots: ShotConfig,
    cache_dir,
    split: str,
    standardize_axis: str = "sample",
    chunk: int = DEFAULT_CHUNK,
) -> tuple[np.ndarray, np.ndarray, Path]:
    """Feature matrix + labels from cache, extracting and caching on a miss.

    The cache key covers the drive parameters, shot configuration, PCA
    content hash, standardization axis and split name; a file whose
    header disagrees raises instead of being reused.
    """
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = cache.FeatureKey(
        params=params,
        shots=shots,
        pca_digest=cache.pca_hash(pca),
        standardize_axis=standardize_axis,
        split=split,
        dataset_digest=cache.dataset_hash(dataset.images, dataset.labels),
    )
    path = cache_dir / f"features_{split}_{key.digest().hex()[:16]}.bin"
    if path.exists():
        features, labels = cache.load_features(path, key)
        return features, labels, path
    prop = propagator_cached(params, cache_dir)
    features = extract_features(
        dataset, pca, params, shots, standardize_axis, prop=prop, chunk=chunk
    )
    cache.save_features(path, key, features, dataset.labels)
    return features, dataset.labels.astype(np.int64), path
