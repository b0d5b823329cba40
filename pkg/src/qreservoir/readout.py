"""Measurement layer: quantum state out, standardized feature vector in.

The evolved state is measured in the computational basis.  ``exact``
mode uses the full amplitude information (the infinite-shot limit, the
default since the simulator has the amplitudes anyway); ``sampled`` mode
draws a finite multinomial sample to model experimental shot noise.  The
resulting distribution is z-scored to mean 0, variance 1 per sample
before it reaches the classifier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

DEGENERATE_STD = 1e-15


@dataclass(frozen=True)
class ShotConfig:
    mode: str = "exact"
    shots: int = 1024
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise ValueError(f"sampled mode needs shots >= 1, got {self.shots}")


def measure_distribution(state: np.ndarray, cfg: ShotConfig, index: int = 0) -> np.ndarray:
    """Computational-basis outcome distribution of a normalized state.

    In sampled mode the generator is seeded from (cfg.seed, index) so a
    dataset-wide sweep is reproducible yet independent across samples.
    """
    p = state.real**2 + state.imag**2
    if cfg.mode == "exact":
        return p
    rng = np.random.default_rng([cfg.seed, index])
    counts = rng.multinomial(cfg.shots, p / p.sum())
    return counts / cfg.shots


def sample_distributions(p: np.ndarray, cfg: ShotConfig, start_index: int = 0) -> np.ndarray:
    """Row-wise multinomial relative frequencies for a batch of distributions."""
    out = np.empty_like(p)
    for row in range(p.shape[0]):
        rng = np.random.default_rng([cfg.seed, start_index + row])
        out[row] = rng.multinomial(cfg.shots, p[row] / p[row].sum()) / cfg.shots
    return out


def standardize(p: np.ndarray) -> np.ndarray:
    """Per-sample z-score with the population std; constant input -> zeros."""
    return _kernels.standardize_rows(np.atleast_2d(p))[0] if p.ndim == 1 else _kernels.standardize_rows(p)


def standardize_features(p: np.ndarray, axis: str = "sample") -> np.ndarray:
    """Feature standardization with a configurable axis.

    ``sample`` (default) z-scores each row over its 2^N components;
    ``feature`` z-scores each column over the dataset, the alternative
    reading kept available for sensitivity checks.
    """
    if axis == "sample":
        return _kernels.standardize_rows(p)
    if axis == "feature":
        mean = p.mean(axis=0, keepdims=True)
        std = p.std(axis=0, keepdims=True)
        ok = std >= DEGENERATE_STD
        return np.where(ok, (p - mean) / np.where(ok, std, 1.0), 0.0)
    raise ValueError(f"axis must be 'sample' or 'feature', got {axis!r}")
