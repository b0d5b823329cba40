"""Experiment configuration: flat key=value files plus CLI overrides.

A config file is plain text, one ``key = value`` per line, ``#`` for
comments.  Any key can be overridden from the command line; the full,
resolved configuration is hashed and that hash is embedded in every
output CSV so results stay traceable to the settings that produced them.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .dynamics import DriveParameters
from .onn import TrainConfig
from .readout import ShotConfig

MNIST_NAMES = {
    "train_images": ("train-images-idx3-ubyte", "train-images.idx3-ubyte"),
    "train_labels": ("train-labels-idx1-ubyte", "train-labels.idx1-ubyte"),
    "test_images": ("t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"),
    "test_labels": ("t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    # quantum hidden layer
    num_qubits: int = 11
    epsilon: float = 0.03
    j0t: float = 0.06
    alpha: float = 1.51
    periods: int = 50
    disorder_width: float = 0.0
    drive_seed: int = 0
    # measurement layer
    shot_mode: str = "exact"
    shots: int = 1024
    shot_seed: int = 0
    standardize_axis: str = "sample"
    # classifier
    learning_rate: float = 0.1
    batch_size: int = 100
    epochs: int = 300
    dropout: float = 0.0
    train_seed: int = 0
    init_scale: float = 0.0  # 0 -> balanced fan-in/out default
    # encoding
    pca_components: int = 0  # 0 -> 2 * num_qubits
    # dataset
    data_dir: str = ""
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    train_subsample: int = 12000
    test_subsample: int = 2000
    subsample_seed: int = 0
    # experiment harness
    cache_dir: str = "cache"
    out_dir: str = "runs"
    epoch_window: str = "200:300"
    baseline: str = "none"  # none | onn_784 | epsilon_zero
    features_csv: bool = False
    # sweeps
    epsilon_sweep: tuple = (0.0, 0.01, 0.03, 0.1)
    period_sweep: tuple = (1, 10, 50)
    qubit_sweep: tuple = (7, 9, 11)
    dropout_sweep: tuple = (0.0, 0.05, 0.10, 0.15)

    def resolved_pca_components(self) -> int:
        return self.pca_components if self.pca_components > 0 else 2 * self.num_qubits

    def drive_parameters(self, **overrides) -> DriveParameters:
        kw = dict(
            num_qubits=self.num_qubits,
            epsilon=self.epsilon,
            j0t=self.j0t,
            alpha=self.alpha,
            periods=self.periods,
            disorder_width=self.disorder_width,
            seed=self.drive_seed,
        )
        kw.update(overrides)
        return DriveParameters(**kw)

    def shot_config(self) -> ShotConfig:
        return ShotConfig(mode=self.shot_mode, shots=self.shots, seed=self.shot_seed)

    def train_config(self, **overrides) -> TrainConfig:
        kw = dict(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            dropout=self.dropout,
            seed=self.train_seed,
            init_scale=self.init_scale if self.init_scale > 0 else None,
        )
        kw.update(overrides)
        return TrainConfig(**kw)

    def window(self) -> tuple[int, int]:
        lo, hi = self.epoch_window.split(":")
        return int(lo), int(hi)

    def dataset_paths(self) -> dict:
        """Resolve the four IDX paths from explicit keys or ``data_dir``."""
        paths = {}
        for key in ("train_images", "train_labels", "test_images", "test_labels"):
            explicit = getattr(self, key)
            if explicit:
                paths[key] = Path(explicit)
                continue
            if not self.data_dir:
                raise FileNotFoundError(
                    f"no path for {key}: set {key}= or data_dir= in the config"
                )
            base = Path(self.data_dir)
            for name in MNIST_NAMES[key]:
                for candidate in (base / name, base / (name + ".gz")):
                    if candidate.exists():
                        paths[key] = candidate
                        break
                if key in paths:
                    break
            if key not in paths:
                raise FileNotFoundError(
                    f"none of {MNIST_NAMES[key]} (or .gz) found under {base} for {key}"
                )
        return paths

    def hash(self) -> str:
        """Stable digest of the experiment-defining keys.

        Output locations (cache_dir, out_dir) are excluded: two runs that
        differ only in where results land are the same experiment and
        must produce bit-identical artifacts.
        """
        skip = {"cache_dir", "out_dir"}
        items = sorted(
            (f.name, repr(getattr(self, f.name)))
            for f in fields(self)
            if f.name not in skip
        )
        payload = ";".join(f"{k}={v}" for k, v in items)
        return hashlib.sha1(payload.encode()).hexdigest()[:12]


_FLOAT_TUPLES = {"epsilon_sweep", "dropout_sweep"}
_INT_TUPLES = {"period_sweep", "qubit_sweep"}
_BOOLS = {"features_csv"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _FLOAT_TUPLES:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    if key in _INT_TUPLES:
        return tuple(int(v) for v in raw.split(",") if v.strip())
    if key in _BOOLS:
        return raw.lower() in ("1", "true", "yes", "on")
    for f in fields(ExperimentConfig):
        if f.name == key:
            if f.type in ("int", int):
                return int(raw)
            if f.type in ("float", float):
                return float(raw)
            return raw
    raise KeyError(f"unknown config key {key!r}")


def load_config(path=None, overrides: list[str] | None = None) -> ExperimentConfig:
    """Build a config from an optional file plus ``key=value`` overrides."""
    values = {}
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, raw = line.split("=", 1)
            key = key.strip()
            values[key] = _parse_value(key, raw)
    for item in overrides or []:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        values[key] = _parse_value(key, raw)
    return ExperimentConfig(**values)


def with_values(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
