"""One-layer softmax classifier trained by mini-batch gradient descent.

This is the only trained component of the pipeline: an affine map from
the feature vector to 10 logits, a softmax, and the cross-entropy loss.
Gradients are the closed-form softmax/cross-entropy expressions; the
mini-batch gradient is the mean over the batch, so the learning rate
keeps its meaning across batch sizes.  Inverted dropout on the input
features is the sole regularizer.

Training is deterministic given the seed: one generator drives weight
init, the per-epoch shuffle, and every dropout mask, in a fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NUM_CLASSES = 10
LOG_CLAMP = 1e-12


class TrainingDivergedError(RuntimeError):
    """Raised when the loss goes non-finite (learning-rate overflow signal)."""


@dataclass
class OnnModel:
    """Weights (features x 10) and bias (10,)."""

    weights: np.ndarray
    bias: np.ndarray

    @property
    def num_features(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "OnnModel":
        return OnnModel(self.weights.copy(), self.bias.copy())


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 100
    epochs: int = 300
    dropout: float = 0.0
    seed: int = 0
    init_scale: float | None = None  # None -> sqrt(6 / (m + 10))

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")


@dataclass
class EpochMetrics:
    epoch: int
    train_acc: float
    test_acc: float
    train_loss: float


@dataclass
class TrainResult:
    model: OnnModel
    metrics: list[EpochMetrics] = field(default_factory=list)

    def accuracy_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        train = np.array([m.train_acc for m in self.metrics])
        test = np.array([m.test_acc for m in self.metrics])
        return train, test


def init_model(num_features: int, cfg: TrainConfig, rng: np.random.Generator) -> OnnModel:
    """Uniform [-a, a] weights with balanced fan-in/out scale, zero bias."""
    a = cfg.init_scale
    if a is None:
        a = np.sqrt(6.0 / (num_features + NUM_CLASSES))
    w = rng.uniform(-a, a, size=(num_features, NUM_CLASSES))
    return OnnModel(weights=w, bias=np.zeros(NUM_CLASSES))


def forward(model: OnnModel, x: np.ndarray) -> np.ndarray:
    """Softmax class probabilities for one feature vector or a batch.

    Logits are max-shifted before exponentiation; mathematically the
    same softmax, numerically safe for large entries.
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite feature input")
    u = x @ model.weights + model.bias
    u -= u.max(axis=-1, keepdims=True)
    e = np.exp(u)
    return e / e.sum(axis=-1, keepdims=True)


def one_hot(labels: np.ndarray) -> np.ndarray:
    t = np.zeros((len(labels), NUM_CLASSES))
    t[np.arange(len(labels)), labels] = 1.0
    return t


def loss(y: np.ndarray, t: np.ndarray) -> float:
    """Cross entropy -sum t log y, clamped away from log(0)."""
    return float(-np.sum(t * np.log(np.maximum(y, LOG_CLAMP)), axis=-1).mean())


def batch_gradients(x: np.ndarray, y: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean-loss gradients dW = X^T (Y - T) / M and dB = mean(Y - T)."""
    if x.shape[0] != y.shape[0] or y.shape != t.shape:
        raise ValueError(
            f"shape mismatch: X {x.shape}, Y {y.shape}, T {t.shape}"
        )
    m = x.shape[0]
    delta = y - t
    return x.T @ delta / m, delta.mean(axis=0)


def apply_dropout(x: np.ndarray, dropout: float, rng: np.random.Generator) -> np.ndarray:
    """Inverted dropout: zero each component w.p. D, scale survivors by 1/(1-D).

    The train-time scaling makes inference dropout-free.  Masks are
    drawn independently per component (and per row for a batch).
    """
    if dropout == 0.0:
        return x
    keep = rng.random(x.shape) >= dropout
    return x * keep / (1.0 - dropout)


def evaluate(model: OnnModel, features: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of argmax-correct predictions; ties go to the lowest index."""
    y = forward(model, features)
    return float(np.mean(np.argmax(y, axis=1) == labels))


def train(
    model: OnnModel,
    features: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
    test_features: np.ndarray | None = None,
    test_labels: np.ndarray | None = None,
) -> TrainResult:
    """Mini-batch gradient descent over the cached feature matrix.

    Per epoch: seeded shuffle, batches of ``cfg.batch_size`` (the last
    short batch is kept and averaged over its own size), a fresh dropout
    mask per sample per batch, then the plain gradient-descent update.
    Records train/test accuracy and the mean training loss per epoch.
    """
    if cfg.batch_size > len(features):
        raise ValueError(
            f"batch_size {cfg.batch_size} exceeds dataset size {len(features)}"
        )
    rng = np.random.default_rng(cfg.seed)
    model = model.copy()
    targets = one_hot(labels)
    result = TrainResult(model=model)
    num = len(features)
    for epoch in range(1, cfg.epochs + 1):
        perm = rng.permutation(num)
        epoch_loss = 0.0
        for start in range(0, num, cfg.batch_size):
            rows = perm[start : start + cfg.batch_size]
            xb = apply_dropout(features[rows], cfg.dropout, rng)
            yb = forward(model, xb)
            batch_loss = loss(yb, targets[rows])
            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch starting {start}; "
                    f"learning rate {cfg.learning_rate} is likely too large"
                )
            dw, db = batch_gradients(xb, yb, targets[rows])
            model.weights -= cfg.learning_rate * dw
            model.bias -= cfg.learning_rate * db
            epoch_loss += batch_loss * len(rows)
        test_acc = (
            evaluate(model, test_features, test_labels)
            if test_features is not None
            else float("nan")
        )
        result.metrics.append(
            EpochMetrics(
                epoch=epoch,
                train_acc=evaluate(model, features, labels),
                test_acc=test_acc,
                train_loss=epoch_loss / num,
            )
        )
    return result


def window_stats(values: np.ndarray, window: tuple[int, int]) -> tuple[float, float]:
    """Mean and std of a per-epoch series over a 1-based inclusive window."""
    lo, hi = window
    lo = max(lo, 1)
    hi = min(hi, len(values))
    if hi < lo:
        raise ValueError(f"epoch window {window} is empty for {len(values)} epochs")
    chunk = values[lo - 1 : hi]
    return float(chunk.mean()), float(chunk.std())
