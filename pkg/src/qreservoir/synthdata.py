"""Procedural handwritten-style digit corpus in MNIST's format.

This environment cannot download the real MNIST files, so experiments
and tests fall back to a deterministic surrogate: digits rendered from
OpenCV's Hershey vector fonts with randomized font, stroke width, scale,
rotation, shear, placement, blur and pixel noise, emitted as 28x28
grayscale with the same IDX container, value range and label set as
MNIST.  Point the experiment config at real MNIST files to drop the
surrogate; nothing downstream can tell the difference.

Rendering happens at 2x resolution and is downsampled with area
averaging so strokes get MNIST-like soft edges.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import ImageDataset, write_idx_images, write_idx_labels

_FONTS = None


def _fonts():
    global _FONTS
    if _FONTS is None:
        import cv2

        _FONTS = [
            cv2.FONT_HERSHEY_SIMPLEX,
            cv2.FONT_HERSHEY_PLAIN,
            cv2.FONT_HERSHEY_DUPLEX,
            cv2.FONT_HERSHEY_COMPLEX,
            cv2.FONT_HERSHEY_TRIPLEX,
            cv2.FONT_HERSHEY_COMPLEX_SMALL,
            cv2.FONT_HERSHEY_SCRIPT_SIMPLEX,
            cv2.FONT_HERSHEY_SCRIPT_COMPLEX,
        ]
    return _FONTS


def render_digit(digit: int, rng: np.random.Generator) -> np.ndarray:
    """One 28x28 uint8 image of ``digit``, white strokes on black."""
    import cv2

    big = 56
    canvas = np.zeros((big, big), dtype=np.uint8)
    font = _fonts()[rng.integers(0, len(_fonts()))]
    scale = rng.uniform(1.3, 2.1)
    thickness = int(rng.integers(2, 5))
    (tw, th), _ = cv2.getTextSize(str(digit), font, scale, thickness)
    x = (big - tw) // 2 + int(rng.integers(-4, 5))
    y = (big + th) // 2 + int(rng.integers(-4, 5))
    cv2.putText(canvas, str(digit), (x, y), font, scale, 255, thickness, cv2.LINE_AA)

    angle = rng.uniform(-20.0, 20.0)
    shear = rng.uniform(-0.15, 0.15)
    zoom = rng.uniform(0.85, 1.1)
    c = big / 2.0
    rot = cv2.getRotationMatrix2D((c, c), angle, zoom)
    rot[0, 1] += shear
    canvas = cv2.warpAffine(canvas, rot, (big, big), flags=cv2.INTER_LINEAR)

    img = cv2.resize(canvas, (28, 28), interpolation=cv2.INTER_AREA).astype(np.float64)
    if rng.random() < 0.7:
        sigma = rng.uniform(0.3, 0.9)
        img = cv2.GaussianBlur(img, (3, 3), sigma)
    img += rng.normal(0.0, 8.0, img.shape)
    return np.clip(img, 0, 255).astype(np.uint8)


def make_dataset(num_samples: int, seed: int) -> ImageDataset:
    """Balanced, shuffled synthetic dataset; bit-identical per (num, seed)."""
    rng = np.random.default_rng(seed)
    labels = np.arange(num_samples) % 10
    images = np.empty((num_samples, 784), dtype=np.uint8)
    for idx in range(num_samples):
        images[idx] = render_digit(int(labels[idx]), rng).reshape(784)
    perm = rng.permutation(num_samples)
    return ImageDataset(images=images[perm], labels=labels[perm].astype(np.int64))


def write_synthetic_idx(out_dir, train_count: int, test_count: int, seed: int) -> dict:
    """Write train/test IDX files under ``out_dir`` with MNIST's file names.

    Train and test sets come from different seed streams so they are
    disjoint draws from the same generator.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train = make_dataset(train_count, seed)
    test = make_dataset(test_count, seed + 1)
    paths = {
        "train_images": out_dir / "train-images-idx3-ubyte",
        "train_labels": out_dir / "train-labels-idx1-ubyte",
        "test_images": out_dir / "t10k-images-idx3-ubyte",
        "test_labels": out_dir / "t10k-labels-idx1-ubyte",
    }
    write_idx_images(paths["train_images"], train.images)
    write_idx_labels(paths["train_labels"], train.labels)
    write_idx_images(paths["test_images"], test.images)
    write_idx_labels(paths["test_labels"], test.labels)
    return {k: str(v) for k, v in paths.items()}
