import os

import numpy as np
import pytest

from qreservoir.data import ImageDataset, load_mnist_idx
from qreservoir.synthdata import make_dataset

# Real MNIST IDX files are used when QRESERVOIR_MNIST_DIR points at them;
# otherwise the procedural surrogate corpus stands in (same format, same
# value range, same label set).
MNIST_ENV = "QRESERVOIR_MNIST_DIR"


def _real_mnist(split: str) -> ImageDataset | None:
    base = os.environ.get(MNIST_ENV)
    if not base:
        return None
    names = {
        "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
        "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
    }[split]
    img = os.path.join(base, names[0])
    lab = os.path.join(base, names[1])
    for suffix in ("", ".gz"):
        if os.path.exists(img + suffix) and os.path.exists(lab + suffix):
            return load_mnist_idx(img + suffix, lab + suffix)
    return None


@pytest.fixture(scope="session")
def small_train_dataset() -> ImageDataset:
    real = _real_mnist("train")
    if real is not None:
        return real.subset(np.arange(600))
    return make_dataset(600, seed=42)


@pytest.fixture(scope="session")
def small_test_dataset() -> ImageDataset:
    real = _real_mnist("test")
    if real is not None:
        return real.subset(np.arange(200))
    return make_dataset(200, seed=43)
