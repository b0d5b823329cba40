"""Quantum-reservoir digit recognition at desk scale.

A dense statevector simulator of a kicked-Ising drive (the fixed quantum
hidden layer), network diagnostics of its effective Hamiltonian, and the
classical encode/measure/train pipeline around it.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .data import (
    EncodedSample,
    ImageDataset,
    PcaModel,
    encode_angles,
    fit_pca,
    load_mnist_idx,
    prepare_state,
)
from .dynamics import (
    DriveParameters,
    build_u1,
    build_u2,
    evolve,
    floquet_operator,
    propagator,
)
from .network import (
    DegreeHistogram,
    EffectiveHamiltonian,
    EffectiveNetwork,
    degree_distribution,
    effective_hamiltonian,
    percolation_network,
    powerlaw_diagnostic,
)
from .onn import OnnModel, TrainConfig, evaluate, forward, train
from .pipeline import extract_features
from .readout import ShotConfig, measure_distribution, standardize

__version__ = "0.1.0"

__all__ = [
    "DriveParameters",
    "build_u1",
    "build_u2",
    "floquet_operator",
    "propagator",
    "evolve",
    "EffectiveHamiltonian",
    "EffectiveNetwork",
    "DegreeHistogram",
    "effective_hamiltonian",
    "percolation_network",
    "degree_distribution",
    "powerlaw_diagnostic",
    "ImageDataset",
    "PcaModel",
    "EncodedSample",
    "load_mnist_idx",
    "fit_pca",
    "encode_angles",
    "prepare_state",
    "ShotConfig",
    "measure_distribution",
    "standardize",
    "OnnModel",
    "TrainConfig",
    "forward",
    "train",
    "evaluate",
    "extract_features",
    "KERNEL_BACKEND",
    "__version__",
]
