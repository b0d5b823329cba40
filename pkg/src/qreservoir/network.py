"""Network picture of the Floquet dynamics.

Any Hamiltonian over the computational basis can be read as a weighted
graph: diagonal entries E_i are node energies, off-diagonal entries W_ij
are hopping strengths.  Keeping only the near-resonant hops, i.e. pairs
with |E_j - E_i| < |W_ij| (the percolation rule), turns the effective
Hamiltonian of the drive into a network whose degree distribution is the
structural diagnostic of interest: a perfect pi pulse gives isolated
dimers, small rotation errors grow a heavy-tailed, scale-free-looking
network.

The effective Hamiltonian is H_eff = (i/T) log F on the principal branch
of the logarithm.  It is computed from the complex Schur form of F:
Schur vectors of a normal matrix are an orthonormal eigenbasis even
inside degenerate eigenvalue clusters, which keeps H_eff Hermitian
without any explicit re-orthonormalization step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .dynamics import unitarity_defect

DEFAULT_WEIGHT_FLOOR = 1e-12


class DegreeFitError(ValueError):
    """Raised when a histogram has too few usable bins for a power-law fit.

    Distinct from a fit that simply comes back with a poor r^2.
    """


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Hermitian generator whose single-period evolution equals F."""

    matrix: np.ndarray

    @property
    def diag_energies(self) -> np.ndarray:
        """Node energies E_i (real diagonal)."""
        return np.real(np.diag(self.matrix))

    @property
    def offdiag(self) -> np.ndarray:
        """Hopping matrix W_ij: a copy of H with the diagonal zeroed."""
        w = self.matrix.copy()
        np.fill_diagonal(w, 0.0)
        return w

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())


@dataclass(frozen=True)
class EffectiveNetwork:
    """Percolation graph over the 2^N basis states.

    Edges are stored as parallel arrays (i, j, weight) with i < j, sorted
    by (i, j), each unordered pair at most once.
    """

    num_nodes: int
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_weight: np.ndarray

    @property
    def num_edges(self) -> int:
        return len(self.edge_i)

    def degrees(self) -> np.ndarray:
        """Per-node degree vector."""
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        np.add.at(deg, self.edge_i, 1)
        np.add.at(deg, self.edge_j, 1)
        return deg


@dataclass(frozen=True)
class DegreeHistogram:
    """Pairs (k, count) over the degrees that actually occur.

    Counts sum to the number of nodes; bins with zero count are not
    materialized.
    """

    ks: np.ndarray
    counts: np.ndarray
    num_nodes: int = field(default=0)

    def as_dict(self) -> dict:
        return {int(k): int(c) for k, c in zip(self.ks, self.counts)}


def effective_hamiltonian(f: np.ndarray, unitary_tol: float = 1e-9) -> EffectiveHamiltonian:
    """H_eff = (i/T) log F with quasi-energies on the principal branch.

    F is unitarily diagonalized as F = Z diag(e^{i theta}) Z^dagger via
    its complex Schur form, theta is folded into (-pi, pi], and
    H_eff = Z diag(-theta / T) Z^dagger with T = 1.  The result is
    hermitized as (H + H^dagger)/2 to scrub rounding residue.
    """
    defect = unitarity_defect(f)
    if defect > unitary_tol:
        raise ValueError(
            f"effective_hamiltonian needs a unitary input; defect {defect:.3e} "
            f"exceeds {unitary_tol:.1e}"
        )
    t, z = scipy.linalg.schur(f, output="complex")
    theta = np.angle(np.diag(t))
    h = (z * (-theta)) @ z.conj().T
    h = 0.5 * (h + h.conj().T)
    return EffectiveHamiltonian(matrix=h)


def percolation_network(
    heff: EffectiveHamiltonian, weight_floor: float = DEFAULT_WEIGHT_FLOOR
) -> EffectiveNetwork:
    """Keep every unordered pair that passes the percolation condition.

    Pair (i, j) is an edge iff |E_j - E_i| < |W_ij| strictly, with a
    numerical floor on |W_ij| to suppress rounding-noise couplings.
    """
    energies = heff.diag_energies
    i, j, w = _kernels.percolation_edges(energies, heff.matrix, weight_floor)
    return EffectiveNetwork(
        num_nodes=heff.matrix.shape[0], edge_i=i, edge_j=j, edge_weight=w
    )


def degree_distribution(net: EffectiveNetwork) -> DegreeHistogram:
    """Histogram of node degrees; counts sum to the node count."""
    deg = net.degrees()
    counts = np.bincount(deg)
    ks = np.nonzero(counts)[0]
    return DegreeHistogram(
        ks=ks.astype(np.int64),
        counts=counts[ks].astype(np.int64),
        num_nodes=net.num_nodes,
    )


def powerlaw_diagnostic(hist: DegreeHistogram) -> tuple[float, float]:
    """Least-squares slope and r^2 of log10 count vs log10 k, k >= 1.

    A qualitative scale-free indicator, not a rigorous estimator: single
    network instances can and do deviate from a clean power law, so the
    numbers are meant for comparison across parameter settings.
    """
    mask = (hist.ks >= 1) & (hist.counts >= 1)
    if int(mask.sum()) < 3:
        raise DegreeFitError(
            f"power-law fit needs >= 3 nonzero bins at k >= 1, found {int(mask.sum())}"
        )
    x = np.log10(hist.ks[mask].astype(np.float64))
    y = np.log10(hist.counts[mask].astype(np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r_squared)
