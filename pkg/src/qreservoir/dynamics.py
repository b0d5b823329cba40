"""Kicked-Ising drive and Floquet evolution on a dense statevector.

The drive alternates between a global x-rotation and a long-range Ising
phase over one period T:

    first half  (duration T1):  H1 = g (1 - epsilon) sum_l sigma_x^l
    second half (duration T2):  H2 = sum_{lm} J_lm sigma_z^l sigma_z^m
                                     + sum_l D_l sigma_z^l

with J_lm = J0 / |l - m|^alpha and g chosen so that 2 g T1 = pi, i.e. at
epsilon = 0 the first half is a perfect global pi pulse.  The Ising sum
runs over ordered pairs (each unordered pair twice), so with hbar = 1,
T = 1, T1 = T2 = 1/2 the phase an unordered pair accrues per period is
exactly j0t / |l - m|^alpha: ``j0t`` is the dimensionless coupling J0*T.
The optional onsite disorder D_l is drawn once from Uniform[0, W].

Basis convention: computational basis index i is read little-endian, bit
l of i is the sigma_z eigenstate of qubit l, and sigma_z|0> = +|0>.

Everything here is a dense 2^N x 2^N matrix; a guard caps N at
``MAX_QUBITS`` so nothing silently tries to allocate beyond desk scale.
All functions are pure and their outputs immutable by convention, so
results can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Dense-matrix feasibility cap (2^12 = 4096 amplitudes). Raise it only if
# you know the memory cost: matrices grow as 4^N.
MAX_QUBITS = 12

T1 = 0.5
T2 = 0.5


class ConfigurationError(ValueError):
    """Raised when drive parameters are outside the supported regime."""


@dataclass(frozen=True)
class DriveParameters:
    """All physical knobs of the periodic drive.

    ``epsilon`` is the rotation error of the x pulse, ``j0t`` the
    dimensionless Ising coupling J0*T, ``alpha`` the power-law exponent
    of the coupling decay, ``periods`` the number of drive periods the
    input state evolves for, and ``disorder_width`` the width W of the
    optional Uniform[0, W] onsite sigma_z disorder (0 disables it).
    """

    num_qubits: int
    epsilon: float = 0.03
    j0t: float = 0.06
    alpha: float = 1.51
    periods: int = 50
    disorder_width: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ConfigurationError(f"num_qubits must be >= 1, got {self.num_qubits}")
        if self.num_qubits > MAX_QUBITS:
            raise ConfigurationError(
                f"num_qubits={self.num_qubits} exceeds the dense-matrix cap "
                f"MAX_QUBITS={MAX_QUBITS} (2^N amplitudes)"
            )
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.alpha <= 0.0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if self.periods < 0:
            raise ConfigurationError(f"periods must be >= 0, got {self.periods}")
        if self.disorder_width < 0.0:
            raise ConfigurationError(
                f"disorder_width must be >= 0, got {self.disorder_width}"
            )

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    def disorder_fields(self) -> np.ndarray:
        """Onsite sigma_z fields D_l ~ Uniform[0, W], sampled once per seed."""
        if self.disorder_width == 0.0:
            return np.zeros(self.num_qubits)
        rng = np.random.default_rng(self.seed)
        return rng.uniform(0.0, self.disorder_width, self.num_qubits)


def coupling_matrix(params: DriveParameters) -> np.ndarray:
    """Pair couplings J_lm = J0 / |l-m|^alpha on the upper triangle (l < m).

    The Ising double sum visits both orderings, so the effective phase
    per unordered pair over T2 is 2 J_lm T2 = J_lm T.  With T = 1 the
    bare coupling J0 is ``params.j0t``.
    """
    n = params.num_qubits
    J = np.zeros((n, n))
    for l in range(n):
        for m in range(l + 1, n):
            J[l, m] = params.j0t / abs(l - m) ** params.alpha
    return J


def basis_z_values(num_qubits: int) -> np.ndarray:
    """(2^N, N) array of sigma_z eigenvalues z_l = +-1 for every basis state.

    Row i holds z_l for basis state |i>, little-endian: bit l of i set
    means qubit l is in |1> and z_l = -1.
    """
    idx = np.arange(2**num_qubits, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(num_qubits)) & 1
    return 1.0 - 2.0 * bits


def build_u1(params: DriveParameters) -> np.ndarray:
    """First half-period: U1 = exp(-i H1 T1), a product of x rotations.

    With 2 g T1 = pi the single-qubit factor is a rotation by the angle
    a = (pi/2)(1 - epsilon) about x, so U1 is the N-fold Kronecker power
    of ((cos a, -i sin a), (-i sin a, cos a)).
    """
    a = 0.5 * np.pi * (1.0 - params.epsilon)
    k = np.array(
        [[np.cos(a), -1j * np.sin(a)], [-1j * np.sin(a), np.cos(a)]],
        dtype=np.complex128,
    )
    u = np.array([[1.0]], dtype=np.complex128)
    for _ in range(params.num_qubits):
        u = np.kron(u, k)
    return u


def u2_phases(params: DriveParameters) -> np.ndarray:
    """Diagonal of exp(-i H2 T2) as a complex vector of unit-modulus phases.

    The entry for basis state i is exp(-i T2 [2 sum_{l<m} J_lm z_l z_m
    + sum_l D_l z_l]) with z_l read from bit l of i; the factor 2 is the
    ordered-pair double count of the Ising sum.
    """
    z = basis_z_values(params.num_qubits)
    J = coupling_matrix(params)
    pair_energy = np.einsum("il,lm,im->i", z, J, z)
    onsite = z @ params.disorder_fields()
    return np.exp(-1j * T2 * (2.0 * pair_energy + onsite))


def build_u2(params: DriveParameters) -> np.ndarray:
    """Second half-period: the diagonal Ising phase unitary exp(-i H2 T2)."""
    return np.diag(u2_phases(params))


def floquet_operator(params: DriveParameters) -> np.ndarray:
    """One full drive period: F = exp(-i H2 T2) exp(-i H1 T1)."""
    return u2_phases(params)[:, None] * build_u1(params)


def propagator(params: DriveParameters) -> np.ndarray:
    """F^n for n = ``params.periods``, computed once by repeated squaring.

    Precomputing the n-period propagator turns the per-sample evolution
    into a single matrix-vector product, which is the dominant
    performance decision of the whole simulator.
    """
    f = floquet_operator(params)
    return np.linalg.matrix_power(f, params.periods)


def evolve(state: np.ndarray, prop: np.ndarray) -> np.ndarray:
    """Apply a precomputed propagator to a normalized state.

    The output norm is re-checked (unitarity should preserve it to
    rounding) and the state is renormalized to scrub accumulated error.
    """
    state = np.asarray(state, dtype=np.complex128)
    if prop.shape[1] != state.shape[0]:
        raise ValueError(
            f"dimension mismatch: propagator is {prop.shape}, state has "
            f"length {state.shape[0]}"
        )
    out = prop @ state
    norm = np.linalg.norm(out)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"evolved state norm deviates from 1 by {abs(norm - 1.0):.3e}")
    return out / norm


def unitarity_defect(u: np.ndarray) -> float:
    """Max-abs entry of U^dagger U - I."""
    d = u.shape[0]
    return float(np.abs(u.conj().T @ u - np.eye(d)).max())
