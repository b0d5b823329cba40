"""Pure-numpy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable
(or explicitly disabled).  Semantics must match ``_core`` bit-for-bit up
to floating-point associativity; the equivalence is enforced by tests.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def product_states(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Batch of N-qubit product states from per-qubit Bloch angles.

    Row b of the output is the 2^N amplitude vector of
    prod_l [cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>], little-endian
    (bit l of the index addresses qubit l).  Built by in-place doubling,
    one qubit at a time.
    """
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    phis = np.ascontiguousarray(phis, dtype=np.float64)
    batch, n = thetas.shape
    a = np.cos(0.5 * thetas)
    b = np.exp(1j * phis) * np.sin(0.5 * thetas)
    out = np.empty((batch, 2**n), dtype=np.complex128)
    out[:, 0] = 1.0
    size = 1
    for l in range(n):
        out[:, size : 2 * size] = out[:, :size] * b[:, l : l + 1]
        out[:, :size] *= a[:, l : l + 1]
        size *= 2
    return out


def probabilities(states: np.ndarray) -> np.ndarray:
    """|amplitude|^2 row-wise."""
    return states.real**2 + states.imag**2


def standardize_rows(p: np.ndarray, degenerate_tol: float = 1e-15) -> np.ndarray:
    """Z-score each row with the population standard deviation.

    Rows whose std falls below ``degenerate_tol`` (constant rows) map to
    all zeros instead of dividing by ~0.
    """
    p = np.asarray(p, dtype=np.float64)
    mean = p.mean(axis=1, keepdims=True)
    std = p.std(axis=1, keepdims=True)
    ok = std >= degenerate_tol
    return np.where(ok, (p - mean) / np.where(ok, std, 1.0), 0.0)


def percolation_edges(
    energies: np.ndarray,
    hmat: np.ndarray,
    weight_floor: float = 1e-12,
    row_chunk: int = 256,
):
    """Scan all unordered basis-state pairs for near-resonant couplings.

    Pair (i, j), i < j, becomes an edge iff |E_j - E_i| < |H_ij| and
    |H_ij| > weight_floor.  Returns (i, j, weight) arrays sorted by
    (i, j).  Chunked over rows to bound the boolean temporaries at
    ``row_chunk * dim`` entries.
    """
    energies = np.asarray(energies, dtype=np.float64)
    dim = energies.shape[0]
    out_i, out_j, out_w = [], [], []
    for start in range(0, dim, row_chunk):
        stop = min(start + row_chunk, dim)
        w = np.abs(hmat[start:stop, :])
        de = np.abs(energies[None, :] - energies[start:stop, None])
        cond = (de < w) & (w > weight_floor)
        # keep only j > i within this row block
        cond &= np.arange(dim)[None, :] > np.arange(start, stop)[:, None]
        ii, jj = np.nonzero(cond)
        out_i.append(ii.astype(np.int64) + start)
        out_j.append(jj.astype(np.int64))
        out_w.append(w[ii, jj])
    return (
        np.concatenate(out_i),
        np.concatenate(out_j),
        np.concatenate(out_w),
    )
