"""Hot-kernel backend selection.

At import time the compiled Cython extension is preferred; if it is not
built (no compiler at install time) or ``QRESERVOIR_PURE_PYTHON`` is set
in the environment, the numpy fallback takes over.  Both expose the same
four functions with identical semantics:

    product_states(thetas, phis)        -> complex (batch, 2^N)
    probabilities(states)               -> float (batch, 2^N)
    standardize_rows(p)                 -> float (batch, dim)
    percolation_edges(energies, hmat)   -> (i, j, weight) arrays

``BACKEND`` names the active implementation; ``available_backends()``
returns every importable one (used by the equivalence tests and the
benchmark).
"""

from __future__ import annotations

import os

from . import _numpy

_impl = None
if not os.environ.get("QRESERVOIR_PURE_PYTHON"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
if _impl is None:
    _impl = _numpy

BACKEND: str = _impl.BACKEND

product_states = _impl.product_states
probabilities = _impl.probabilities
standardize_rows = _impl.standardize_rows
percolation_edges = _impl.percolation_edges


def available_backends() -> dict:
    """Importable kernel implementations, keyed by backend name."""
    backends = {"numpy": _numpy}
    try:
        from . import _core  # type: ignore[attr-defined]

        backends["compiled"] = _core
    except ImportError:
        pass
    return backends
