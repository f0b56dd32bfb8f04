"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise (or when the
environment variable ``MEASURE_BLOTTO_PURE`` is set) the numpy fallback
takes over.  Both expose ``grid_utilities`` and ``deviator_utility``.
"""
import os

import numpy as np

from . import _fallback

BACKEND = "python"
if not os.environ.get("MEASURE_BLOTTO_PURE"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback


def grid_utilities(values, masses) -> np.ndarray:
    """(n, k, m) bids and (m,) piece masses -> (n, k) utilities."""
    return _impl.grid_utilities(np.ascontiguousarray(values, dtype=float), np.ascontiguousarray(masses, dtype=float))


def deviator_utility(psi, opponents, masses) -> np.ndarray:
    """(m,) deviation, (n, k-1, m) opponent bids, (m,) masses -> (n,) utilities."""
    opponents = np.ascontiguousarray(opponents, dtype=float)
    if opponents.shape[1] == 0:
        return np.full(opponents.shape[0], float(np.sum(masses)))
    return _impl.deviator_utility(
        np.ascontiguousarray(psi, dtype=float), opponents, np.ascontiguousarray(masses, dtype=float)
    )
