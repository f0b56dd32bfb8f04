"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Sums over pieces run left to right (``cumsum`` is sequential), matching the
compiled loops bit for bit.
"""
import numpy as np


def _sequential_sum(x):
    if x.shape[-1] == 0:
        return np.zeros(x.shape[:-1])
    return np.cumsum(x, axis=-1)[..., -1]


def grid_utilities(values, masses):
    values = np.asarray(values, dtype=float)
    masses = np.asarray(masses, dtype=float)
    if masses.shape != values.shape[2:]:
        raise ValueError("masses must have one entry per piece")
    top = values.max(axis=1, keepdims=True)
    win = values == top
    share = masses / win.sum(axis=1)
    return _sequential_sum(np.where(win, share[:, None, :], 0.0))


def deviator_utility(psi, opponents, masses):
    psi = np.asarray(psi, dtype=float)
    opponents = np.asarray(opponents, dtype=float)
    masses = np.asarray(masses, dtype=float)
    if psi.shape != opponents.shape[2:] or masses.shape != psi.shape:
        raise ValueError("psi and masses must have one entry per piece")
    if opponents.shape[1] == 0:
        return np.full(opponents.shape[0], masses.sum())
    top = opponents.max(axis=1)
    ties = (opponents == top[:, None, :]).sum(axis=1)
    share = np.where(psi > top, 1.0, np.where(psi == top, 1.0 / (ties + 1), 0.0))
    return _sequential_sum(share * masses)
