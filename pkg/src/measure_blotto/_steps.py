"""Helpers for piecewise-constant functions stored as (breakpoints, values).

A step function with breakpoints ``b[0] < ... < b[m]`` takes value ``v[j]``
on ``[b[j], b[j+1])``; the last piece also owns the right endpoint.
"""
from __future__ import annotations

import numpy as np


def frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.flags.writeable = False
    return arr


def check_breakpoints(breaks: np.ndarray, length: float, what: str) -> None:
    from .errors import ValidationError

    if breaks.ndim != 1 or breaks.size < 2:
        raise ValidationError(f"{what}: need at least two breakpoints")
    if not np.all(np.isfinite(breaks)):
        raise ValidationError(f"{what}: breakpoints must be finite")
    if breaks[0] != 0.0 or breaks[-1] != length:
        raise ValidationError(
            f"{what}: breakpoints must run from 0 to {length!r}, "
            f"got {breaks[0]!r}..{breaks[-1]!r}"
        )
    if not np.all(np.diff(breaks) > 0):
        raise ValidationError(f"{what}: breakpoints must be strictly increasing")


def refine(*breaks: np.ndarray) -> np.ndarray:
    """Common refinement of several breakpoint arrays."""
    if len(breaks) == 1:
        return breaks[0]
    first = breaks[0]
    if all(b is first or (b.shape == first.shape and np.array_equal(b, first)) for b in breaks[1:]):
        return first
    return np.unique(np.concatenate(breaks))


def piece_index(breaks: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Index of the piece of ``breaks`` containing each piece of ``grid``."""
    idx = np.searchsorted(breaks, grid[:-1], side="right") - 1
    return np.clip(idx, 0, breaks.size - 2)


def on_grid(breaks: np.ndarray, values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Values of a step function on every piece of a finer ``grid``.

    ``values`` may carry leading batch axes; the piece axis is last.
    """
    if grid is breaks:
        return values
    return values[..., piece_index(breaks, grid)]


def point_index(breaks: np.ndarray, x) -> np.ndarray:
    idx = np.searchsorted(breaks, np.asarray(x, dtype=float), side="right") - 1
    return np.clip(idx, 0, breaks.size - 2)


def merge_equal(breaks: np.ndarray, values: np.ndarray):
    """Drop breakpoints between adjacent pieces with identical values."""
    if values.size <= 1:
        return breaks, values
    keep = np.empty(values.size, dtype=bool)
    keep[0] = True
    np.not_equal(values[1:], values[:-1], out=keep[1:])
    if keep.all():
        return breaks, values
    new_breaks = np.append(breaks[:-1][keep], breaks[-1])
    return new_breaks, values[keep]
