"""One-sample Kolmogorov-Smirnov checks of sampled bid marginals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import _steps
from ..equilibrium import equilibrium_marginal
from ..errors import ValidationError
from ..game import GameSpec
from ..rand import as_generator

KS_CRITICAL = 1.63


@dataclass(frozen=True)
class KsReport:
    n: int
    distance: float
    threshold: float
    passed: bool
    point: float

    def to_json(self) -> dict:
        return {
            "point": self.point,
            "n": self.n,
            "distance": self.distance,
            "threshold": self.threshold,
            "passed": self.passed,
        }


def ks_distance(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Two-sided sup distance between the empirical CDF and ``cdf``.

    Ties in the sample are handled exactly: the empirical jump at a repeated
    value is compared on both sides.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValidationError("KS distance needs at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(np.clip(max(d_plus, d_minus), 0.0, 1.0))


def ks_threshold(n: int) -> float:
    return KS_CRITICAL / np.sqrt(n)


def values_at(source, g: GameSpec, x, n: int, rng) -> np.ndarray:
    """``n`` sampled bid values at the point ``x``."""
    coord = g.battleground.coordinate(x)
    if getattr(source, "shared_grid", False):
        grid, vals = source.sample_grid(n, rng)
        return np.array(vals[:, _steps.point_index(grid, coord)], dtype=float)
    return np.array([source.sample(rng).at(x) for _ in range(n)], dtype=float)


def ks_marginal_test(source, g: GameSpec, x, n: int, rng) -> KsReport:
    """Compare the sampled law of ``bid(x)`` with the equilibrium marginal at ``x``."""
    if n < 1:
        raise ValidationError("KS test needs n >= 1")
    law = equilibrium_marginal(g, x)
    vals = values_at(source, g, x, n, rng)
    d = ks_distance(vals, law.cdf)
    thr = float(ks_threshold(n))
    return KsReport(n, d, thr, bool(d < thr), float(x))


def ks_from_samples(samples, cdf, point: float = float("nan")) -> KsReport:
    s = np.asarray(samples, dtype=float).ravel()
    d = ks_distance(s, cdf)
    thr = float(ks_threshold(s.size))
    return KsReport(s.size, d, thr, bool(d < thr), point)


def uniform_sample(n: int, rng) -> np.ndarray:
    return as_generator(rng).random(n)
