"""Value equipartitions and the Dirichlet equilibrium sampler.

Each player draws ``X ~ Dir(1/(k-1), ..., 1/(k-1))`` and bids
``(k / upsilon) * (dv/dbeta)(x) * X[cell(x)]``.  Every bid spends exactly the
unit budget and every pointwise marginal is the scaled ``Beta(1/(k-1), 1)``
law below, which makes the profile a mixed equilibrium.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Any

import numpy as np

from . import _steps
from .errors import (
    AsymmetricGame,
    BadPartition,
    NotEquipartitionable,
    SinglePlayer,
    SpaceMismatch,
    ValidationError,
)
from .game import Bid, GameSpec
from .measure import CIRCLE, INTERVAL, Battleground, Measure, total_mass
from .payoff import StrategySource
from .rand import sample_dirichlet

PARTITION_RTOL = 1e-12
_EPS = np.finfo(float).eps


class EquipartitionMap:
    """A map from the battleground to cells ``1..k``.

    Stored as a step function: piece ``j`` of ``breakpoints`` belongs to
    cell ``labels[j] + 1``.  A cell may be a union of several pieces (wrapped
    arcs on the circle, scattered battlefields).
    """

    __slots__ = ("battleground", "k", "breakpoints", "labels")

    def __init__(self, battleground: Battleground, k: int, breakpoints, labels):
        b = _steps.frozen(breakpoints)
        lab = _steps.frozen(labels, dtype=np.int64)
        _steps.check_breakpoints(b, battleground.length, "partition")
        if lab.shape != (b.size - 1,):
            raise ValidationError("partition: need one label per piece")
        if k < 1 or lab.min() < 0 or lab.max() >= k:
            raise ValidationError(f"partition labels must lie in 1..{k}")
        if np.unique(lab).size != k:
            raise ValidationError("partition: every cell must be non-empty")
        if battleground.is_discrete and not np.array_equal(b, np.arange(battleground.n + 1)):
            raise ValidationError("discrete partitions assign whole battlefields")
        self.battleground = battleground
        self.k = int(k)
        self.breakpoints = b
        self.labels = lab

    def cell_of(self, x):
        """1-based cell index of point(s) ``x``."""
        coord = self.battleground.coordinate(x)
        out = self.labels[_steps.point_index(self.breakpoints, coord)] + 1
        return int(out) if np.ndim(out) == 0 else out

    def cells(self) -> list:
        """Cells as lists of ``(a, b)`` pieces, or of 1-based battlefields."""
        out: list[list] = [[] for _ in range(self.k)]
        if self.battleground.is_discrete:
            for j, lab in enumerate(self.labels, start=1):
                out[lab].append(j)
            return out
        b = self.breakpoints
        for j, lab in enumerate(self.labels):
            pieces = out[lab]
            if pieces and pieces[-1][1] == b[j]:
                pieces[-1] = (pieces[-1][0], float(b[j + 1]))
            else:
                pieces.append((float(b[j]), float(b[j + 1])))
        return out

    def cell_masses(self, m: Measure) -> np.ndarray:
        if m.battleground != self.battleground:
            raise SpaceMismatch("partition and measure live on different battlegrounds")
        grid = _steps.refine(self.breakpoints, m.breakpoints)
        lab = self.labels[_steps.piece_index(self.breakpoints, grid)]
        return np.bincount(lab, weights=m.masses_on(grid), minlength=self.k)

    def check(self, value: Measure) -> None:
        """Raise BadPartition unless every cell carries ``1/k`` of the value.

        The tolerance is 1e-12 relative plus the rounding of breakpoints to
        doubles, which for ``k`` equal cells is of order ``k * eps``.
        """
        masses = self.cell_masses(value)
        target = total_mass(value) / self.k
        slack = 4 * _EPS * self.battleground.length * float(value.densities.max()) * (self.breakpoints.size)
        tol = PARTITION_RTOL * target + (0.0 if self.battleground.is_discrete else slack / self.k)
        err = np.abs(masses - target)
        if np.any(err > tol):
            i = int(np.argmax(err))
            raise BadPartition(
                f"cell {i + 1} has value {masses[i]!r}, expected {target!r} (equal-value cells required)"
            )

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.battleground.kind, "k": self.k, "cells": self.cells()}

    @classmethod
    def from_json(cls, data: dict[str, Any], battleground: Battleground) -> "EquipartitionMap":
        k = int(data["k"])
        cells = data["cells"]
        if len(cells) != k:
            raise ValidationError(f"partition JSON lists {len(cells)} cells, expected {k}")
        if battleground.is_discrete:
            labels = np.full(battleground.n, -1)
            for i, cell in enumerate(cells):
                for j in cell:
                    labels[int(j) - 1] = i
            if np.any(labels < 0):
                raise ValidationError("partition JSON leaves battlefields unassigned")
            return cls(battleground, k, np.arange(battleground.n + 1), labels)
        pieces = sorted((float(a), float(b), i) for i, cell in enumerate(cells) for a, b in cell)
        breaks = [p[0] for p in pieces] + [pieces[-1][1]]
        for (_, b0, _), (a1, _, _) in zip(pieces, pieces[1:]):
            if b0 != a1:
                raise ValidationError("partition JSON cells must tile the battleground without gaps")
        return cls(battleground, k, breaks, [p[2] for p in pieces])

    def __repr__(self) -> str:
        return f"EquipartitionMap({self.battleground.kind}, k={self.k}, pieces={self.labels.size})"


def equipartition_interval(k: int, value: Measure | None = None) -> EquipartitionMap:
    """Cells ``[(i-1)/k, i/k)`` of the unit interval (point 1 joins cell k).

    With a non-uniform ``value`` measure the cuts sit at its ``i/k`` value
    quantiles instead, so each cell still carries ``1/k`` of the value.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    bg = Battleground.interval()
    if value is None or value.densities.size == 1:
        breaks = np.arange(k + 1) / k
    else:
        if value.battleground != bg:
            raise SpaceMismatch("value measure is not on the unit interval")
        cuts = value.quantile(np.arange(1, k) * (total_mass(value) / k))
        breaks = np.concatenate(([0.0], cuts, [1.0]))
    return EquipartitionMap(bg, k, breaks, np.arange(k))


def equipartition_circle(
    k: int, circumference: float = 1.0, offset: float = 0.0, value: Measure | None = None
) -> EquipartitionMap:
    """``k`` arcs of equal value starting at ``offset`` (longitude slices).

    The arc that crosses the seam at 0 is stored as two pieces.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    bg = Battleground.circle(circumference)
    if value is None:
        value = Measure.uniform(bg)
    elif value.battleground != bg:
        raise SpaceMismatch("value measure is not on this circle")
    ups = total_mass(value)
    start = float(value.cumulative(np.mod(offset, bg.length)))
    targets = np.mod(start + np.arange(k) * (ups / k), ups)
    cuts = value.quantile(targets)
    breaks = np.unique(np.concatenate(([0.0, bg.length], cuts)))
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    pos = np.mod(value.cumulative(mids) - start, ups)
    labels = np.minimum((pos / (ups / k)).astype(np.int64), k - 1)
    return EquipartitionMap(bg, k, breaks, labels)


def equipartition_discrete(n: int, k: int, values=None, max_nodes: int = 1_000_000) -> EquipartitionMap:
    """Split ``n`` battlefields into ``k`` cells of equal total value.

    Homogeneous values use ``cell(j) = (j mod k) + 1`` and need ``k | n``.
    Heterogeneous values go through an exact backtracking search.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    bg = Battleground.discrete(n)
    v = np.ones(n) if values is None else np.asarray(values, dtype=float)
    if v.shape != (n,):
        raise ValidationError(f"need {n} battlefield values, got {v.shape}")
    if np.all(v == v[0]):
        if n % k:
            raise NotEquipartitionable(f"{n} equal battlefields cannot be split into {k} equal cells")
        return EquipartitionMap(bg, k, np.arange(n + 1), np.arange(1, n + 1) % k)
    labels = _search_partition(v, k, max_nodes)
    if labels is None:
        raise NotEquipartitionable(f"no split of values {v.tolist()} into {k} cells of equal value was found")
    return EquipartitionMap(bg, k, np.arange(n + 1), labels)


def _search_partition(v: np.ndarray, k: int, max_nodes: int):
    target = v.sum() / k
    tol = PARTITION_RTOL * target
    if np.any(v > target + tol):
        return None
    order = np.argsort(-v, kind="stable")
    sums = np.zeros(k)
    labels = np.full(v.size, -1, dtype=np.int64)
    budget = count()

    def place(pos: int) -> bool:
        if next(budget) > max_nodes:
            raise NotEquipartitionable(f"equal-value partition search exceeded {max_nodes} steps")
        if pos == v.size:
            return bool(np.all(np.abs(sums - target) <= tol))
        j = order[pos]
        tried_empty = False
        for c in range(k):
            if sums[c] == 0.0:
                if tried_empty:
                    continue
                tried_empty = True
            if sums[c] + v[j] > target + tol:
                continue
            sums[c] += v[j]
            labels[j] = c
            if place(pos + 1):
                return True
            sums[c] -= v[j]
        labels[j] = -1
        return False

    return labels if place(0) else None


def default_partition(g: GameSpec) -> EquipartitionMap:
    bg = g.battleground
    if bg.kind == INTERVAL:
        return equipartition_interval(g.k, g.value)
    if bg.kind == CIRCLE:
        return equipartition_circle(g.k, bg.circumference, value=g.value)
    return equipartition_discrete(bg.n, g.k, g.value.weights)


class EquilibriumSampler(StrategySource):
    """Draws equilibrium bids for one symmetric game and partition.

    Validation and the grid layout happen once here; :meth:`draw` is then
    a single Dirichlet draw plus an O(k) gather.  ``alpha`` overrides the
    Dirichlet concentration, which only makes sense for negative controls.
    """

    fair = True
    symmetric = True
    shared_grid = True

    def __init__(self, g: GameSpec, partition: EquipartitionMap | None = None, alpha: float | None = None):
        if not g.symmetric:
            raise AsymmetricGame(f"equilibrium sampling needs unit budgets, got {g.budgets}")
        self.game = g
        self.k = g.k
        bg = g.battleground
        if g.k == 1:
            self.partition = None
            self.alpha = None
            self.grid = np.array([0.0, bg.length]) if not bg.is_discrete else np.arange(bg.n + 1.0)
            self._labels = np.zeros(self.grid.size - 1, dtype=np.int64)
            self._coef = np.zeros(self.grid.size - 1)
            return
        if partition is None:
            partition = default_partition(g)
        if partition.battleground != bg:
            raise SpaceMismatch("partition is not on the game's battleground")
        if partition.k != g.k:
            raise BadPartition(f"partition has {partition.k} cells for a {g.k}-player game")
        partition.check(g.value)
        self.partition = partition
        self.alpha = 1.0 / (g.k - 1) if alpha is None else float(alpha)
        grid = _steps.refine(partition.breakpoints, g.ratio.breakpoints)
        self.grid = grid
        self._labels = partition.labels[_steps.piece_index(partition.breakpoints, grid)]
        self._coef = (g.k / g.upsilon) * g.ratio.on(grid)

    def bid_from_weights(self, x: np.ndarray) -> Bid:
        """The bid for a given Dirichlet vector ``x`` (one weight per cell)."""
        return Bid(self.game.battleground, self.grid, self._coef * np.asarray(x)[self._labels])

    def draw(self, rng) -> Bid:
        if self.k == 1:
            return Bid.zero(self.game.battleground)
        return self.bid_from_weights(sample_dirichlet(self.alpha, self.k, rng))

    sample = draw

    def sample_grid(self, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
        """``n`` draws as a ``(n, pieces)`` array on the shared grid."""
        if self.k == 1:
            return self.grid, np.zeros((n, self._coef.size))
        x = sample_dirichlet(self.alpha, self.k, rng, size=n)
        return self.grid, x[:, self._labels] * self._coef

    def __repr__(self) -> str:
        return f"EquilibriumSampler(k={self.k}, alpha={self.alpha})"


def sample_equilibrium_bid(g: GameSpec, pi: EquipartitionMap | None, rng) -> Bid:
    return EquilibriumSampler(g, pi).draw(rng)


@dataclass(frozen=True)
class EquilibriumMarginal:
    """Law of an equilibrium bid at a point with density ratio ``ratio``.

    It is ``(k / upsilon) * ratio * Beta(1/(k-1), 1)``.
    """

    k: int
    upsilon: float
    ratio: float

    def __post_init__(self):
        if self.k < 2:
            raise SinglePlayer("the equilibrium marginal needs k >= 2")

    @property
    def top(self) -> float:
        return self.k * self.ratio / self.upsilon

    @property
    def mean(self) -> float:
        return self.ratio / self.upsilon

    def cdf(self, t):
        z = np.clip(np.asarray(t, dtype=float) / self.top, 0.0, 1.0)
        out = z ** (1.0 / (self.k - 1))
        return float(out) if np.ndim(out) == 0 else out

    def ppf(self, p):
        out = self.top * np.clip(np.asarray(p, dtype=float), 0.0, 1.0) ** (self.k - 1)
        return float(out) if np.ndim(out) == 0 else out

    def to_cdf(self):
        from .verify.cdf import Cdf

        return Cdf.scaled_beta(1.0 / (self.k - 1), self.top)


def equilibrium_marginal(g: GameSpec, x) -> EquilibriumMarginal:
    if g.k < 2:
        raise SinglePlayer("a single player has no equilibrium marginal")
    return EquilibriumMarginal(g.k, g.upsilon, float(g.ratio.at(x)))


def marginal_cdf(g: GameSpec, x, t):
    """Equilibrium CDF ``min(1, (t * upsilon / (k * ratio(x)))**(1/(k-1)))``."""
    return equilibrium_marginal(g, x).cdf(t)
