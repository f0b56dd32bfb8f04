"""Finite measures on the battleground.

Measures on the interval and on the circle have piecewise-constant densities
with respect to length; measures on ``n`` discrete battlefields are weight
vectors.  Internally battlefield ``j`` (1-based) is the unit piece
``[j - 1, j)``, so one set of step-function routines serves every kind.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _steps
from .errors import SpaceMismatch, ValidationError

INTERVAL = "interval"
DISCRETE = "discrete"
CIRCLE = "circle"


@dataclass(frozen=True)
class Battleground:
    """The space players compete over.

    ``kind`` is ``"interval"`` (the unit interval), ``"discrete"`` (``n``
    battlefields) or ``"circle"`` (an interval of length ``circumference``
    with its endpoints identified).
    """

    kind: str
    n: int | None = None
    circumference: float | None = None

    def __post_init__(self):
        if self.kind == INTERVAL:
            if self.n is not None or self.circumference is not None:
                raise ValidationError("interval battleground takes no parameters")
        elif self.kind == DISCRETE:
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise ValidationError(f"discrete battleground needs n >= 1, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))
        elif self.kind == CIRCLE:
            c = self.circumference
            if c is None or not np.isfinite(c) or c <= 0:
                raise ValidationError(f"circle circumference must be positive, got {c!r}")
            object.__setattr__(self, "circumference", float(c))
        else:
            raise ValidationError(f"unknown battleground kind {self.kind!r}")

    @classmethod
    def interval(cls) -> "Battleground":
        return cls(INTERVAL)

    @classmethod
    def discrete(cls, n: int) -> "Battleground":
        return cls(DISCRETE, n=n)

    @classmethod
    def circle(cls, circumference: float = 1.0) -> "Battleground":
        return cls(CIRCLE, circumference=circumference)

    @property
    def length(self) -> float:
        if self.kind == INTERVAL:
            return 1.0
        if self.kind == DISCRETE:
            return float(self.n)
        return self.circumference

    @property
    def is_discrete(self) -> bool:
        return self.kind == DISCRETE

    def coordinate(self, x):
        """Map user-facing points to the internal line coordinate.

        Discrete points are 1-based battlefield indices; circle points wrap.
        """
        x = np.asarray(x, dtype=float)
        if self.kind == DISCRETE:
            if np.any((x < 1) | (x > self.n) | (x != np.round(x))):
                raise ValidationError(f"battlefield index outside 1..{self.n}: {x!r}")
            return x - 0.5
        if self.kind == CIRCLE:
            return np.mod(x, self.circumference)
        if np.any((x < 0) | (x > 1)):
            raise ValidationError(f"point outside [0, 1]: {x!r}")
        return x

    def to_json(self) -> dict[str, Any]:
        if self.kind == DISCRETE:
            return {"kind": DISCRETE, "n": self.n}
        if self.kind == CIRCLE:
            return {"kind": CIRCLE, "circumference": self.circumference}
        return {"kind": INTERVAL}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Battleground":
        kind = data.get("kind")
        if kind == DISCRETE:
            return cls.discrete(data.get("n"))
        if kind == CIRCLE:
            return cls.circle(data.get("circumference", 1.0))
        if kind in (INTERVAL, "interval01"):
            return cls.interval()
        raise ValidationError(f"unknown battleground kind {kind!r}")


class _Step:
    """Shared storage for step-shaped objects over a battleground."""

    __slots__ = ("battleground", "breakpoints", "_vals")

    def __init__(self, battleground: Battleground, breakpoints, vals, what: str):
        b = _steps.frozen(breakpoints)
        v = _steps.frozen(vals)
        _steps.check_breakpoints(b, battleground.length, what)
        if v.shape != (b.size - 1,):
            raise ValidationError(f"{what}: need one value per piece")
        if not np.all(np.isfinite(v)):
            raise ValidationError(f"{what}: values must be finite")
        if battleground.is_discrete and not np.array_equal(b, np.arange(battleground.n + 1)):
            raise ValidationError(f"{what}: discrete objects live on unit battlefield pieces")
        self.battleground = battleground
        self.breakpoints = b
        self._vals = v

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def at(self, x):
        """Value at user-facing point(s) ``x``."""
        coord = self.battleground.coordinate(x)
        out = self._vals[_steps.point_index(self.breakpoints, coord)]
        return float(out) if np.ndim(out) == 0 else out

    def on(self, grid: np.ndarray) -> np.ndarray:
        return _steps.on_grid(self.breakpoints, self._vals, grid)

    def _same_space(self, other: "_Step") -> None:
        if self.battleground != other.battleground:
            raise SpaceMismatch(
                f"objects live on different battlegrounds: {self.battleground} vs {other.battleground}"
            )


class Measure(_Step):
    """A finite measure with strictly positive piecewise-constant density.

    Strict positivity encodes mutual absolute continuity of the budget and
    value measures: a zero-density piece is rejected outright.
    """

    __slots__ = ()

    def __init__(self, battleground: Battleground, breakpoints, densities):
        super().__init__(battleground, breakpoints, densities, "measure")
        if not np.all(self._vals > 0):
            raise ValidationError(
                "measure densities/weights must be strictly positive "
                "(budget and value measures must be mutually absolutely continuous)"
            )

    @property
    def densities(self) -> np.ndarray:
        return self._vals

    @property
    def weights(self) -> np.ndarray:
        if not self.battleground.is_discrete:
            raise ValidationError("weights are defined for discrete measures only")
        return self._vals

    @classmethod
    def uniform(cls, battleground: Battleground, density: float = 1.0) -> "Measure":
        if battleground.is_discrete:
            return cls(battleground, np.arange(battleground.n + 1), np.full(battleground.n, density))
        return cls(battleground, [0.0, battleground.length], [density])

    @classmethod
    def from_weights(cls, weights) -> "Measure":
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("discrete measure needs a non-empty weight vector")
        bg = Battleground.discrete(w.size)
        return cls(bg, np.arange(w.size + 1), w)

    def piece_masses(self) -> np.ndarray:
        return self._vals * self.lengths

    def masses_on(self, grid: np.ndarray) -> np.ndarray:
        return self.on(grid) * np.diff(grid)

    def cumulative(self, x) -> np.ndarray:
        """Mass of ``[0, x)`` in internal coordinates."""
        x = np.asarray(x, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.piece_masses())))
        j = _steps.point_index(self.breakpoints, x)
        return cum[j] + self._vals[j] * (x - self.breakpoints[j])

    def quantile(self, mass) -> np.ndarray:
        """Internal coordinate where the cumulative mass reaches ``mass``."""
        mass = np.asarray(mass, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.piece_masses())))
        j = np.clip(np.searchsorted(cum, mass, side="right") - 1, 0, self._vals.size - 1)
        x = self.breakpoints[j] + (mass - cum[j]) / self._vals[j]
        return np.clip(x, 0.0, self.battleground.length)

    def scaled(self, factor: float) -> "Measure":
        return Measure(self.battleground, self.breakpoints, self._vals * factor)

    def to_json(self) -> dict[str, Any]:
        if self.battleground.is_discrete:
            return {"kind": DISCRETE, "weights": self._vals.tolist()}
        return {
            "kind": self.battleground.kind,
            "breakpoints": self.breakpoints.tolist(),
            "densities": self._vals.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Measure":
        kind = data.get("kind")
        if kind == DISCRETE:
            if "weights" not in data:
                raise ValidationError("discrete measure JSON needs 'weights'")
            return cls.from_weights(data["weights"])
        breaks = np.asarray(data.get("breakpoints", []), dtype=float)
        dens = data.get("densities")
        if dens is None or breaks.size < 2:
            raise ValidationError("measure JSON needs 'breakpoints' and 'densities'")
        if kind == CIRCLE:
            bg = Battleground.circle(float(breaks[-1]))
        elif kind in (INTERVAL, "interval01"):
            bg = Battleground.interval()
        else:
            raise ValidationError(f"unknown measure kind {kind!r}")
        return cls(bg, breaks, dens)

    def __repr__(self) -> str:
        return f"Measure({self.battleground.kind}, pieces={self._vals.size}, mass={total_mass(self)!r})"


class DensityRatio(_Step):
    """Radon-Nikodym derivative of one measure against another, per piece."""

    __slots__ = ()

    def __init__(self, battleground: Battleground, breakpoints, values):
        super().__init__(battleground, breakpoints, values, "density ratio")
        if not np.all(self._vals > 0):
            raise ValidationError("density ratio must be strictly positive")

    @property
    def values(self) -> np.ndarray:
        return self._vals

    def __repr__(self) -> str:
        return f"DensityRatio({self.battleground.kind}, values={self._vals!r})"


def total_mass(m: Measure) -> float:
    return float(np.sum(m.piece_masses()))


def density_ratio(v: Measure, beta: Measure) -> DensityRatio:
    """dv/dbeta on the common refinement of both measures' pieces."""
    v._same_space(beta)
    grid = _steps.refine(v.breakpoints, beta.breakpoints)
    return DensityRatio(v.battleground, grid, v.on(grid) / beta.on(grid))


def normalize_budget(beta: Measure) -> tuple[Measure, float]:
    """Rescale ``beta`` to unit mass. Returns the new measure and the old mass."""
    scale = total_mass(beta)
    if scale == 1.0:
        return beta, 1.0
    return beta.scaled(1.0 / scale), scale
