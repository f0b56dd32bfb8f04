"""Game instances, pure-strategy bids and budget validation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, NamedTuple, Sequence

import numpy as np

from . import _steps
from .errors import EmptyValues, ParseError, SpaceMismatch, ValidationError
from .measure import (
    Battleground,
    DensityRatio,
    Measure,
    density_ratio,
    normalize_budget,
    total_mass,
)

BUDGET_SLACK = 1e-9


class Bid:
    """A pure strategy: a nonnegative step function on the battleground.

    Interval and circle bids are kept in canonical form (adjacent equal
    pieces merged).  Discrete bids keep one value per battlefield.
    """

    __slots__ = ("battleground", "breakpoints", "values")

    def __init__(self, battleground: Battleground, breakpoints, values, *, canonical: bool = True):
        b = np.asarray(breakpoints, dtype=float)
        v = np.asarray(values, dtype=float)
        if b.ndim != 1 or v.shape != (b.size - 1,):
            raise ValidationError("bid: need one value per piece")
        if not (np.all(np.isfinite(v)) and np.all(v >= 0)):
            raise ValidationError("bid values must be finite and nonnegative")
        _steps.check_breakpoints(b, battleground.length, "bid")
        if battleground.is_discrete:
            if not np.array_equal(b, np.arange(battleground.n + 1)):
                raise ValidationError("discrete bids live on unit battlefield pieces")
        elif canonical:
            b, v = _steps.merge_equal(b, v)
        self.battleground = battleground
        self.breakpoints = _steps.frozen(b)
        self.values = _steps.frozen(v)

    @classmethod
    def step(cls, breakpoints, values, battleground: Battleground | None = None) -> "Bid":
        return cls(battleground or Battleground.interval(), breakpoints, values)

    @classmethod
    def discrete(cls, weights) -> "Bid":
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("discrete bid needs a non-empty weight vector")
        return cls(Battleground.discrete(w.size), np.arange(w.size + 1), w)

    @classmethod
    def constant(cls, c: float, battleground: Battleground | None = None) -> "Bid":
        bg = battleground or Battleground.interval()
        if bg.is_discrete:
            return cls(bg, np.arange(bg.n + 1), np.full(bg.n, float(c)))
        return cls(bg, [0.0, bg.length], [float(c)])

    @classmethod
    def zero(cls, battleground: Battleground) -> "Bid":
        return cls.constant(0.0, battleground)

    @property
    def weights(self) -> np.ndarray:
        if not self.battleground.is_discrete:
            raise ValidationError("weights are defined for discrete bids only")
        return self.values

    def at(self, x):
        coord = self.battleground.coordinate(x)
        out = self.values[_steps.point_index(self.breakpoints, coord)]
        return float(out) if np.ndim(out) == 0 else out

    def on(self, grid: np.ndarray) -> np.ndarray:
        return _steps.on_grid(self.breakpoints, self.values, grid)

    def integral(self, m: Measure) -> float:
        return bid_integral(self, m)

    def scaled(self, factor: float) -> "Bid":
        return Bid(self.battleground, self.breakpoints, self.values * factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bid):
            return NotImplemented
        return (
            self.battleground == other.battleground
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.battleground, self.breakpoints.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        if self.battleground.is_discrete:
            return f"Bid.discrete({self.values.tolist()!r})"
        if self.values.size <= 8:
            return f"Bid({self.battleground.kind}, breaks={self.breakpoints.tolist()}, values={self.values.tolist()})"
        return f"Bid({self.battleground.kind}, pieces={self.values.size})"

    def to_json(self) -> dict[str, Any]:
        if self.battleground.is_discrete:
            return {"weights": self.values.tolist()}
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_json(cls, data: dict[str, Any], battleground: Battleground) -> "Bid":
        if "weights" in data:
            bid = cls.discrete(data["weights"])
            if bid.battleground != battleground:
                raise SpaceMismatch(f"bid has {bid.battleground.n} battlefields, game has {battleground}")
            return bid
        if "breakpoints" not in data or "values" not in data:
            raise ParseError("bid JSON needs 'breakpoints' and 'values' (or 'weights')")
        return cls(battleground, data["breakpoints"], data["values"])


class BidProfile(Sequence[Bid]):
    """One bid per player, all on the same battleground."""

    def __init__(self, bids: Sequence[Bid]):
        bids = tuple(bids)
        if not bids:
            raise ValidationError("bid profile needs at least one bid")
        bg = bids[0].battleground
        for b in bids[1:]:
            if b.battleground != bg:
                raise SpaceMismatch("bids in a profile must share a battleground")
        self._bids = bids

    @property
    def battleground(self) -> Battleground:
        return self._bids[0].battleground

    def __getitem__(self, i):
        return self._bids[i]

    def __len__(self) -> int:
        return len(self._bids)

    def __iter__(self) -> Iterator[Bid]:
        return iter(self._bids)

    def __repr__(self) -> str:
        return f"BidProfile({list(self._bids)!r})"

    def to_json(self) -> dict[str, Any]:
        return {"bids": [b.to_json() for b in self._bids]}

    @classmethod
    def from_json(cls, data, battleground: Battleground) -> "BidProfile":
        items = data.get("bids") if isinstance(data, dict) else data
        if not isinstance(items, list):
            raise ParseError("bid profile JSON must be a list of bids or {'bids': [...]} ")
        return cls([Bid.from_json(d, battleground) for d in items])


@dataclass(frozen=True)
class GameSpec:
    """A Blotto game ``(k, battleground, budgets, beta, value)``.

    The budget measure must already have unit mass; use :func:`make_game`
    to normalize one that does not.  ``budget_scale`` is the original budget
    mass, so a bid in the original units equals ``bid_normalized / budget_scale``.
    """

    k: int
    battleground: Battleground
    budgets: tuple[float, ...]
    beta: Measure
    value: Measure
    budget_scale: float = 1.0
    upsilon: float = field(init=False)
    ratio: DensityRatio = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"player count must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        budgets = tuple(float(b) for b in self.budgets)
        if len(budgets) != self.k:
            raise ValidationError(f"need {self.k} budgets, got {len(budgets)}")
        if not all(np.isfinite(b) and b > 0 for b in budgets):
            raise ValidationError("budgets must be positive")
        object.__setattr__(self, "budgets", budgets)
        for m, name in ((self.beta, "beta"), (self.value, "value")):
            if m.battleground != self.battleground:
                raise SpaceMismatch(f"{name} measure is not on the game's battleground")
        if abs(total_mass(self.beta) - 1.0) > 1e-12:
            raise ValidationError("budget measure must be normalized to mass 1")
        object.__setattr__(self, "upsilon", total_mass(self.value))
        object.__setattr__(self, "ratio", density_ratio(self.value, self.beta))

    @property
    def symmetric(self) -> bool:
        return all(b == 1.0 for b in self.budgets)

    @property
    def homogeneous(self) -> bool:
        return self.ratio.values.size == 1 or bool(np.all(self.ratio.values == self.ratio.values[0]))

    def bid_from_original(self, bid: Bid) -> Bid:
        """Convert a bid stated against the un-normalized budget measure."""
        return bid.scaled(self.budget_scale)

    def bid_to_original(self, bid: Bid) -> Bid:
        return bid.scaled(1.0 / self.budget_scale)

    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "battleground": self.battleground.to_json(),
            "budgets": list(self.budgets),
            "beta": self.beta.scaled(self.budget_scale).to_json() if self.budget_scale != 1.0 else self.beta.to_json(),
            "value": self.value.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "GameSpec":
        try:
            k = data["k"]
            bg = Battleground.from_json(data["battleground"])
            beta = Measure.from_json(data["beta"])
            value = Measure.from_json(data["value"])
        except KeyError as exc:
            raise ParseError(f"game JSON is missing field {exc.args[0]!r}") from None
        except (TypeError, AttributeError) as exc:
            raise ParseError(f"malformed game JSON: {exc}") from None
        for m, name in ((beta, "beta"), (value, "value")):
            if m.battleground != bg:
                raise SpaceMismatch(f"{name} measure does not match the declared battleground {bg}")
        return make_game(k, beta, value, data.get("budgets"))


def make_game(k: int, beta: Measure, value: Measure, budgets=None) -> GameSpec:
    """Build a game, normalizing ``beta`` to unit mass first.

    Budgets are kept as given; the normalization only changes the unit in
    which bids are expressed (see ``GameSpec.budget_scale``).
    """
    beta_n, scale = normalize_budget(beta)
    if budgets is None:
        budgets = (1.0,) * int(k)
    return GameSpec(k, beta.battleground, tuple(budgets), beta_n, value, budget_scale=scale)


def bid_integral(b: Bid, m: Measure) -> float:
    """Exact integral of a bid against a measure."""
    if b.battleground != m.battleground:
        raise SpaceMismatch("bid and measure live on different battlegrounds")
    grid = _steps.refine(b.breakpoints, m.breakpoints)
    return float(np.sum(b.on(grid) * m.masses_on(grid)))


class BudgetCheck(NamedTuple):
    ok: bool
    integral: float
    excess: float


def validate_bid(b: Bid, g: GameSpec, player: int) -> BudgetCheck:
    """Check the hard budget constraint for ``player`` (0-based)."""
    if not 0 <= player < g.k:
        raise ValidationError(f"player index {player} outside 0..{g.k - 1}")
    total = bid_integral(b, g.beta)
    excess = total - g.budgets[player]
    return BudgetCheck(excess <= BUDGET_SLACK, total, max(excess, 0.0))


def interval_blotto(k: int) -> GameSpec:
    bg = Battleground.interval()
    lam = Measure.uniform(bg)
    return GameSpec(k, bg, (1.0,) * k, lam, lam)


def circle_blotto(k: int, circumference: float = 1.0) -> GameSpec:
    """Uniform game on a circle (the longitude parameterization of the sphere)."""
    bg = Battleground.circle(circumference)
    return make_game(k, Measure.uniform(bg), Measure.uniform(bg))


def discrete_blotto(k: int, values) -> GameSpec:
    """Standard multiplayer Blotto: counting budget measure, battlefield values."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise EmptyValues("discrete Blotto needs at least one battlefield value")
    value = Measure.from_weights(v)
    beta = Measure.from_weights(np.ones(v.size))
    return make_game(k, beta, value)
