"""Utilities of bid profiles, Monte Carlo over mixed strategies, and the
analytic payoff of a deviation against equilibrium opponents."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _steps, kernels
from .errors import AsymmetricGame, ProfileLengthMismatch, SpaceMismatch, ValidationError
from .game import Bid, BidProfile, GameSpec
from .rand import RngStream, as_generator

CHUNK = 8192


@dataclass(frozen=True)
class PayoffVector:
    utilities: np.ndarray
    upsilon: float

    @property
    def total(self) -> float:
        return float(np.sum(self.utilities))

    def __getitem__(self, i) -> float:
        return float(self.utilities[i])

    def __len__(self) -> int:
        return len(self.utilities)


class StrategySource:
    """A mixed strategy: something that can draw bids.

    Subclasses implement :meth:`sample`.  Sources whose draws all share one
    set of breakpoints also set ``shared_grid`` and implement
    :meth:`sample_grid`, which lets Monte Carlo run on the compiled kernel
    without re-refining every draw.
    """

    fair = False
    symmetric = False
    shared_grid = False

    def sample(self, rng) -> Bid:
        raise NotImplementedError

    def sample_grid(self, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def sample_many(self, n: int, rng) -> list[Bid]:
        return [self.sample(rng) for _ in range(n)]


class PureSource(StrategySource):
    """Always plays the same bid."""

    shared_grid = True

    def __init__(self, bid: Bid):
        self.bid = bid
        self.fair = bid.values.size == 1 or bool(np.all(bid.values == bid.values[0]))

    def sample(self, rng) -> Bid:
        return self.bid

    def sample_grid(self, n, rng):
        return self.bid.breakpoints, np.broadcast_to(self.bid.values, (n, self.bid.values.size))

    def __repr__(self) -> str:
        return f"PureSource({self.bid!r})"


class MixtureSource(StrategySource):
    """Finite mixture: bid ``bids[i]`` with probability ``probs[i]``."""

    shared_grid = True

    def __init__(self, bids: Sequence[Bid], probs=None):
        if not bids:
            raise ValidationError("mixture needs at least one bid")
        self.bids = tuple(bids)
        bg = self.bids[0].battleground
        if any(b.battleground != bg for b in self.bids):
            raise SpaceMismatch("mixture bids must share a battleground")
        p = np.full(len(bids), 1.0 / len(bids)) if probs is None else np.asarray(probs, dtype=float)
        if p.shape != (len(bids),) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError("mixture probabilities must be nonnegative and sum to 1")
        self.probs = p
        self.grid = _steps.refine(*(b.breakpoints for b in self.bids))
        self._table = np.stack([b.on(self.grid) for b in self.bids])

    def sample(self, rng) -> Bid:
        return self.bids[int(as_generator(rng).choice(len(self.bids), p=self.probs))]

    def sample_grid(self, n, rng):
        idx = as_generator(rng).choice(len(self.bids), size=n, p=self.probs)
        return self.grid, self._table[idx]

    def __repr__(self) -> str:
        return f"MixtureSource({len(self.bids)} bids)"


class FunctionSource(StrategySource):
    """Wraps any ``rng -> Bid`` callable."""

    def __init__(self, fn: Callable[[object], Bid], fair: bool = False, symmetric: bool = False):
        self.fn = fn
        self.fair = fair
        self.symmetric = symmetric

    def sample(self, rng) -> Bid:
        return self.fn(rng)


def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    return RngStream(int(as_generator(rng).integers(2**63)))


def _check_profile(k: int, g: GameSpec) -> None:
    if k != g.k:
        raise ProfileLengthMismatch(f"profile has {k} players, game has {g.k}")


def exact_utilities(p: BidProfile | Sequence[Bid], g: GameSpec) -> PayoffVector:
    """Exact utilities: each piece's value goes to its highest bidders,
    split evenly on exact ties."""
    bids = list(p)
    _check_profile(len(bids), g)
    for b in bids:
        if b.battleground != g.battleground:
            raise SpaceMismatch("bid is not on the game's battleground")
    grid = _steps.refine(*(b.breakpoints for b in bids), g.value.breakpoints)
    vals = np.stack([b.on(grid) for b in bids])[None]
    u = kernels.grid_utilities(vals, g.value.masses_on(grid))[0]
    return PayoffVector(u, g.upsilon)


def _stack_on_common_grid(draws, extra_breaks):
    grid = _steps.refine(*(gr for gr, _ in draws), *extra_breaks)
    vals = np.stack([_steps.on_grid(gr, v, grid) for gr, v in draws], axis=1)
    return grid, vals


def _summary(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and standard errors; constant columns get exactly 0."""
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    se = np.zeros(samples.shape[1:])
    if n > 1:
        se = samples.std(axis=0, ddof=1) / np.sqrt(n)
    const = np.all(samples == samples[:1], axis=0)
    mean = np.where(const, samples[0], mean)
    se = np.where(const, 0.0, se)
    return mean, se


def utility_samples(sources: Sequence[StrategySource], g: GameSpec, n: int, rng) -> np.ndarray:
    """Per-draw utilities, shape ``(n, k)``.

    Player ``i`` draws from stream ``rng.split(i).split(chunk)``, so results
    do not depend on how the work is chunked across calls.
    """
    _check_profile(len(sources), g)
    if n < 1:
        raise ValidationError("need at least one draw")
    root = as_stream(rng)
    out = np.empty((n, g.k))
    masses_cache: dict[bytes, np.ndarray] = {}
    for c, start in enumerate(range(0, n, CHUNK)):
        size = min(CHUNK, n - start)
        streams = [root.split(i).split(c) for i in range(g.k)]
        if all(s.shared_grid for s in sources):
            draws = [s.sample_grid(size, st) for s, st in zip(sources, streams)]
            grid, vals = _stack_on_common_grid(draws, [g.value.breakpoints])
            key = grid.tobytes()
            if key not in masses_cache:
                masses_cache[key] = g.value.masses_on(grid)
            out[start : start + size] = kernels.grid_utilities(vals, masses_cache[key])
        else:
            for d in range(size):
                bids = [s.sample(st) for s, st in zip(sources, streams)]
                out[start + d] = exact_utilities(bids, g).utilities
    return out


def monte_carlo_utilities(
    sources: Sequence[StrategySource], g: GameSpec, n: int, rng
) -> tuple[PayoffVector, np.ndarray]:
    """Sample means and standard errors of the exact utilities over ``n``
    independent profile draws."""
    mean, se = _summary(utility_samples(sources, g, n, rng))
    return PayoffVector(mean, g.upsilon), se


class OpponentPanel:
    """A fixed set of ``n`` opponent draws used to score many deviations.

    Scoring every deviation against the same draws (common random numbers)
    makes payoff differences between deviations much less noisy.
    """

    def __init__(self, opponents: Sequence[StrategySource], g: GameSpec, n: int, rng):
        if len(opponents) != g.k - 1:
            raise ProfileLengthMismatch(f"need {g.k - 1} opponents for a {g.k}-player game, got {len(opponents)}")
        root = as_stream(rng)
        self.game = g
        self.n = n
        self.shared = all(s.shared_grid for s in opponents)
        streams = [root.split(i) for i in range(len(opponents))]
        if self.shared:
            draws = [s.sample_grid(n, st) for s, st in zip(opponents, streams)]
            if draws:
                self.grid, self.values = _stack_on_common_grid(draws, [g.value.breakpoints])
            else:
                self.grid, self.values = g.value.breakpoints, np.zeros((n, 0, g.value.densities.size))
        else:
            self.profiles = [[s.sample(st) for s, st in zip(opponents, streams)] for _ in range(n)]

    def samples(self, psi: Bid) -> np.ndarray:
        """Utility of ``psi`` against each stored opponent draw."""
        g = self.game
        if psi.battleground != g.battleground:
            raise SpaceMismatch("deviation is not on the game's battleground")
        if self.shared:
            grid = _steps.refine(self.grid, psi.breakpoints)
            opp = _steps.on_grid(self.grid, self.values, grid)
            return kernels.deviator_utility(psi.on(grid), opp, g.value.masses_on(grid))
        return np.array([exact_utilities(list(prof) + [psi], g).utilities[-1] for prof in self.profiles])

    def payoff(self, psi: Bid) -> tuple[float, float]:
        mean, se = _summary(self.samples(psi)[:, None])
        return float(mean[0]), float(se[0])


def deviation_payoff_mc(psi: Bid, opponents: Sequence[StrategySource], g: GameSpec, n: int, rng) -> tuple[float, float]:
    """Monte Carlo payoff (mean, standard error) of a fixed deviation."""
    return OpponentPanel(opponents, g, n, rng).payoff(psi)


def deviation_payoff_oracle(psi: Bid, g: GameSpec) -> float:
    """Exact expected utility of ``psi`` against ``k - 1`` equilibrium players.

    The strongest opponent bid at ``x`` is uniform on
    ``[0, k * ratio(x) / upsilon]``, so ``psi`` wins there with probability
    ``min(1, psi(x) * upsilon / (k * ratio(x)))``.
    """
    if not g.symmetric:
        raise AsymmetricGame("the deviation oracle assumes unit budgets for every player")
    if psi.battleground != g.battleground:
        raise SpaceMismatch("deviation is not on the game's battleground")
    if g.k == 1:
        return g.upsilon
    grid = _steps.refine(psi.breakpoints, g.beta.breakpoints, g.value.breakpoints)
    ratio = g.value.on(grid) / g.beta.on(grid)
    win = np.minimum(1.0, psi.on(grid) * g.upsilon / (g.k * ratio))
    return float(np.sum(win * g.value.masses_on(grid)))
