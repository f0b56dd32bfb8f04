"""Deviations that beat any symmetric profile whose marginal is not the
equilibrium law, plus the soft-budget (Lotto) check."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .. import _steps
from ..errors import (
    DegenerateInterval,
    DeltaOutOfRange,
    NoFeasibleEpsilon,
    NotFlatOnGap,
    ValidationError,
)
from ..game import Bid, GameSpec, bid_integral
from ..measure import Battleground
from ..payoff import as_stream
from .cdf import _QUAD, Cdf

ATOM_EPS_CAP = 1e-3
MEAN_TOL = 1e-12


# -- atom exploit ---------------------------------------------------------------


def atom_gain_bound(k: int, eta: float, delta: float) -> float:
    """Lower bound ``((k-1)/k)(1-delta) eta**k - delta/k`` on the atom exploit's gain."""
    return (k - 1) / k * (1.0 - delta) * eta**k - delta / k


@dataclass(frozen=True)
class AtomExploit:
    """Maps a sampled bid to its atom-exploiting modification.

    The bid is zeroed on the budget-measure prefix of mass ``delta``, pieces
    bidding exactly ``a`` are raised by a small ``eps``, and any leftover
    budget is spread evenly over the highest value-ratio region past the
    prefix so the result spends exactly the unit budget.
    """

    game: GameSpec
    a: float
    eta: float
    delta: float
    bound: float

    def __call__(self, psi: Bid) -> Bid:
        g = self.game
        bg = g.battleground
        cut = float(g.beta.quantile(self.delta))
        grid = _steps.refine(psi.breakpoints, g.ratio.breakpoints, np.array([0.0, cut, bg.length]))
        vals = np.array(psi.on(grid), dtype=float)
        mids = 0.5 * (grid[:-1] + grid[1:])
        live = mids >= cut
        vals[~live] = 0.0
        beta_mass = g.beta.masses_on(grid)

        raised = live & (vals == self.a)
        slack = 1.0 - float(np.sum(vals * beta_mass))
        rmass = float(np.sum(beta_mass[raised]))
        if rmass > 0 and slack > 0:
            vals[raised] += min(slack / rmass, ATOM_EPS_CAP)

        deficit = 1.0 - float(np.sum(vals * beta_mass))
        if deficit > 0:
            ratio = g.ratio.on(grid)
            top = live & (ratio == ratio[live].max())
            vals[top] += deficit / float(np.sum(beta_mass[top]))
        return Bid(bg, grid, vals)


def exploit_atom_strategy(g: GameSpec, a: float, eta: float, delta: float) -> tuple[AtomExploit, float]:
    """Atom-exploit transform for an atom of mass ``eta`` at bid level ``a``.

    Returns the transform and the lower bound on its expected gain.
    """
    if not 0.0 < delta < 1.0:
        raise DeltaOutOfRange(f"delta must lie in (0, 1), got {delta!r}")
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"atom mass must lie in [0, 1], got {eta!r}")
    if g.battleground.is_discrete:
        raise ValidationError("the atom exploit needs a continuous battleground")
    bound = atom_gain_bound(g.k, eta, delta)
    return AtomExploit(g, float(a), float(eta), float(delta), bound), bound


# -- mass-move exploit ----------------------------------------------------------


def _moved(base: Cdf, a: float, b: float, Delta: float, delta: float, eps: float, mu: float) -> Cdf:
    h = base.with_knots([a + eps])
    t = h.knots
    atom = h.atom.copy()
    seg = h.seg.copy()
    lo, hi = b, b + delta
    atom[(t >= lo) & (t < hi)] = 0.0
    seg[(t[:-1] >= lo) & (t[1:] <= hi)] = 0.0
    atom[np.searchsorted(t, b + Delta)] += mu / 2
    atom[np.searchsorted(t, a + eps)] += mu / 2
    return Cdf(t, atom, seg, h.origin, h.gamma)


def exploit_mass_move_cdf(
    gCdf: Cdf, a: float, b: float, Delta: float, delta: float, *, require_flat: bool = True
) -> Cdf:
    """Move the mass of ``[b, b + delta)`` half up to ``b + Delta`` and half
    down to ``a + eps``, with ``eps`` solved so the mean stays 1.

    With ``require_flat`` (the default) the law must have no mass on the gap
    ``(a, b)``; turning it off applies the same surgery to any law, which is
    how the move is shown to be unprofitable against the equilibrium law.
    """
    if gCdf.power_ != 1:
        raise ValidationError("mass move needs a power-1 CDF")
    gap = b - a
    if not 0.0 < delta < Delta < gap:
        raise ValidationError(f"need 0 < delta < Delta < b - a, got delta={delta}, Delta={Delta}, b-a={gap}")
    if require_flat and gCdf.left_limit(b) - gCdf.cdf(a) > 0.0:
        raise NotFlatOnGap(f"law puts mass {gCdf.left_limit(b) - gCdf.cdf(a)!r} on ({a}, {b})")
    base = gCdf.with_knots([b, b + delta, b + Delta])
    mu = float(base.left_limit(b + delta) - base.left_limit(b))
    if mu <= 0.0:
        raise NoFeasibleEpsilon(f"no mass on [{b}, {b + delta}) to move")
    target = gCdf.mean()

    def excess(eps):
        return _moved(base, a, b, Delta, delta, eps, mu).mean() - target

    lo, hi = 1e-300, gap
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo > 0 or f_hi < 0:
        raise NoFeasibleEpsilon(f"mean cannot be restored with eps in (0, {gap})")
    eps = optimize.brentq(excess, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    out = _moved(base, a, b, Delta, delta, eps, mu)
    if abs(out.mean() - target) > MEAN_TOL:
        raise NoFeasibleEpsilon(f"mean restored only to {out.mean()!r}")
    return out


# -- step-swap exploit ------------------------------------------------------------


def _piece_means(law: Cdf, edges: np.ndarray) -> np.ndarray:
    out = np.empty(edges.size - 1)
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        val, _ = integrate.quad(lambda p: float(law.ppf(p)), lo, hi, **_QUAD)
        out[j] = val / (hi - lo)
    return out


@dataclass(frozen=True)
class StepSwap:
    baseline: Bid
    swapped: Bid
    window: tuple[float, float]


def step_swap(gCdf: Cdf, a: float, b: float, eps: float, pieces: int = 256) -> StepSwap:
    """Quantile bid on [0, 1] and its swap on the window where it is near ``a``.

    On the window ``{x : |G^{-1}(x) - a| < eps}`` the swapped bid plays
    ``b`` on an initial stretch and 0 afterwards, keeping the same spend.
    """
    top = gCdf.support[1]
    if not (0.0 <= a < b <= top) or not eps > 0:
        raise DegenerateInterval(f"need 0 <= a < b <= {top} and eps > 0, got a={a}, b={b}, eps={eps}")
    lo = float(gCdf.cdf(a - eps)) if a - eps > gCdf.support[0] else 0.0
    hi = float(gCdf.left_limit(a + eps))
    if not hi > lo:
        raise DegenerateInterval(f"the window around {a} has no mass")
    edges = np.unique(np.concatenate((np.linspace(0.0, 1.0, pieces + 1), [lo, hi])))
    vals = _piece_means(gCdf, edges)
    total = float(np.sum(vals * np.diff(edges)))
    vals = vals / total

    bg = Battleground.interval()
    inside = (edges[:-1] >= lo) & (edges[1:] <= hi)
    spend = float(np.sum(vals[inside] * np.diff(edges)[inside]))
    width = spend / b
    if width > hi - lo:
        raise DegenerateInterval(f"spend {spend!r} does not fit at level {b} inside the window")
    cut = lo + width
    base = Bid(bg, edges, vals)
    outside = ~inside
    new_edges = np.unique(np.concatenate((edges[:-1][outside], edges[1:][outside], [lo, cut, hi])))
    new_vals = base.on(new_edges).copy()
    mids = 0.5 * (new_edges[:-1] + new_edges[1:])
    new_vals[(mids >= lo) & (mids < cut)] = b
    new_vals[(mids >= cut) & (mids < hi)] = 0.0
    return StepSwap(base, Bid(bg, new_edges, new_vals), (lo, hi))


def exploit_step_swap(gCdf: Cdf, a: float, b: float, eps: float, pieces: int = 256) -> Bid:
    return step_swap(gCdf, a, b, eps, pieces).swapped


def payoff_vs_law(psi: Bid, m: Cdf) -> float:
    """Expected win mass of a bid on [0, 1] when the strongest opponent bid
    at every point has law ``m`` (ties count as wins)."""
    return float(np.sum(np.diff(psi.breakpoints) * m.cdf(psi.values)))


# -- soft budget ------------------------------------------------------------------


@dataclass(frozen=True)
class LottoCheck:
    passed: bool
    mean: float
    stderr: float
    budget: float
    n: int

    @property
    def upper(self) -> float:
        return self.mean + 3.0 * self.stderr

    def to_json(self) -> dict:
        return {"passed": self.passed, "mean": self.mean, "stderr": self.stderr, "budget": self.budget, "n": self.n}


def bid_integrals(source, g: GameSpec, n: int, rng) -> np.ndarray:
    if getattr(source, "shared_grid", False):
        grid, vals = source.sample_grid(n, rng)
        fine = _steps.refine(grid, g.beta.breakpoints)
        return _steps.on_grid(grid, vals, fine) @ g.beta.masses_on(fine)
    return np.array([bid_integral(source.sample(rng), g.beta) for _ in range(n)])


def lotto_budget_check(source, g: GameSpec, player: int, n: int, rng) -> LottoCheck:
    """Expected-budget test: pass iff mean spend <= budget + 3 standard errors."""
    if n < 30:
        raise ValidationError(f"the soft-budget check needs n >= 30, got {n}")
    if not 0 <= player < g.k:
        raise ValidationError(f"player index {player} outside 0..{g.k - 1}")
    spend = bid_integrals(source, g, n, as_stream(rng).split(player))
    mean = float(spend.mean())
    se = float(spend.std(ddof=1) / np.sqrt(n))
    budget = g.budgets[player]
    return LottoCheck(bool(mean <= budget + 3.0 * se), mean, se, budget, n)



# -- equilibrium law as a fixed point -------------------------------------------


def equilibrium_exploit_gains(g: GameSpec, n: int, rng, *, delta: float = 0.1, a: float = 0.5, b: float = 1.5) -> dict:
    """Run the three constructions against equilibrium opponents.

    The atom exploit is applied to ``n`` of the deviator's own equilibrium
    draws and each result is scored exactly with the deviation oracle.  The
    mass move and step swap act on the normalized equilibrium law and are
    scored exactly against the law of the strongest opponent bid.
    """
    from ..equilibrium import EquilibriumSampler
    from ..payoff import deviation_payoff_oracle
    from .cdf import deviation_payoff_from_marginal

    if g.k < 2:
        raise ValidationError("exploits need at least two players")
    law = Cdf.equilibrium(g.k)
    m = law.power(g.k - 1)
    target = g.upsilon / g.k
    out = {}

    if not g.battleground.is_discrete:
        transform, bound = exploit_atom_strategy(g, a=1.0, eta=0.0, delta=delta)
        sampler = EquilibriumSampler(g)
        stream = as_stream(rng)
        pay = np.array([deviation_payoff_oracle(transform(sampler.draw(stream)), g) for _ in range(n)])
        se = float(pay.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        out["atom"] = {"gain": float(pay.mean() - target), "stderr": se, "bound": bound, "n": n}

    h = exploit_mass_move_cdf(law, a, b, Delta=0.5 * (b - a), delta=0.05 * (b - a), require_flat=False)
    gain = deviation_payoff_from_marginal(h, m) - deviation_payoff_from_marginal(law, m)
    out["mass_move"] = {"gain": gain, "stderr": 0.0}

    swap = step_swap(law, a, b, eps=0.05)
    gain = payoff_vs_law(swap.swapped, m) - payoff_vs_law(swap.baseline, m)
    out["step_swap"] = {"gain": gain, "stderr": 0.0}
    return out
