"""Best-response probing and equilibrium certificates."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .. import _steps
from ..equilibrium import EquilibriumSampler
from ..errors import InfeasibleProbe, ProfileLengthMismatch, ValidationError
from ..game import Bid, GameSpec, bid_integral, validate_bid
from ..payoff import OpponentPanel, as_stream, deviation_payoff_oracle, monte_carlo_utilities
from ..rand import as_generator
from .cdf import Cdf
from .ks import KsReport, ks_marginal_test, values_at

REFUTE_SIGMAS = 3.0
REFUTE_FLOOR = 1e-12
QUANTILE_PIECES = 64


class Probe(NamedTuple):
    name: str
    bid: Bid


@dataclass(frozen=True)
class ProbeResult:
    name: str
    payoff: float
    stderr: float
    gap: float

    def to_json(self) -> dict:
        return {"name": self.name, "payoff": self.payoff, "stderr": self.stderr, "gap": self.gap}


@dataclass
class EquilibriumCertificate:
    """Outcome of probing a strategy profile for profitable deviations.

    ``consistent`` means that no probe beat ``upsilon / k`` by more than
    three standard errors.  It is evidence, not a proof of equilibrium.
    """

    k: int
    upsilon: float
    n: int
    exact: bool
    payoff_means: np.ndarray
    payoff_stderr: np.ndarray
    probes: list[ProbeResult]
    ks: list[KsReport] = field(default_factory=list)
    witness: Probe | None = None

    @property
    def target(self) -> float:
        return self.upsilon / self.k

    @property
    def verdict(self) -> str:
        return "consistent" if self.witness is None else "refuted"

    @property
    def best(self) -> ProbeResult | None:
        return max(self.probes, key=lambda r: r.gap) if self.probes else None

    @property
    def max_gap(self) -> float:
        return self.best.gap if self.probes else 0.0

    @property
    def max_gap_stderr(self) -> float:
        return self.best.stderr if self.probes else 0.0

    def to_json(self) -> dict:
        best = self.best
        out = {
            "verdict": self.verdict,
            "k": self.k,
            "upsilon": self.upsilon,
            "target": self.target,
            "n": self.n,
            "exact_gaps": self.exact,
            "payoff_means": [float(u) for u in self.payoff_means],
            "payoff_stderr": [float(s) for s in self.payoff_stderr],
            "max_gap": self.max_gap,
            "max_gap_stderr": self.max_gap_stderr,
            "max_gap_probe": best.name if best else None,
            "probes": [r.to_json() for r in self.probes],
            "ks": [r.to_json() for r in self.ks],
            "witness": None,
        }
        if self.witness is not None:
            out["witness"] = {"name": self.witness.name, "bid": self.witness.bid.to_json()}
        return out


# -- probe family -------------------------------------------------------------


def _prefix_bid(g: GameSpec, c: float) -> Bid:
    """``c`` on a budget-measure prefix of mass ``min(1, 1/c)``, zero elsewhere."""
    bg = g.battleground
    if c <= 1.0:
        return Bid.constant(c, bg)
    if bg.is_discrete:
        masses = g.beta.piece_masses()
        cum = np.cumsum(masses)
        w = np.where(cum * c <= 1.0 + 1e-12, c, 0.0)
        return Bid.discrete(w)
    cut = float(g.beta.quantile(1.0 / c))
    if cut <= 0.0:
        return Bid.zero(bg)
    if cut >= bg.length:
        return Bid.constant(c, bg)
    return Bid(bg, [0.0, cut, bg.length], [c, 0.0])


def constant_probes(g: GameSpec) -> list[Probe]:
    out = []
    for c in np.arange(1, 8 * g.k + 1) * 0.25:
        out.append(Probe(f"constant:{c:g}", _prefix_bid(g, float(c))))
    return out


def _unit_budget(bid: Bid, g: GameSpec) -> Bid:
    total = bid_integral(bid, g.beta)
    return bid.scaled(1.0 / total) if total > 0 else bid


def random_step_bid(g: GameSpec, rng, max_pieces: int = 8) -> Bid:
    """A random step bid with 1 to ``max_pieces`` pieces spending the whole budget."""
    gen = as_generator(rng)
    bg = g.battleground
    p = int(gen.integers(1, max_pieces + 1))
    if bg.is_discrete:
        w = np.zeros(bg.n)
        idx = gen.choice(bg.n, size=min(p, bg.n), replace=False)
        w[idx] = gen.exponential(size=idx.size)
        if not np.any(w > 0):
            w[idx[0]] = 1.0
        return _unit_budget(Bid.discrete(w), g)
    cuts = np.sort(gen.random(p - 1)) * bg.length
    breaks = np.unique(np.concatenate(([0.0], cuts, [bg.length])))
    vals = gen.exponential(size=breaks.size - 1)
    vals[int(gen.integers(vals.size))] += 0.5
    return _unit_budget(Bid(bg, breaks, vals), g)


def random_probes(g: GameSpec, count: int, rng) -> list[Probe]:
    gen = as_generator(rng)
    return [Probe(f"random:{i}", random_step_bid(g, gen)) for i in range(count)]


def quantile_bid(g: GameSpec, law: Cdf, pieces: int = QUANTILE_PIECES) -> Bid:
    """Deterministic bid whose normalized values follow ``law``.

    Budget-measure position ``u`` in [0, 1] gets the average of the
    generalized inverse of ``law`` over its piece, scaled by the local
    value-to-budget ratio so the bid tracks where value is.
    """
    bg = g.battleground
    if bg.is_discrete:
        u = np.concatenate(([0.0], np.cumsum(g.beta.piece_masses())))
        u[-1] = 1.0
        grid = np.arange(bg.n + 1.0)
    else:
        u = np.linspace(0.0, 1.0, pieces + 1)
        cuts = g.beta.quantile(u)
        cuts[0], cuts[-1] = 0.0, bg.length
        grid = np.unique(cuts)
        u = g.beta.cumulative(grid)
        u[-1] = 1.0
    # piece averages of the quantile function by a 16-point midpoint rule
    s = (np.arange(16) + 0.5) / 16
    p = u[:-1, None] + (u[1:] - u[:-1])[:, None] * s
    z = np.asarray(law.ppf(p)).mean(axis=1)
    fine = _steps.refine(grid, g.ratio.breakpoints)
    vals = _steps.on_grid(grid, z, fine) * g.ratio.on(fine) / g.upsilon
    return _unit_budget(Bid(bg, fine, vals), g)


def default_probes(g: GameSpec, rng, *, count: int = 50, law: Cdf | None = None) -> list[Probe]:
    """Constant prefix bids, random step bids and one quantile-strategy bid.

    ``law`` is the normalized opponent marginal for the quantile probe; it
    defaults to the equilibrium law.
    """
    probes = constant_probes(g) + random_probes(g, count, rng)
    if g.k >= 2:
        probes.append(Probe("inverse-cdf", quantile_bid(g, law or Cdf.equilibrium(g.k))))
    return probes


def empirical_normalized_marginal(source, g: GameSpec, n: int, rng) -> Cdf:
    """Pooled law of ``bid(x) * upsilon / ratio(x)`` at random budget positions."""
    gen = as_generator(rng)
    pts = 5
    u = (np.arange(pts) + gen.random(pts)) / pts
    bg = g.battleground
    vals = []
    for ui in u:
        if bg.is_discrete:
            x = int(np.searchsorted(np.cumsum(g.beta.piece_masses()), ui * (1 - 1e-15))) + 1
        else:
            x = float(g.beta.quantile(ui))
            if bg.kind == "interval":
                x = min(x, 1.0)
        r = float(g.ratio.at(x))
        vals.append(values_at(source, g, x, max(1, n // pts), gen) * g.upsilon / r)
    return Cdf.empirical(np.concatenate(vals))


# -- certificate --------------------------------------------------------------


def _as_probes(probes) -> list[Probe]:
    out = []
    for i, p in enumerate(probes):
        out.append(p if isinstance(p, Probe) else Probe(f"probe:{i}", p))
    return out


def ks_points(g: GameSpec, count: int = 3):
    bg = g.battleground
    if bg.is_discrete:
        return sorted({int(j) for j in np.linspace(1, bg.n, count)})
    return [float(x) for x in g.beta.quantile((np.arange(count) + 0.5) / count)]


def best_response_probe(
    sources,
    g: GameSpec,
    probes: Sequence | None = None,
    n: int = 100_000,
    rng=0,
    *,
    points=None,
) -> EquilibriumCertificate:
    """Probe a profile for profitable unilateral deviations by the last player.

    ``sources`` is ``"equilibrium"`` or a list of ``k - 1`` opponent sources
    (optionally followed by the deviator's own source).  Equilibrium
    opponents are scored exactly with the deviation oracle; anything else is
    scored by Monte Carlo on one shared panel of opponent draws.
    """
    root = as_stream(rng)
    if g.k == 1:
        return EquilibriumCertificate(1, g.upsilon, n, True, np.array([g.upsilon]), np.zeros(1), [])
    exact = isinstance(sources, str)
    if exact:
        if sources != "equilibrium":
            raise ValidationError(f"unknown source spec {sources!r}")
        sampler = EquilibriumSampler(g)
        opponents = [sampler] * (g.k - 1)
        own = sampler
    else:
        sources = list(sources)
        if len(sources) not in (g.k - 1, g.k):
            raise ProfileLengthMismatch(f"need {g.k - 1} or {g.k} sources, got {len(sources)}")
        opponents = sources[: g.k - 1]
        own = sources[g.k - 1] if len(sources) == g.k else sources[0]

    if probes is None:
        law = None
        if not exact:
            law = empirical_normalized_marginal(opponents[0], g, min(n, 20_000), root.split(3))
        probes = default_probes(g, root.split(2), law=law)
    probes = _as_probes(probes)
    for p in probes:
        chk = validate_bid(p.bid, g, g.k - 1)
        if not chk.ok:
            raise InfeasibleProbe(f"probe {p.name} spends {chk.integral!r} > budget {g.budgets[-1]!r}")

    means, se = monte_carlo_utilities(list(opponents) + [own], g, n, root.split(0))
    target = g.upsilon / g.k
    results = []
    if exact:
        for p in probes:
            u = deviation_payoff_oracle(p.bid, g)
            results.append(ProbeResult(p.name, u, 0.0, u - target))
    else:
        panel = OpponentPanel(opponents, g, n, root.split(1))
        for p in probes:
            u, s = panel.payoff(p.bid)
            results.append(ProbeResult(p.name, u, s, u - target))

    witness = None
    best_margin = 0.0
    for p, r in zip(probes, results):
        margin = r.gap - (REFUTE_SIGMAS * r.stderr + REFUTE_FLOOR)
        if margin > best_margin:
            best_margin, witness = margin, p

    pts = ks_points(g) if points is None else list(points)
    ks = [ks_marginal_test(opponents[0], g, x, n, root.split(4).split(i)) for i, x in enumerate(pts)]
    return EquilibriumCertificate(g.k, g.upsilon, n, exact, means.utilities, se, results, ks, witness)
