"""Command-line interface.

Bids are read and written in the game's original budget units; internally
the budget measure is normalized to unit mass.  Every stochastic report
records its seed, stream and draw count so it can be re-run exactly.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, _steps
from .equilibrium import EquilibriumSampler
from .errors import BlottoError, ParseError, ValidationError
from .game import (
    Bid,
    BidProfile,
    GameSpec,
    bid_integral,
    circle_blotto,
    discrete_blotto,
    interval_blotto,
    validate_bid,
)
from .payoff import MixtureSource, PureSource, exact_utilities
from .rand import RngStream
from .verify.cdf import Cdf
from .verify.exploits import equilibrium_exploit_gains, exploit_atom_strategy
from .verify.ks import ks_marginal_test
from .verify.probes import Probe, best_response_probe

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2
STOCHASTIC = {"sample", "certify", "marginal", "exploit"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    game: str
    seed: int | None = None
    stream: int = 0
    n: int | None = None
    format: str = "json"
    out: str | None = None
    points: str | None = None
    profile: str | None = None
    probes: str | None = None
    sources: str = "equilibrium"

    def __post_init__(self):
        if self.command in STOCHASTIC and self.seed is None:
            raise ValidationError(f"'{self.command}' is stochastic and needs --seed")
        if self.format not in ("json", "csv"):
            raise ValidationError(f"unknown format {self.format!r}")

    @property
    def rng(self) -> RngStream:
        return RngStream(self.seed, self.stream)


def _builtin(name: str) -> GameSpec:
    parts = name.split(":")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError:
        raise ParseError(f"bad builtin game {name!r}") from None
    if parts[0] == "interval-blotto" and len(nums) == 1:
        return interval_blotto(nums[0])
    if parts[0] == "circle-blotto" and len(nums) == 1:
        return circle_blotto(nums[0])
    if parts[0] == "discrete-blotto" and len(nums) == 2:
        return discrete_blotto(nums[0], np.ones(nums[1]))
    raise ParseError(
        f"unknown game {name!r}; builtins are interval-blotto:k, discrete-blotto:k:n, circle-blotto:k, or a JSON file"
    )


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None


def load_game_spec(spec: str) -> GameSpec:
    """A builtin game name or the path of a game JSON file."""
    if spec.split(":")[0] in ("interval-blotto", "circle-blotto", "discrete-blotto"):
        return _builtin(spec)
    data = _read_json(spec)
    if not isinstance(data, dict):
        raise ParseError("game JSON must be an object")
    return GameSpec.from_json(data)


def _game_json(cfg: RunConfig, g: GameSpec) -> dict:
    return {"spec": cfg.game, "k": g.k, "upsilon": g.upsilon, "budget_scale": g.budget_scale}


def _run_json(cfg: RunConfig) -> dict:
    out = {"seed": cfg.seed, "stream": cfg.stream}
    if cfg.n is not None:
        out["n"] = cfg.n
    return out


def _load_profile(path: str, g: GameSpec) -> list[Bid]:
    prof = BidProfile.from_json(_read_json(path), g.battleground)
    return [g.bid_from_original(b) for b in prof]


def _sources(spec: str, g: GameSpec):
    if spec == "equilibrium":
        return "equilibrium"
    kind, _, arg = spec.partition(":")
    if kind == "constant":
        try:
            c = float(arg)
        except ValueError:
            raise ParseError(f"bad constant source {spec!r}") from None
        return [PureSource(g.bid_from_original(Bid.constant(c, g.battleground)))] * (g.k - 1)
    if kind == "file":
        data = _read_json(arg)
        bids = [g.bid_from_original(b) for b in BidProfile.from_json(data, g.battleground)]
        probs = data.get("probs") if isinstance(data, dict) else None
        if probs is not None:
            return [MixtureSource(bids, probs)] * (g.k - 1)
        if len(bids) not in (g.k - 1, g.k):
            raise ValidationError(f"source file lists {len(bids)} bids; need {g.k - 1} or {g.k} (or give 'probs')")
        return [PureSource(b) for b in bids]
    raise ParseError(f"unknown source {spec!r}; use equilibrium, constant:c or file:path")


def _cmd_sample(cfg: RunConfig, g: GameSpec):
    n = 1 if cfg.n is None else cfg.n
    sampler = EquilibriumSampler(g)
    rng = cfg.rng
    bids = []
    for _ in range(n):
        b = sampler.draw(rng)
        bids.append({"bid": g.bid_to_original(b).to_json(), "integral": bid_integral(b, g.beta)})
    rows = [
        {"index": i, "integral": d["integral"], "bid": json.dumps(d["bid"], separators=(",", ":"))}
        for i, d in enumerate(bids)
    ]
    return {"command": "sample", "game": _game_json(cfg, g), "run": _run_json(cfg), "bids": bids}, rows, EXIT_OK


def _cmd_payoff(cfg: RunConfig, g: GameSpec):
    if cfg.profile is None:
        raise ValidationError("'payoff' needs --profile")
    bids = _load_profile(cfg.profile, g)
    u = exact_utilities(bids, g)
    players = []
    for i, b in enumerate(bids):
        chk = validate_bid(b, g, i)
        players.append({"player": i + 1, "utility": float(u.utilities[i]), "spend": chk.integral, "within_budget": chk.ok})
    report = {"command": "payoff", "game": _game_json(cfg, g), "total": u.total, "players": players}
    return report, players, EXIT_OK


def _cmd_certify(cfg: RunConfig, g: GameSpec):
    n = 10_000 if cfg.n is None else cfg.n
    probes = None
    if cfg.probes is not None:
        data = _read_json(cfg.probes)
        prof = BidProfile.from_json(data, g.battleground)
        probes = [Probe(f"file:{i}", g.bid_from_original(b)) for i, b in enumerate(prof)]
    cert = best_response_probe(_sources(cfg.sources, g), g, probes, n, cfg.rng)
    report = {"command": "certify", "game": _game_json(cfg, g), "run": _run_json(cfg) | {"n": n}, "sources": cfg.sources}
    report["certificate"] = cert.to_json()
    if cert.witness is not None:
        report["certificate"]["witness"]["bid"] = g.bid_to_original(cert.witness.bid).to_json()
    rows = [r.to_json() for r in cert.probes]
    return report, rows, EXIT_REFUTED if cert.witness is not None else EXIT_OK


def _points(cfg: RunConfig, g: GameSpec):
    if cfg.points is None:
        raise ValidationError("'marginal' needs --points")
    try:
        pts = [float(p) for p in cfg.points.split(",") if p.strip()]
    except ValueError:
        raise ParseError(f"bad --points {cfg.points!r}") from None
    if g.battleground.is_discrete:
        return [int(p) for p in pts]
    return pts


def _cmd_marginal(cfg: RunConfig, g: GameSpec):
    n = 10_000 if cfg.n is None else cfg.n
    src = _sources(cfg.sources, g)
    source = EquilibriumSampler(g) if src == "equilibrium" else src[0]
    reports = [ks_marginal_test(source, g, x, n, cfg.rng.split(i)) for i, x in enumerate(_points(cfg, g))]
    rows = [r.to_json() for r in reports]
    report = {"command": "marginal", "game": _game_json(cfg, g), "run": _run_json(cfg) | {"n": n}, "sources": cfg.sources}
    report["reports"] = rows
    return report, rows, EXIT_OK


def _bid_law(bid: Bid, g: GameSpec) -> Cdf:
    """Law of ``bid(x)`` for ``x`` drawn from the budget measure."""
    grid = _steps.refine(bid.breakpoints, g.beta.breakpoints)
    return Cdf.discrete(bid.on(grid), g.beta.masses_on(grid))


def _profile_exploits(bids: list[Bid], g: GameSpec) -> dict:
    """Atom exploit by the last player against a pure profile.

    A pure profile's marginals are point masses, so only the atom
    construction applies; the other two are reported as not applicable.
    """
    out = {}
    before = exact_utilities(bids, g).utilities[-1]
    try:
        a, eta = max(_bid_law(bids[-1], g).atoms, key=lambda t: t[1])
        transform, bound = exploit_atom_strategy(g, a, eta, 0.1)
        after = exact_utilities(bids[:-1] + [transform(bids[-1])], g).utilities[-1]
        out["atom"] = {"applicable": True, "atom": a, "mass": eta, "delta": 0.1, "bound": bound, "gain": float(after - before)}
    except BlottoError as exc:
        out["atom"] = {"applicable": False, "reason": str(exc)}
    reason = "needs an atomless marginal; pure-profile marginals are point masses"
    out["mass_move"] = {"applicable": False, "reason": reason}
    out["step_swap"] = {"applicable": False, "reason": reason}
    return out


def _cmd_exploit(cfg: RunConfig, g: GameSpec):
    n = 2_000 if cfg.n is None else cfg.n
    report = {"command": "exploit", "game": _game_json(cfg, g), "run": _run_json(cfg) | {"n": n}}
    if cfg.profile is not None:
        bids = _load_profile(cfg.profile, g)
        if len(bids) != g.k:
            raise ValidationError(f"profile has {len(bids)} bids for a {g.k}-player game")
        report["against"] = "profile"
        report["exploits"] = _profile_exploits(bids, g)
    else:
        report["against"] = "equilibrium"
        report["exploits"] = equilibrium_exploit_gains(g, n, cfg.rng)
    rows = [{"exploit": k} | v for k, v in report["exploits"].items()]
    return report, rows, EXIT_OK


COMMANDS = {
    "sample": _cmd_sample,
    "payoff": _cmd_payoff,
    "certify": _cmd_certify,
    "marginal": _cmd_marginal,
    "exploit": _cmd_exploit,
}


def _to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields: list[str] = []
    for r in rows:
        fields += [k for k in r if k not in fields]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit status and the report text."""
    g = load_game_spec(cfg.game)
    report, rows, status = COMMANDS[cfg.command](cfg, g)
    text = json.dumps(report, indent=2) + "\n" if cfg.format == "json" else _to_csv(rows)
    if cfg.out is not None:
        Path(cfg.out).write_text(text)
    return status, text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="measure-blotto", description="Equilibria of multiplayer Blotto games on measure spaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "sample": "draw equilibrium bids and their budget integrals",
        "payoff": "exact utilities of a bid profile",
        "certify": "probe a strategy profile for profitable deviations",
        "marginal": "KS tests of sampled bid marginals at given points",
        "exploit": "run the atom, mass-move and step-swap deviations",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("--game", required=True, help="interval-blotto:k, discrete-blotto:k:n, circle-blotto:k, or a game JSON file")
        s.add_argument("--seed", type=int)
        s.add_argument("--stream", type=int, default=0)
        s.add_argument("--n", type=int)
        s.add_argument("--format", choices=("json", "csv"), default="json")
        s.add_argument("--out")
        if name == "marginal":
            s.add_argument("--points", required=True, help="comma-separated points (battlefield numbers for discrete games)")
        if name in ("payoff", "exploit"):
            s.add_argument("--profile", required=name == "payoff", help="bid-profile JSON file")
        if name in ("certify", "marginal"):
            s.add_argument("--sources", default="equilibrium", help="equilibrium, constant:c or file:path")
        if name == "certify":
            s.add_argument("--probes", help="JSON list of probe bids (default: built-in family)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    try:
        cfg = RunConfig(**fields)
        status, text = run(cfg)
    except BlottoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.out is None:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
