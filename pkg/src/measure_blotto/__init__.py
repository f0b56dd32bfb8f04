"""Multiplayer Colonel Blotto on measure spaces.

Games, bids and budget checks live in :mod:`.game`; the Dirichlet
equilibrium sampler in :mod:`.equilibrium`; exact and Monte Carlo payoffs in
:mod:`.payoff`; certification tools in :mod:`.verify`.
"""
from .equilibrium import (
    EquilibriumMarginal,
    EquilibriumSampler,
    EquipartitionMap,
    default_partition,
    equilibrium_marginal,
    equipartition_circle,
    equipartition_discrete,
    equipartition_interval,
    marginal_cdf,
    sample_equilibrium_bid,
)
from .errors import BlottoError, ParseError, ValidationError
from .game import (
    Bid,
    BidProfile,
    BudgetCheck,
    GameSpec,
    bid_integral,
    circle_blotto,
    discrete_blotto,
    interval_blotto,
    make_game,
    validate_bid,
)
from .kernels import BACKEND
from .measure import Battleground, DensityRatio, Measure, density_ratio, normalize_budget, total_mass
from .payoff import (
    FunctionSource,
    MixtureSource,
    OpponentPanel,
    PayoffVector,
    PureSource,
    StrategySource,
    deviation_payoff_mc,
    deviation_payoff_oracle,
    exact_utilities,
    monte_carlo_utilities,
)
from .rand import RngStream, sample_beta_a1, sample_dirichlet, sample_gamma

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Battleground",
    "Bid",
    "BidProfile",
    "BlottoError",
    "BudgetCheck",
    "DensityRatio",
    "EquilibriumMarginal",
    "EquilibriumSampler",
    "EquipartitionMap",
    "FunctionSource",
    "GameSpec",
    "Measure",
    "MixtureSource",
    "OpponentPanel",
    "ParseError",
    "PayoffVector",
    "PureSource",
    "RngStream",
    "StrategySource",
    "ValidationError",
    "bid_integral",
    "circle_blotto",
    "default_partition",
    "density_ratio",
    "deviation_payoff_mc",
    "deviation_payoff_oracle",
    "discrete_blotto",
    "equilibrium_marginal",
    "equipartition_circle",
    "equipartition_discrete",
    "equipartition_interval",
    "exact_utilities",
    "interval_blotto",
    "make_game",
    "marginal_cdf",
    "monte_carlo_utilities",
    "normalize_budget",
    "sample_beta_a1",
    "sample_dirichlet",
    "sample_equilibrium_bid",
    "sample_gamma",
    "total_mass",
    "validate_bid",
]
