"""Certification tools: marginal tests, best-response probes, quantile
strategies and the exploit constructions."""
from .cdf import Cdf, deviation_payoff_from_marginal, inverse_cdf, inverse_cdf_integral
from .exploits import (
    AtomExploit,
    LottoCheck,
    StepSwap,
    atom_gain_bound,
    exploit_atom_strategy,
    exploit_mass_move_cdf,
    exploit_step_swap,
    lotto_budget_check,
    payoff_vs_law,
    step_swap,
)
from .ks import KsReport, ks_distance, ks_marginal_test
from .probes import (
    EquilibriumCertificate,
    Probe,
    ProbeResult,
    best_response_probe,
    default_probes,
    quantile_bid,
    random_step_bid,
)

__all__ = [
    "AtomExploit",
    "Cdf",
    "EquilibriumCertificate",
    "KsReport",
    "LottoCheck",
    "Probe",
    "ProbeResult",
    "StepSwap",
    "atom_gain_bound",
    "best_response_probe",
    "default_probes",
    "deviation_payoff_from_marginal",
    "exploit_atom_strategy",
    "exploit_mass_move_cdf",
    "exploit_step_swap",
    "inverse_cdf",
    "inverse_cdf_integral",
    "ks_distance",
    "ks_marginal_test",
    "lotto_budget_check",
    "payoff_vs_law",
    "quantile_bid",
    "random_step_bid",
    "step_swap",
]
