import numpy as np
import pytest

from conftest import three_sigma
from measure_blotto import (
    Battleground,
    Bid,
    EquilibriumSampler,
    FunctionSource,
    MixtureSource,
    PureSource,
    RngStream,
    discrete_blotto,
    exact_utilities,
    interval_blotto,
    make_game,
    validate_bid,
)
from measure_blotto.errors import (
    DegenerateInterval,
    DeltaOutOfRange,
    InfeasibleProbe,
    NotFlatOnGap,
    ValidationError,
)
from measure_blotto.game import bid_integral
from measure_blotto.measure import Measure
from measure_blotto.verify import (
    Cdf,
    atom_gain_bound,
    best_response_probe,
    default_probes,
    deviation_payoff_from_marginal,
    exploit_atom_strategy,
    exploit_mass_move_cdf,
    exploit_step_swap,
    ks_distance,
    ks_marginal_test,
    lotto_budget_check,
    payoff_vs_law,
    quantile_bid,
    step_swap,
)
from measure_blotto.verify.exploits import equilibrium_exploit_gains


def test_ks_distance_against_scipy():
    from scipy import stats

    x = np.random.default_rng(0).normal(size=500)
    assert ks_distance(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-14)
    assert ks_distance(np.ones(10), lambda t: np.clip(t / 2, 0, 1)) == pytest.approx(0.5)


def test_ks_examples():
    g = interval_blotto(2)
    rep = ks_marginal_test(EquilibriumSampler(g), g, 0.37, 100_000, RngStream(1))
    assert rep.passed and 0 <= rep.distance <= 1 and rep.point == 0.37
    rep = ks_marginal_test(PureSource(Bid.constant(1.0)), g, 0.37, 1000, RngStream(1))
    assert not rep.passed
    bad = EquilibriumSampler(g, alpha=3.0)
    assert not ks_marginal_test(bad, g, 0.37, 100_000, RngStream(1)).passed
    assert set(rep.to_json()) == {"point", "n", "distance", "threshold", "passed"}


def test_probe_family_is_feasible():
    for g in (interval_blotto(3), discrete_blotto(2, np.ones(5)), discrete_blotto(3, [1, 2, 3])):
        probes = default_probes(g, RngStream(2))
        assert len(probes) == 8 * g.k + 50 + 1
        for p in probes:
            assert validate_bid(p.bid, g, 0).ok, p.name


def test_quantile_bid_spends_budget():
    bg = Battleground.interval()
    g = make_game(3, Measure.uniform(bg), Measure(bg, [0, 0.5, 1], [1, 2]))
    b = quantile_bid(g, Cdf.equilibrium(3))
    assert bid_integral(b, g.beta) == pytest.approx(1.0, abs=1e-12)


def test_certificate_equilibrium_consistent():
    cert = best_response_probe("equilibrium", interval_blotto(3), n=20_000, rng=RngStream(3))
    assert cert.verdict == "consistent" and cert.exact
    assert cert.max_gap <= 1e-12
    assert all(three_sigma(m, 1 / 3, s) for m, s in zip(cert.payoff_means, cert.payoff_stderr))
    # each KS report is a 1%-level test; the strict check lives in the acceptance suite
    assert len(cert.ks) == 3 and all(r.distance < 2 * r.threshold for r in cert.ks)


def test_certificate_refutes_pure_profile():
    g = interval_blotto(3)
    ones = PureSource(Bid.constant(1.0))
    cert = best_response_probe([ones, ones], g, n=500, rng=RngStream(4))
    assert cert.verdict == "refuted"
    w = cert.witness
    assert exact_utilities([Bid.constant(1.0)] * 2 + [w.bid], g).utilities[-1] > 1 / 3
    assert cert.to_json()["witness"]["name"] == w.name


def test_certificate_single_player_and_bad_probes():
    cert = best_response_probe("equilibrium", interval_blotto(1), n=10, rng=RngStream(1))
    assert cert.verdict == "consistent" and cert.payoff_means.tolist() == [1.0]
    with pytest.raises(InfeasibleProbe):
        best_response_probe("equilibrium", interval_blotto(2), probes=[Bid.constant(1.5)], n=10, rng=RngStream(1))


def test_certificate_monte_carlo_on_equilibrium_sources():
    g = interval_blotto(2)
    s = EquilibriumSampler(g)
    cert = best_response_probe([s], g, n=20_000, rng=RngStream(5))
    assert cert.verdict == "consistent" and not cert.exact


def test_atom_exploit_examples():
    g = interval_blotto(2)
    transform, bound = exploit_atom_strategy(g, 1.0, 1.0, 0.1)
    assert bound == pytest.approx(0.4)
    psi = transform(Bid.constant(1.0))
    assert bid_integral(psi, g.beta) == pytest.approx(1.0, abs=1e-12)
    u = exact_utilities([Bid.constant(1.0), psi], g).utilities
    assert u[1] == pytest.approx(0.9, abs=1e-12)
    assert atom_gain_bound(3, 0.5, 0.01) == pytest.approx(2 / 3 * 0.99 * 0.125 - 0.01 / 3)
    assert atom_gain_bound(3, 0.5, 0.01) == pytest.approx(0.0792, abs=5e-5)
    for d in (0.01, 0.5, 0.99):
        assert atom_gain_bound(4, 0.0, d) <= 0
    with pytest.raises(DeltaOutOfRange):
        exploit_atom_strategy(g, 1.0, 1.0, 1.0)
    with pytest.raises(ValidationError):
        exploit_atom_strategy(discrete_blotto(2, [1, 1]), 1.0, 1.0, 0.1)


def test_atom_exploit_without_atom_is_noop_on_gain():
    g = interval_blotto(2)
    transform, _ = exploit_atom_strategy(g, 5.0, 0.0, 0.2)
    psi = transform(Bid.step([0, 0.5, 1], [1.5, 0.5]))
    assert bid_integral(psi, g.beta) == pytest.approx(1.0, abs=1e-12)
    assert psi.at(0.1) == 0.0


def test_mass_move_examples():
    with pytest.raises(NotFlatOnGap):
        exploit_mass_move_cdf(Cdf.equilibrium(3), 0.5, 1.5, 0.5, 0.05)
    gap = Cdf.from_values([0, 0.5, 1.5, 2.0], [0, 0.5, 0.5, 1.0])
    h = exploit_mass_move_cdf(gap, 0.5, 1.5, 0.5, 0.05)
    assert abs(h.mean() - 1.0) <= 1e-12
    for k in (2, 3, 4):
        m = gap.power(k - 1)
        assert deviation_payoff_from_marginal(h, m) > deviation_payoff_from_marginal(gap, m)
    with pytest.raises(ValidationError):
        exploit_mass_move_cdf(gap, 0.5, 1.5, 1.0, 0.05)


def test_mass_move_never_helps_against_equilibrium_law():
    for k in (2, 3, 5):
        g = Cdf.equilibrium(k)
        m = g.power(k - 1)
        for a, b in ((0.2, 1.0), (0.5, 1.5)):
            h = exploit_mass_move_cdf(g, a, b, 0.5 * (b - a), 0.05, require_flat=False)
            assert abs(h.mean() - 1) <= 1e-12
            assert deviation_payoff_from_marginal(h, m) - 1 / k <= 1e-12


def test_step_swap_examples():
    g = Cdf.equilibrium(3)
    m = g.power(2)
    lam = interval_blotto(1).beta
    for eps in (0.1, 0.01, 0.001):
        sw = step_swap(g, 0.5, 1.5, eps)
        assert bid_integral(sw.swapped, lam) == pytest.approx(1.0, abs=1e-12)
        assert bid_integral(sw.baseline, lam) == pytest.approx(1.0, abs=1e-12)
        assert abs(payoff_vs_law(sw.swapped, m) - payoff_vs_law(sw.baseline, m)) <= 1e-12
    curved = Cdf.scaled_beta(2.0, 1.5)  # mean 1, M(t)/t increasing when M = G
    gains = [payoff_vs_law(step_swap(curved, 0.5, 1.2, e).swapped, curved) - payoff_vs_law(step_swap(curved, 0.5, 1.2, e).baseline, curved) for e in (0.05, 0.01)]
    assert all(gain > 0 for gain in gains)
    assert bid_integral(exploit_step_swap(curved, 0.5, 1.2, 0.01), lam) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DegenerateInterval):
        step_swap(g, 1.5, 0.5, 0.1)
    with pytest.raises(DegenerateInterval):
        step_swap(g, 0.5, 4.0, 0.1)


def test_equilibrium_is_fixed_point_of_exploits():
    for k in (2, 3):
        out = equilibrium_exploit_gains(interval_blotto(k), 2000, RngStream(k))
        for name, res in out.items():
            assert res["gain"] <= 3 * res["stderr"] + 1e-12, name


def test_lotto_examples():
    g = make_game(2, Measure.from_weights([1, 1]), Measure.from_weights([1, 1]))
    ones = g.bid_from_original(Bid.discrete([1, 1]))
    footnote = MixtureSource([ones, Bid.discrete([0, 0])], [0.5, 0.5])
    chk = lotto_budget_check(footnote, g, 0, 1000, RngStream(1))
    assert chk.passed and three_sigma(chk.mean, 1.0, chk.stderr)
    assert not validate_bid(ones, g, 0).ok
    eq = lotto_budget_check(EquilibriumSampler(interval_blotto(2)), interval_blotto(2), 1, 100, RngStream(2))
    assert eq.passed
    two = lotto_budget_check(PureSource(Bid.constant(2.0)), interval_blotto(2), 0, 30, RngStream(3))
    assert not two.passed and two.mean == 2.0
    generic = lotto_budget_check(FunctionSource(lambda r: Bid.constant(2.0)), interval_blotto(2), 0, 30, RngStream(3))
    assert not generic.passed
    with pytest.raises(ValidationError):
        lotto_budget_check(footnote, g, 0, 10, RngStream(1))
