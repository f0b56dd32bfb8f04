import numpy as np
import pytest
from scipy import integrate, stats

from conftest import three_sigma
from measure_blotto import RngStream
from measure_blotto.errors import AtomicOpponentMarginal, OffBudgetMean, ValidationError
from measure_blotto.verify.cdf import Cdf, deviation_payoff_from_marginal, inverse_cdf, inverse_cdf_integral


def test_inverse_examples():
    assert inverse_cdf(Cdf.uniform(0, 2), 0.25) == 0.5
    pm = Cdf.point_mass(1.0)
    assert np.all(inverse_cdf(pm, np.linspace(0, 1, 11)) == 1.0)
    h = Cdf.scaled_beta(0.5, 3.0)
    assert h.cdf(0.75) == pytest.approx(0.5, rel=1e-15)
    assert inverse_cdf(h, 0.5) == pytest.approx(0.75, rel=1e-14)


def test_generalized_inverse_on_atoms_and_flats():
    # atom 0.5 at 1, flat on (1, 2), then uniform on [2, 3]
    h = Cdf([1.0, 2.0, 3.0], [0.5, 0.0, 0.0], [0.0, 0.5])
    assert h.cdf(1.0) == 0.5 and h.left_limit(1.0) == 0.0
    assert h.cdf(1.5) == 0.5
    assert inverse_cdf(h, 0.25) == 1.0
    # sup{t : H(t) <= 0.5} is the right end of the flat
    assert inverse_cdf(h, 0.5) == 2.0
    assert inverse_cdf(h, 0.75) == pytest.approx(2.5)
    assert inverse_cdf(h, 1.0) == 3.0
    assert inverse_cdf(h, 0.0) == 1.0


def test_integral_examples():
    assert inverse_cdf_integral(Cdf.uniform(0, 2)) == pytest.approx(1.0, abs=1e-12)
    assert inverse_cdf_integral(Cdf.point_mass(1.0)) == pytest.approx(1.0, abs=1e-12)
    assert inverse_cdf_integral(Cdf.equilibrium(3)) == pytest.approx(1.0, abs=1e-6)


def corpus():
    return [
        Cdf.uniform(0, 2),
        Cdf.point_mass(1.0),
        Cdf.discrete([0.5, 1.0, 2.0], [0.2, 0.5, 0.3]),
        Cdf([1.0, 2.0, 3.0], [0.5, 0.0, 0.0], [0.0, 0.5]),
        Cdf.from_values([0, 0.5, 1.5, 2.0], [0, 0.5, 0.5, 1.0]),
        Cdf([0.0, 1.0, 2.5], [0.1, 0.3, 0.1], [0.2, 0.3]),
        Cdf.scaled_beta(2.0, 1.5),
    ] + [Cdf.equilibrium(k) for k in range(2, 7)]


@pytest.mark.parametrize("h", corpus(), ids=repr)
def test_quantile_integral_equals_mean(h):
    assert inverse_cdf_integral(h) == pytest.approx(h.mean(), abs=1e-9)


@pytest.mark.parametrize("h", corpus(), ids=repr)
def test_mean_against_quadrature_of_survival(h):
    lo, hi = h.support
    pts = np.unique(np.r_[lo, h.knots, hi])
    surv = sum(integrate.quad(lambda t: 1 - h.cdf(t), a, b, epsabs=1e-13)[0] for a, b in zip(pts[:-1], pts[1:]))
    assert h.mean() == pytest.approx(lo + surv, abs=1e-10)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_power_is_max_law(k):
    g = Cdf.equilibrium(k)
    m = g.power(k - 1)
    t = np.linspace(0, k, 9)
    assert np.allclose(m.cdf(t), t / k, atol=1e-14)
    ref = stats.beta(1 / (k - 1), 1, scale=k)
    assert np.allclose(g.cdf(t), ref.cdf(t), atol=1e-14)
    assert g.mean() == pytest.approx(1.0, abs=1e-14)
    assert m.mean() == pytest.approx(k / 2, abs=1e-12)


def test_sampling_matches_law():
    h = Cdf([0.0, 1.0, 2.5], [0.1, 0.3, 0.1], [0.2, 0.3])
    x = h.sample(100_000, RngStream(1))
    for t in (0.0, 0.5, 1.0, 2.0, 2.5):
        assert abs(np.mean(x <= t) - h.cdf(t)) < 0.006


def test_with_knots_keeps_distribution():
    for h in corpus():
        if h.power_ != 1:
            continue
        lo, hi = h.support
        pts = np.linspace(lo - 0.5, hi + 0.5, 7)
        h2 = h.with_knots(pts)
        t = np.linspace(lo - 1, hi + 1, 41)
        assert np.allclose(h2.cdf(t), h.cdf(t), atol=1e-14)
        assert h2.mean() == pytest.approx(h.mean(), abs=1e-13)


def test_invalid_cdfs():
    with pytest.raises(ValidationError):
        Cdf([0, 1], [0.5, 0.0], [0.2])
    with pytest.raises(ValidationError):
        Cdf([1, 0], [0, 0], [1])


def test_deviation_payoff_examples():
    for k in (2, 3, 4):
        g = Cdf.equilibrium(k)
        assert deviation_payoff_from_marginal(g, g.power(k - 1)) == pytest.approx(1 / k, abs=1e-12)
    assert deviation_payoff_from_marginal(Cdf.uniform(0, 2), Cdf.uniform(0, 2)) == pytest.approx(0.5, abs=1e-13)
    assert deviation_payoff_from_marginal(Cdf.point_mass(1.0), Cdf.uniform(1.5, 3)) == 0.0


def test_deviation_payoff_errors():
    with pytest.raises(AtomicOpponentMarginal):
        deviation_payoff_from_marginal(Cdf.uniform(0, 2), Cdf.point_mass(1.0))
    with pytest.raises(OffBudgetMean):
        deviation_payoff_from_marginal(Cdf.uniform(0, 3), Cdf.uniform(0, 2))


@pytest.mark.parametrize(
    "h,m",
    [
        (Cdf.discrete([0.5, 1.0, 2.0], [0.2, 0.5, 0.3]), Cdf.equilibrium(3).power(2)),
        (Cdf.from_values([0, 0.5, 1.5, 2.0], [0, 0.5, 0.5, 1.0]), Cdf.uniform(0, 2)),
        (Cdf([0.0, 1.0, 2.5], [0.1, 0.3, 0.1], [0.2, 0.3]).with_knots([]), Cdf.scaled_beta(2.0, 1.5)),
    ],
)
def test_two_expressions_agree(h, m):
    if abs(h.mean() - 1) > 1e-9:
        h = Cdf(h.knots / h.mean(), h.atom, h.seg)
    exact = deviation_payoff_from_marginal(h, m)
    n = 100_000
    x = h.sample(n, RngStream(2))
    y = m.sample(n, RngStream(3))
    wins = (y <= x).astype(float)
    assert three_sigma(wins.mean(), exact, wins.std(ddof=1) / np.sqrt(n))
