import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import three_sigma
from measure_blotto import (
    Battleground,
    Bid,
    EquilibriumSampler,
    FunctionSource,
    Measure,
    MixtureSource,
    PureSource,
    RngStream,
    deviation_payoff_mc,
    deviation_payoff_oracle,
    discrete_blotto,
    exact_utilities,
    interval_blotto,
    make_game,
    monte_carlo_utilities,
)
from measure_blotto.errors import AsymmetricGame, ProfileLengthMismatch, SpaceMismatch
from measure_blotto.payoff import utility_samples
from measure_blotto.verify.probes import random_step_bid


def test_exact_examples():
    g2 = interval_blotto(2)
    assert exact_utilities([Bid.constant(1.0)] * 2, g2).utilities.tolist() == [0.5, 0.5]
    g3 = interval_blotto(3)
    u = exact_utilities([Bid.constant(1.0), Bid.constant(1.0), Bid.step([0, 1 / 3, 1], [3, 0])], g3)
    assert np.allclose(u.utilities, 1 / 3, rtol=1e-15)


def test_exact_errors():
    with pytest.raises(ProfileLengthMismatch):
        exact_utilities([Bid.constant(1.0)], interval_blotto(2))
    with pytest.raises(SpaceMismatch):
        exact_utilities([Bid.discrete([1]), Bid.discrete([1])], interval_blotto(2))


def test_value_weighted_pieces():
    g = discrete_blotto(2, [1, 2, 3])
    u = exact_utilities([Bid.discrete([3, 0, 0]), Bid.discrete([0, 1.5, 1.5])], g)
    assert u.utilities.tolist() == [1.0, 5.0]


profiles = st.integers(2, 5).flatmap(
    lambda k: st.lists(
        st.tuples(
            st.lists(st.floats(0.01, 0.99), max_size=4, unique=True),
            st.lists(st.sampled_from([0.0, 0.5, 1.0, 2.0, 3.7]), min_size=5, max_size=5),
        ),
        min_size=k,
        max_size=k,
    )
)


def _bid(spec):
    cuts, vals = spec
    return Bid.step([0.0] + sorted(cuts) + [1.0], vals[: len(cuts) + 1])


@settings(max_examples=80, deadline=None)
@given(profiles)
def test_constant_sum_and_permutation(specs):
    bids = [_bid(s) for s in specs]
    g = interval_blotto(len(bids))
    u = exact_utilities(bids, g).utilities
    assert abs(u.sum() - g.upsilon) <= 1e-12 * g.upsilon
    perm = np.random.default_rng(len(bids)).permutation(len(bids))
    up = exact_utilities([bids[i] for i in perm], g).utilities
    assert np.array_equal(up, u[perm])


def test_monte_carlo_deterministic_sources():
    g = interval_blotto(3)
    bids = [Bid.constant(1.0), Bid.step([0, 0.5, 1], [2, 0]), Bid.step([0, 0.2, 1], [0, 1.25])]
    mean, se = monte_carlo_utilities([PureSource(b) for b in bids], g, 50, RngStream(1))
    assert np.array_equal(mean.utilities, exact_utilities(bids, g).utilities)
    assert np.all(se == 0)
    mean2, se2 = monte_carlo_utilities([FunctionSource(lambda r, b=b: b) for b in bids], g, 5, RngStream(1))
    assert np.array_equal(mean2.utilities, mean.utilities) and np.all(se2 == 0)


def test_monte_carlo_equilibrium_k2():
    g = interval_blotto(2)
    s = EquilibriumSampler(g)
    mean, se = monte_carlo_utilities([s, s], g, 10_000, RngStream(2))
    assert all(three_sigma(m, 0.5, e) for m, e in zip(mean.utilities, se))


def test_per_draw_constant_sum_and_chunk_independence():
    g = discrete_blotto(3, np.ones(6))
    s = EquilibriumSampler(g)
    u = utility_samples([s] * 3, g, 20_000, RngStream(3))
    assert np.max(np.abs(u.sum(axis=1) - g.upsilon)) <= 1e-12 * g.upsilon
    again = utility_samples([s] * 3, g, 20_000, RngStream(3))
    assert u.tobytes() == again.tobytes()
    head = utility_samples([s] * 3, g, 100, RngStream(3))
    assert np.array_equal(head, u[:100])


def test_mixture_source_generic_path_matches_grid_path():
    g = discrete_blotto(2, [1, 2])
    mix = MixtureSource([Bid.discrete([2, 0]), Bid.discrete([0, 1])], [0.25, 0.75])
    fn = FunctionSource(mix.sample)
    a = utility_samples([mix, mix], g, 400, RngStream(8))
    b = utility_samples([fn, mix], g, 400, RngStream(8))
    assert a.sum() == pytest.approx(400 * 3)
    assert b.sum() == pytest.approx(400 * 3)


def test_oracle_examples():
    for k in (2, 3, 5):
        assert deviation_payoff_oracle(Bid.constant(1.0), interval_blotto(k)) == pytest.approx(1 / k, rel=1e-15)
    g = interval_blotto(2)
    assert deviation_payoff_oracle(Bid.step([0, 0.5, 1], [2, 0]), g) == 0.5
    assert deviation_payoff_oracle(Bid.constant(3.0), g) == 1.0
    a = make_game(2, Measure.uniform(Battleground.interval()), Measure.uniform(Battleground.interval()), budgets=(1.0, 0.5))
    with pytest.raises(AsymmetricGame):
        deviation_payoff_oracle(Bid.constant(1.0), a)
    assert deviation_payoff_oracle(Bid.constant(0.0), interval_blotto(1)) == 1.0


@pytest.mark.parametrize("k", [2, 3, 4])
def test_oracle_bound_on_random_feasible_bids(k):
    g = interval_blotto(k)
    gen = np.random.default_rng(k)
    for _ in range(200):
        assert deviation_payoff_oracle(random_step_bid(g, gen), g) <= 1 / k + 1e-12


def test_oracle_heterogeneous_game_matches_monte_carlo():
    v = Measure(Battleground.interval(), [0, 0.3, 1], [3, 1])
    g = make_game(3, Measure(Battleground.interval(), [0, 0.6, 1], [1, 2]), v)
    s = EquilibriumSampler(g)
    gen = np.random.default_rng(5)
    for _ in range(3):
        psi = random_step_bid(g, gen)
        exact = deviation_payoff_oracle(psi, g)
        assert exact <= g.upsilon / 3 + 1e-12
        mean, se = deviation_payoff_mc(psi, [s, s], g, 40_000, RngStream(6))
        assert three_sigma(mean, exact, se)


def test_brute_force_tiny_discrete():
    g = discrete_blotto(2, [1, 2])
    a = MixtureSource([Bid.discrete([2, 0]), Bid.discrete([0, 1])], [0.5, 0.5])
    b = PureSource(Bid.discrete([1, 0.5]))
    expected = np.zeros(2)
    for i, p in enumerate(a.probs):
        expected += p * exact_utilities([a.bids[i], b.bid], g).utilities
    mean, se = monte_carlo_utilities([a, b], g, 20_000, RngStream(7))
    assert all(three_sigma(m, e, s) for m, e, s in zip(mean.utilities, expected, se))
