import numpy as np
import pytest
from scipy import stats

from measure_blotto import RngStream, sample_beta_a1, sample_dirichlet, sample_gamma
from measure_blotto.errors import NonPositiveShape, PlayerCountTooSmall
from measure_blotto.rand import beta_a1_from_uniform
from measure_blotto.verify.ks import ks_distance

N = 100_000


def test_streams_reproducible_and_distinct():
    a = RngStream(5, 1).generator.random(8)
    b = RngStream(5, 1).generator.random(8)
    c = RngStream(5, 2).generator.random(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    s = RngStream(5)
    assert np.array_equal(s.split(3).generator.random(4), RngStream(5, (0, 3)).generator.random(4))
    assert not np.array_equal(s.split(3).generator.random(4), s.split(4).generator.random(4))


def test_beta_a1():
    assert beta_a1_from_uniform(0.5, 0.25) == pytest.approx(0.0625)
    u = np.linspace(0, 1, 11)
    assert np.array_equal(beta_a1_from_uniform(1.0, u), u)
    x = sample_beta_a1(0.5, RngStream(1), N)
    assert ks_distance(x, np.sqrt) < 0.01
    with pytest.raises(NonPositiveShape):
        sample_beta_a1(0.0, RngStream(1))


def test_gamma_moments_and_law():
    x = sample_gamma(1.0, RngStream(2), N)
    assert abs(x.mean() - 1.0) < 0.02
    x = sample_gamma(0.5, RngStream(3), N)
    assert abs(x.mean() - 0.5) < 0.02 and abs(x.var() - 0.5) < 0.05
    x = sample_gamma(2.0, RngStream(4), N)
    assert ks_distance(x, lambda t: 1 - np.exp(-t) * (1 + t)) < 0.01
    with pytest.raises(NonPositiveShape):
        sample_gamma(-1.0, RngStream(1))


def test_gamma_ks_matches_scipy():
    x = sample_gamma(0.3, RngStream(9), 5000)
    ours = ks_distance(x, stats.gamma(0.3).cdf)
    ref = stats.kstest(x, stats.gamma(0.3).cdf).statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_dirichlet_examples():
    x = sample_dirichlet(1.0, 2, RngStream(5), N)
    assert np.allclose(x.sum(axis=1), 1.0, atol=1e-12)
    assert ks_distance(x[:, 0], lambda t: np.clip(t, 0, 1)) < 0.01
    x = sample_dirichlet(0.5, 3, RngStream(6), N)
    assert ks_distance(x[:, 0], stats.beta(0.5, 1.0).cdf) < 0.01
    one = sample_dirichlet(0.5, 4, RngStream(7))
    assert one.shape == (4,)
    with pytest.raises(NonPositiveShape):
        sample_dirichlet(0.0, 3, RngStream(1))
    with pytest.raises(PlayerCountTooSmall):
        sample_dirichlet(1.0, 1, RngStream(1))


@pytest.mark.parametrize("k,alpha", [(2, 1.0), (4, 1 / 3), (6, 0.2), (10, 1 / 9)])
def test_dirichlet_marginals(k, alpha):
    x = sample_dirichlet(alpha, k, RngStream(k), N)
    thr = 1.63 / np.sqrt(N)
    for i in (0, k - 1):
        assert ks_distance(x[:, i], stats.beta(alpha, (k - 1) * alpha).cdf) < thr


def test_dirichlet_tiny_shape_never_nan():
    x = sample_dirichlet(1e-3, 5, RngStream(8), 20_000)
    assert np.all(np.isfinite(x))
    assert np.allclose(x.sum(axis=1), 1.0, atol=1e-12)


def test_dirichlet_reproducible():
    a = sample_dirichlet(0.5, 7, RngStream(11, 3), 100)
    b = sample_dirichlet(0.5, 7, RngStream(11, 3), 100)
    assert a.tobytes() == b.tobytes()
