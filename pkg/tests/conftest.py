import numpy as np
import pytest

from measure_blotto import RngStream


@pytest.fixture
def rng():
    return RngStream(20240611)


def three_sigma(mean, target, se, floor=1e-12):
    return abs(mean - target) <= 3.0 * se + floor


def beta_cdf(a, b):
    from scipy import stats

    return stats.beta(a, b).cdf


def reference_seed(*parts):
    return np.random.default_rng(list(parts))
