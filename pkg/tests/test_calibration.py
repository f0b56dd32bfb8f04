"""Seed sweeps: KS p-values of the sampled marginal should be uniform.

A single KS test at a fixed seed rejects a correct sampler 1% of the time;
these sweeps check the sampler's calibration across many streams instead.
"""
import numpy as np
import pytest
from scipy import stats

from measure_blotto import EquilibriumSampler, RngStream, interval_blotto
from measure_blotto.equilibrium import equilibrium_marginal
from measure_blotto.verify.ks import values_at


@pytest.mark.parametrize("k,x", [(3, 0.1), (2, 0.5), (5, 0.8)])
def test_ks_pvalues_uniform_across_seeds(k, x):
    g = interval_blotto(k)
    s = EquilibriumSampler(g)
    law = equilibrium_marginal(g, x)
    pvals = []
    for seed in range(200):
        vals = values_at(s, g, x, 20_000, RngStream(7_000 + seed, k))
        pvals.append(stats.kstest(vals, law.cdf).pvalue)
    pvals = np.asarray(pvals)
    # under a correct sampler the p-values are U(0, 1)
    assert stats.kstest(pvals, "uniform").pvalue > 1e-3
    # rejections at the 1% level stay within a generous binomial band
    assert np.sum(pvals < 0.01) <= stats.binom.ppf(0.9999, 200, 0.01)


def test_ks_pvalues_detect_wrong_shape():
    g = interval_blotto(3)
    bad = EquilibriumSampler(g, alpha=1.0)
    law = equilibrium_marginal(g, 0.1)
    pvals = [stats.kstest(values_at(bad, g, 0.1, 20_000, RngStream(seed, 3)), law.cdf).pvalue for seed in range(20)]
    assert max(pvals) < 1e-6
