import warnings

import numpy as np
import pytest
import statsmodels.api as sm

from ucpbench.errors import InvalidArgument
from ucpbench.learners.regression import coefficient_p_values, regress_predict, stepwise_fit


def test_noiseless_single_factor(rng):
    x = rng.integers(0, 6, size=(50, 8)).astype(float)
    y = 2 * x[:, 5] + 5
    m = stepwise_fit(x, y)
    assert m.selected == (5,)
    assert abs(m.coefficients[5] - 2) < 1e-6 and abs(m.intercept - 5) < 1e-6
    assert regress_predict(m, x[0]) == pytest.approx(y[0])


def test_p_values_match_statsmodels(rng):
    x = rng.normal(size=(40, 4))
    y = 1.5 * x[:, 0] - 0.7 * x[:, 2] + rng.normal(size=40)
    cols = [0, 2, 3]
    ours = coefficient_p_values(x, y, cols)
    ref = sm.OLS(y, sm.add_constant(x[:, cols])).fit().pvalues[1:]
    assert np.allclose([ours[c] for c in cols], ref, rtol=1e-8)


def test_recovers_strong_factors(rng):
    x = rng.normal(size=(120, 8))
    y = 3 * x[:, 1] - 2 * x[:, 4] + rng.normal(scale=0.5, size=120)
    m = stepwise_fit(x, y)
    assert {1, 4} <= set(m.selected)


def test_never_keeps_weak_factor(rng):
    for _ in range(20):
        x = rng.normal(size=(40, 8))
        y = x[:, 0] + rng.normal(scale=2.0, size=40)
        m = stepwise_fit(x, y, 0.05, 0.10)
        assert all(p <= 0.10 for p in m.p_values.values())


def test_constant_target_is_intercept_only(rng):
    x = rng.normal(size=(12, 3))
    y = np.full(12, 7.0)
    m = stepwise_fit(x, y)
    assert m.intercept_only and m.intercept == pytest.approx(7)


def test_zero_variance_factor_warns(rng):
    x = rng.normal(size=(20, 3))
    x[:, 1] = 4.0
    with pytest.warns(RuntimeWarning):
        m = stepwise_fit(x, x[:, 0] * 2 + 1)
    assert m.skipped == (1,)


def test_input_checks(rng):
    with pytest.raises(InvalidArgument):
        stepwise_fit(rng.normal(size=(9, 2)), np.zeros(9))
    with pytest.raises(InvalidArgument):
        stepwise_fit(rng.normal(size=(20, 2)), np.zeros(20), p_enter=0.2, p_remove=0.1)
