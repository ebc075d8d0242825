import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ucpbench.baselines import (
    NassifParams, SWLevel, calibrate_nassif, karner_estimate, nassif_effort, nassif_estimate,
    sw_classify, sw_estimate, sw_level_for_total,
)
from ucpbench.errors import InvalidArgument
from ucpbench.size import env_weighted_sum

ratings8 = st.lists(st.integers(0, 5), min_size=8, max_size=8)


def count_oracle(e):
    total = 0
    for i in range(6):
        if e[i] < 3:
            total += 1
    for i in (6, 7):
        if e[i] > 3:
            total += 1
    if total <= 2:
        return 20
    if total <= 4:
        return 28
    return 36


def test_karner():
    assert karner_estimate(100) == 2000
    with pytest.raises(InvalidArgument):
        karner_estimate(0)


def test_sw_examples():
    assert sw_estimate([3] * 8, 100) == 2000
    c = sw_classify([0, 0, 0, 0, 0, 0, 5, 5])
    assert (c.count_low_env16, c.count_high_env78, c.total, c.level) == (6, 2, 8, SWLevel.VERY_LOW)
    assert sw_classify([2, 2, 2, 3, 3, 3, 3, 3]).level is SWLevel.LOW


@pytest.mark.parametrize("total,level", [(0, SWLevel.FAIR), (2, SWLevel.FAIR), (3, SWLevel.LOW),
                                         (4, SWLevel.LOW), (5, SWLevel.VERY_LOW), (8, SWLevel.VERY_LOW)])
def test_sw_level_boundaries(total, level):
    assert sw_level_for_total(total) is level


@given(ratings8)
def test_sw_matches_oracle(e):
    assert sw_classify(e).pdr == count_oracle(e)


def test_sw_strict_inequalities():
    # a rating of exactly 3 counts on neither side
    assert sw_classify([3] * 8).total == 0


def test_nassif_effort_formula():
    assert nassif_effort(1.0, 100) == pytest.approx(8.16 * 100 ** 1.17, rel=1e-12)
    assert nassif_effort(1.0, 100) == pytest.approx(1785.2, abs=0.1)
    assert nassif_effort(2.0, 100) == pytest.approx(nassif_effort(1.0, 100) / 2)


def test_nassif_params_lookup():
    p = NassifParams.from_cutpoints([0, 5, 10], [1.0, 2.0, 3.0, 4.0])
    assert [p.team_productivity(s) for s in (-3, 0, 4.9, 5, 12)] == [1, 2, 2, 3, 4]
    with pytest.raises(InvalidArgument):
        NassifParams.from_cutpoints([5, 5], [1, 2, 3])
    with pytest.raises(InvalidArgument):
        NassifParams.from_cutpoints([5], [1, 0])


def test_nassif_calibration_uses_quartiles_and_medians(rng):
    env = rng.integers(0, 6, size=(40, 8))
    ucp = rng.uniform(50, 200, 40)
    effort = rng.uniform(1000, 5000, 40)
    p = calibrate_nassif(env, ucp, effort)
    s = np.array([env_weighted_sum(r) for r in env])
    assert np.allclose(p.thresholds[1:], np.unique(np.quantile(s, [0.25, 0.5, 0.75])))
    implied = 8.16 * ucp ** 1.17 / effort
    idx = np.array([p.level_index(v) for v in s])
    for i, lv in enumerate(p.levels):
        assert lv == pytest.approx(np.median(implied[idx == i]))


def test_nassif_estimate_default_levels():
    assert nassif_estimate([3] * 8, 100) == pytest.approx(8.16 * 100 ** 1.17)
