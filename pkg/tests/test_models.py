import numpy as np
import pytest

from conftest import data_from_productivity, m4_hand_rows
from ucpbench.baselines import NassifParams, SWLevel, sw_classify
from ucpbench.dataset import PROFILES, generate_synthetic
from ucpbench.errors import InvalidArgument
from ucpbench.learners.stats import normality_test
from ucpbench.models import (
    MODEL_NAMES, clamp_productivity, estimate_effort, m1_fit, m1_predict, m1_select_k, m2_fit, m2_predict,
    m3_fit, m3_predict, m4_fit, m4_predict, make_estimator,
)


def test_catalog():
    assert MODEL_NAMES == ("karner", "sw", "nassif", "m1", "m2", "m3", "m4")
    with pytest.raises(InvalidArgument, match="karner"):
        make_estimator("m9")


def test_clamp():
    assert clamp_productivity(0.2) == 1.0 and clamp_productivity(250) == 100.0 and clamp_productivity(17) == 17


def test_unfitted_use_raises():
    with pytest.raises(RuntimeError):
        make_estimator("m4").predict_productivity([0] * 8)


def test_baseline_estimators_ignore_training(small_dataset):
    k = make_estimator("karner").fit(small_dataset)
    assert k.estimate_effort([1] * 8, 100) == 2000
    s = make_estimator("sw").fit(small_dataset)
    assert s.estimate_effort([3] * 8, 100) == 2000


def test_nassif_estimator_with_fixed_params(small_dataset):
    params = NassifParams.from_cutpoints([10], [1.0, 2.0])
    est = make_estimator("nassif", nassif_params=params).fit(small_dataset)
    assert est.estimate_effort([0] * 8, 100) == pytest.approx(8.16 * 100 ** 1.17)
    assert est.estimate_effort([5] * 6 + [0, 0], 100) == pytest.approx(8.16 * 100 ** 1.17 / 2)


def test_m4_hand_example():
    rows = m4_hand_rows()
    d = data_from_productivity([e for e, _ in rows], [p for _, p in rows])
    idx = m4_fit(d)
    assert idx.mean_productivity == 22
    assert idx.historical_correlation == pytest.approx(0.75, abs=1e-12)
    q = [5, 0, 0, 0, 0, 0, 0, 0]
    assert m4_predict(d, q) == pytest.approx(28, abs=1e-12)
    assert estimate_effort(make_estimator("m4"), d, {"env": q, "ucp": 100}) == pytest.approx(2800)


def test_m3_noiseless_linear(rng):
    for _ in range(50):
        env = rng.integers(0, 6, size=(60, 8))
        env[:, 0] = rng.binomial(5, 0.5, 60)
        if normality_test(env[:, 0]).p_value >= 0.05:
            break
    else:
        pytest.fail("could not draw a factor that passes the normality gate")
    d = data_from_productivity(env, 30 - 2 * env[:, 0])
    model = m3_fit(d)
    assert model.selected == (0,) and 0 not in model.transforms
    for row in env[:10]:
        assert m3_predict(model, row) == pytest.approx(30 - 2 * row[0], abs=1e-6)


def test_m3_applies_stored_transforms(rng):
    env = rng.integers(0, 6, size=(80, 8))
    env[:, 3] = np.where(rng.uniform(size=80) < 0.8, 0, 5)  # strongly non-normal
    prod = 20 + 3 * np.log1p(env[:, 3]) + rng.normal(0, 0.2, 80)
    model = m3_fit(data_from_productivity(env, prod))
    assert 3 in model.selected and 3 in model.transforms


def test_m2_predicts_a_centroid(small_dataset):
    state = m2_fit(small_dataset, seed=1)
    cents = state.centroids
    for row in small_dataset.env[:10]:
        assert m2_predict(state, row) in cents
    assert len(cents) == state.best_k


def test_m1_groups_follow_sw_levels():
    d = generate_synthetic(PROFILES["ds2"], 4)
    ks = m1_select_k(d, 0)
    state = m1_fit(d, 0, ks)
    levels = {sw_classify(r.env).level for r in d}
    assert set(state.groups) == levels
    for r in list(d)[:15]:
        group = state.groups[sw_classify(r.env).level]
        assert m1_predict(state, r.env) in group.values


def test_m1_unseen_level_falls_back_to_rate():
    env = np.full((12, 8), 3)  # every row is "fair"
    d = data_from_productivity(env, np.linspace(15, 25, 12))
    state = m1_fit(d, 0)
    assert set(state.groups) == {SWLevel.FAIR}
    assert m1_predict(state, [0] * 6 + [5, 5]) == 36


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_every_model_fits_and_predicts(name, small_dataset):
    est = make_estimator(name, seed=3)
    est.fit(small_dataset, est.preselect(small_dataset))
    eff = est.estimate_effort(small_dataset[0].env, small_dataset[0].ucp)
    assert np.isfinite(eff) and eff > 0
    with pytest.raises(InvalidArgument):
        est.estimate_effort(small_dataset[0].env, 0)
