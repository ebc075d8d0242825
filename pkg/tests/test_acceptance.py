"""Acceptance criteria, one test per criterion.

Every test prints a single PASS/FAIL line, and the lines are repeated in
the terminal summary. The end-to-end and fidelity checks use fixed seeds
0..9 and 0..19.
"""
import itertools
import json
import time
from dataclasses import replace
from math import comb

import numpy as np
import pytest

from conftest import data_from_productivity, m4_hand_rows, record_criterion
from ucpbench.baselines import sw_classify
from ucpbench.cli import main
from ucpbench.comparison import scott_knott, wilcoxon_ranksum, win_tie_loss
from ucpbench.dataset import PROFILES, dumps_dataset, generate_synthetic
from ucpbench.evaluation import (
    FoldResult, build_report, effect_size, evaluate, exact_random_guess_mae, random_guess_baseline,
    standardized_accuracy,
)
from ucpbench.learners.analogy import regression_to_mean
from ucpbench.learners.kmeans import cluster_validity, kmeans_fit, select_best_k
from ucpbench.learners.regression import stepwise_fit
from ucpbench.models import MODEL_NAMES, m4_fit, m4_predict_index
from ucpbench.size import compute_ef, compute_tcf

PROPOSED = ("m1", "m2", "m3", "m4")


# ---------------------------------------------------------------- oracles

def oracle_tcf(f):
    return 0.6 + 0.01 * (2 * f[0] + 2 * f[1] + f[2] + f[3] + f[4] + 0.5 * f[5] + 0.5 * f[6] + 2 * f[7]
                         + f[8] + f[9] + f[10] + f[11] + f[12])


def oracle_ef(f):
    return 1.4 - 0.03 * (1.5 * f[0] + 0.5 * f[1] + f[2] + 0.5 * f[3] + f[4] + 2 * f[5] - f[6] - f[7])


def oracle_sw_rate(grid):
    """Vectorised count over an (N, 8) array of ratings."""
    total = (grid[:, :6] < 3).sum(axis=1) + (grid[:, 6:] > 3).sum(axis=1)
    return np.select([total <= 2, total <= 4], [20.0, 28.0], 36.0)


def oracle_validity_1d(points, labels):
    groups = {}
    for p, l in zip(points, labels):
        groups.setdefault(int(l), []).append(float(p))
    centers = {l: sum(v) / len(v) for l, v in groups.items()}
    within = sum(abs(p - centers[int(l)]) for p, l in zip(points, labels)) / len(points)
    sep = min((centers[a] - centers[b]) ** 2 for a, b in itertools.combinations(centers, 2))
    return within / sep


def oracle_ranksum_p(a, b):
    """Two-sided permutation p-value of the Mann-Whitney U statistic,
    counted from pairwise comparisons over every relabelling."""
    pooled = list(a) + list(b)
    n1, n = len(a), len(pooled)

    def u_of(idx):
        s = set(idx)
        xs = [pooled[i] for i in idx]
        ys = [pooled[i] for i in range(n) if i not in s]
        return sum((x > y) + 0.5 * (x == y) for x in xs for y in ys)

    centre = n1 * (n - n1) / 2.0
    observed = abs(u_of(range(n1)) - centre)
    hits = sum(abs(u_of(c) - centre) >= observed - 1e-9 for c in itertools.combinations(range(n), n1))
    return hits / comb(n, n1)


def folds_of(actual, estimate):
    return [FoldResult(f"p{i}", float(a), float(e)) for i, (a, e) in enumerate(zip(actual, estimate))]


# ---------------------------------------------------------------- criteria

def test_criterion_01_ucp_arithmetic():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    exact = (compute_tcf([0] * 13) == oracle_tcf([0] * 13) and compute_tcf([5] * 13) == oracle_tcf([5] * 13)
             and compute_ef([0] * 8) == oracle_ef([0] * 8) and compute_ef([5] * 8) == oracle_ef([5] * 8))
    worst = 0.0
    for _ in range(10_000):
        t = [int(v) for v in rng.integers(0, 6, 13)]
        e = [int(v) for v in rng.integers(0, 6, 8)]
        worst = max(worst, abs(compute_tcf(t) / oracle_tcf(t) - 1), abs(compute_ef(e) / oracle_ef(e) - 1))
    ef_all = [compute_ef(v) for v in itertools.product(range(6), repeat=8)]
    ef_ok = min(ef_all) >= 0.425 - 1e-12 and max(ef_all) <= 1.7 + 1e-12
    # TCF is linear with non-negative weights, so its range over 0..5^13 is attained at the corners
    tcf_corners = [compute_tcf(v) for v in itertools.product((0, 5), repeat=13)]
    tcf_ok = min(tcf_corners) >= 0.6 - 1e-12 and max(tcf_corners) <= 1.35 + 1e-12
    elapsed = time.perf_counter() - t0
    ok = exact and worst <= 1e-12 and ef_ok and tcf_ok and len(ef_all) == 6 ** 8 and elapsed < 10
    record_criterion(1, ok, f"extremes exact={exact}, max rel err {worst:.1e}, EF in [{min(ef_all):.3f}, "
                            f"{max(ef_all):.3f}] over {len(ef_all)} vectors, {elapsed:.1f}s")
    assert ok


def test_criterion_02_sw_classifier():
    t0 = time.perf_counter()
    grid = np.array(list(itertools.product(range(6), repeat=8)))
    expected = oracle_sw_rate(grid)
    got = np.array([sw_classify(tuple(int(x) for x in row)).pdr for row in grid])
    mismatches = int((got != expected).sum())
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 30
    record_criterion(2, ok, f"{mismatches} mismatches over {len(grid)} vectors, {elapsed:.1f}s")
    assert ok


def test_criterion_03_validity_brute_force():
    rng = np.random.default_rng(3)
    worst, checked = 0.0, 0
    for i in range(1000):
        m = int(rng.integers(3, 9))
        pts = rng.uniform(-10, 10, m).round(3)
        c = kmeans_fit(pts, 2, seed=i)
        # enumerate every two-way assignment and pick the one k-means converged to
        matches = []
        for bits in itertools.product((0, 1), repeat=m):
            if len(set(bits)) < 2:
                continue
            if list(bits) == list(c.assignment):
                matches.append(oracle_validity_1d(pts, bits))
        assert len(matches) == 1
        worst = max(worst, abs(cluster_validity(c) - matches[0]))
        checked += 1
    ok = worst <= 1e-9 and checked == 1000
    record_criterion(3, ok, f"{checked} instances, max abs diff {worst:.1e}")
    assert ok


def test_criterion_04_kmeans():
    rng = np.random.default_rng(4)
    monotone = 0
    for i in range(1000):
        x = rng.normal(size=(int(rng.integers(5, 40)), int(rng.integers(1, 4))))
        k = int(rng.integers(1, min(6, len(x)) + 1))
        h = kmeans_fit(x, k, seed=i).inertia_history
        monotone += all(b <= a * (1 + 1e-12) + 1e-12 for a, b in zip(h, h[1:]))
    two = 0
    for seed in range(100):
        r = np.random.default_rng(seed)
        m = int(r.integers(6, 21))
        blob = lambda c: c + r.uniform(-1.0, 1.0, size=(m, 2))  # radius 1 (per axis)
        x = np.vstack([blob(0.0), blob(10.0 * np.sqrt(2))])  # centre separation 20 >= 10 * radius sqrt(2)
        two += select_best_k(x, seed) == 2
    ok = monotone == 1000 and two == 100
    record_criterion(4, ok, f"inertia non-increasing {monotone}/1000, best k = 2 in {two}/100 seeds")
    assert ok


def test_criterion_05_stepwise():
    rng = np.random.default_rng(5)
    x = rng.integers(0, 6, size=(50, 8)).astype(float)
    m = stepwise_fit(x, 2 * x[:, 5] + 5)
    recovered = m.selected == (5,) and abs(m.coefficients[5] - 2) < 1e-6 and abs(m.intercept - 5) < 1e-6
    violations = 0
    for _ in range(100):
        xn = rng.integers(0, 6, size=(50, 8)).astype(float)
        beta = rng.normal(0, 1, 8) * (rng.uniform(size=8) < 0.4)
        y = xn @ beta + rng.normal(0, 2, 50)
        fit = stepwise_fit(xn, y, 0.05, 0.10)
        violations += any(p > 0.10 for p in fit.p_values.values())
    ok = recovered and violations == 0
    record_criterion(5, ok, f"selected {m.selected}, beta {m.coefficients.get(5, float('nan')):.9f}, "
                            f"intercept {m.intercept:.9f}; {violations}/100 fits keep p > p_remove")
    assert ok


def test_criterion_06_r2m():
    rows = m4_hand_rows()
    d = data_from_productivity([e for e, _ in rows], [p for _, p in rows])
    idx = m4_fit(d)
    rng = np.random.default_rng(6)
    ident = True
    for q in rng.integers(0, 6, size=(50, 8)):
        nn = float(idx.productivity[((idx.features - q) ** 2).sum(axis=1).argmin()])
        ident &= m4_predict_index(replace(idx, historical_correlation=1.0), q) == nn
        ident &= m4_predict_index(replace(idx, historical_correlation=0.0), q) == idx.mean_productivity
    hand = regression_to_mean(30, 22, 0.75) == 28
    pipeline = m4_predict_index(idx, [5, 0, 0, 0, 0, 0, 0, 0])
    ok = ident and hand and pipeline == 28 and idx.historical_correlation == 0.75
    record_criterion(6, ok, f"r=1/r=0 identities {ident}; (30, 22, 0.75) -> {regression_to_mean(30, 22, 0.75)}; "
                            f"12-row pipeline r={idx.historical_correlation} -> {pipeline}")
    assert ok


def test_criterion_07_random_guess():
    effort = generate_synthetic(PROFILES["ds2"], 7, n=50).effort
    b = random_guess_baseline(effort, runs=1000, seed=7)
    rel = abs(b.mae_p0 - b.exact_mae_p0) / b.exact_mae_p0
    small = exact_random_guess_mae([1, 2, 3])
    ok = rel < 0.02 and small == 4 / 3
    record_criterion(7, ok, f"MC {b.mae_p0:.2f} vs exact {b.exact_mae_p0:.2f} ({100 * rel:.2f}%), "
                            f"{{1,2,3}} -> {small!r}")
    assert ok


def test_criterion_08_sa_delta():
    act = np.array([120.0, 300.0, 450.0, 800.0, 1000.0])
    perfect = build_report("x", "d", folds_of(act, act), runs=200)
    zero_sa = standardized_accuracy(perfect.baseline.mae_p0, perfect.baseline.mae_p0)
    zero_delta = effect_size(perfect.baseline.mae_p0, perfect.baseline.mae_p0, perfect.baseline.sp0)
    d = generate_synthetic(PROFILES["ds2"], 8, n=30)
    scaled = replace(d, records=tuple(replace(r, ucp=r.ucp * 1000, effort=r.effort * 1000) for r in d.records))
    a, b = evaluate(d, "sw", seed=8, runs=500), evaluate(scaled, "sw", seed=8, runs=500)
    invariant = abs(a.sa - b.sa) <= 1e-12 * abs(a.sa)
    ok = perfect.sa == 1.0 and zero_sa == 0.0 and zero_delta == 0.0 and invariant
    record_criterion(8, ok, f"perfect SA {perfect.sa}, SA/delta at mae_p0 {zero_sa}/{zero_delta}, "
                            f"SA {a.sa:.12f} vs x1000 {b.sa:.12f}")
    assert ok


def test_criterion_09_wilcoxon():
    rng = np.random.default_rng(9)
    worst, cases = 0.0, 0
    for n1 in range(3, 8):
        for n2 in range(3, 11 - n1):
            for _ in range(25):
                a = rng.integers(0, 8, n1).tolist()
                b = rng.integers(0, 8, n2).tolist()
                r = wilcoxon_ranksum(a, b)
                expected = 1.0 if len(set(a + b)) == 1 else oracle_ranksum_p(a, b)
                worst = max(worst, abs(r.p_value - expected))
                cases += 1
    hand = wilcoxon_ranksum([1, 2, 3], [100, 101, 102]).p_value
    ok = worst <= 1e-12 and hand == 0.1
    record_criterion(9, ok, f"{cases} sample pairs (n1+n2 <= 10), max |p - enum| {worst:.1e}; hand p {hand!r}")
    assert ok


def test_criterion_10_scott_knott():
    rng = np.random.default_rng(10)
    x = rng.exponential(size=40)
    one = len(scott_knott({"a": x, "b": x.copy(), "c": x.copy()}).groups)
    two = scott_knott({"a": x + 1, "b": 100 * (x + 1)}, alpha=0.05).groups
    interleave = 0
    for _ in range(100):
        m = int(rng.integers(2, 8))
        errs = {f"m{i}": rng.lognormal(rng.uniform(0, 3), 1.0, 30) for i in range(m)}
        g = scott_knott(errs)
        flat = [g.means[n] for grp in g.groups for n in grp]
        bounds = [(min(g.means[n] for n in grp), max(g.means[n] for n in grp)) for grp in g.groups]
        ordered = flat == sorted(flat) and all(hi <= lo for (_, hi), (lo, _) in zip(bounds, bounds[1:]))
        interleave += not ordered
    ok = one == 1 and len(two) == 2 and interleave == 0
    record_criterion(10, ok, f"identical -> {one} group, 100x -> {len(two)} groups, "
                             f"{interleave}/100 random sets interleave")
    assert ok


def test_criterion_11_win_tie_loss():
    rng = np.random.default_rng(11)
    act = rng.uniform(100, 2000, 40)
    est = act * rng.uniform(0.6, 1.6, 40)
    t, _ = win_tie_loss({n: folds_of(act, est) for n in "abc"})
    all_ties = all(x.tie == 6 and x.win == x.loss == 0 for x in t.values())
    conserved = True
    for _ in range(50):
        m = int(rng.integers(2, 7))
        models = {f"m{i}": folds_of(act, act * rng.uniform(0.2, 3, 40)) for i in range(m)}
        conserved &= all(x.total == 3 * (m - 1) for x in win_tie_loss(models)[0].values())
    noise = rng.uniform(0.3, 1.0, 40)
    dom, _ = win_tie_loss({"best": folds_of(act, act * (1 + noise / 100)), "other": folds_of(act, act * (1 + noise))})
    ok = all_ties and conserved and dom["best"].win == 3 and dom["best"].loss == 0
    record_criterion(11, ok, f"identical all ties {all_ties}, conservation {conserved}, "
                             f"dominating win/loss {dom['best'].win}/{dom['best'].loss}")
    assert ok


@pytest.mark.slow
def test_criterion_12_direction_of_result():
    sa_hits = dict.fromkeys(PROPOSED, 0)
    beat_karner = dict.fromkeys(PROPOSED, 0)
    losses = {(m, b): 0 for m in PROPOSED for b in ("karner", "sw")}
    slowest = 0.0
    for seed in range(10):
        data = generate_synthetic(PROFILES["ds3"], seed)
        t0 = time.perf_counter()
        reports = {m: evaluate(data, m, seed) for m in MODEL_NAMES}
        slowest = max(slowest, time.perf_counter() - t0)
        _, details = win_tie_loss(reports)
        for m in PROPOSED:
            sa_hits[m] += reports[m].sa > 0.5
            beat_karner[m] += reports[m].mae < reports["karner"].mae
        for d in details:
            pair = {d["a"], d["b"]}
            for m in PROPOSED:
                for base in ("karner", "sw"):
                    if pair == {m, base} and d["winner"] == base:
                        losses[(m, base)] += 1
    total_losses = sum(losses.values())
    lost = {f"{m}<{b}": n for (m, b), n in losses.items() if n}
    ok_sa = all(v >= 8 for v in sa_hits.values())
    ok_mae = all(v >= 8 for v in beat_karner.values())
    ok = ok_sa and ok_mae and total_losses == 0 and slowest < 120
    record_criterion(12, ok, f"SA>50% {sa_hits}; MAE<karner {beat_karner}; losses vs karner/sw "
                             f"{total_losses} {lost}; slowest full run {slowest:.1f}s")
    assert ok


def test_criterion_13_generator_fidelity():
    targets = {"ds1": (24.1, 5.1), "ds2": (20.8, 4.8), "ds3": (22.1, 5.2)}
    parts, ok = [], True
    for name, (mean, sd) in targets.items():
        runs = [generate_synthetic(PROFILES[name], s).productivity for s in range(20)]
        m = float(np.mean([r.mean() for r in runs]))
        s = float(np.mean([r.std(ddof=1) for r in runs]))
        ok &= abs(m - mean) <= 0.05 * mean and abs(s - sd) <= 0.15 * sd
        parts.append(f"{name} mean {m:.2f}/{mean} sd {s:.2f}/{sd}")
    record_criterion(13, ok, "; ".join(parts))
    assert ok


def test_criterion_14_determinism(tmp_path, capsys):
    data = tmp_path / "ds1.csv"
    data.write_text(dumps_dataset(generate_synthetic(PROFILES["ds1"], 14)))
    cfg = tmp_path / "run.cfg"
    outputs = []
    for name in ("a.json", "b.json"):
        cfg.write_text(f"seed = 14\nmc_runs = 1000\ndatasets = {data}\nformat = json\noutput = {tmp_path / name}\n")
        assert main(["evaluate", "--config", str(cfg)]) == 0
        outputs.append((tmp_path / name).read_bytes())
    capsys.readouterr()
    doc = json.loads(outputs[0])
    ok = outputs[0] == outputs[1] and [r["model"] for r in doc["reports"]] == list(MODEL_NAMES)
    record_criterion(14, ok, f"two evaluate runs over {len(MODEL_NAMES)} models, {len(outputs[0])} bytes, "
                             f"identical={outputs[0] == outputs[1]}")
    assert ok
