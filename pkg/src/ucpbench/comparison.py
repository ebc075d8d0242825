"""Statistical comparison of model error distributions: Wilcoxon rank-sum
tests, Scott-Knott grouping and win-tie-loss tallies."""
import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import InvalidArgument
from .evaluation import MEASURES, PER_FOLD, EvaluationReport
from .learners.stats import MIN_NORMALITY_N, boxcox, boxcox_transform, normality_test

EXACT_MAX_N = 12
ALPHA = 0.05


@dataclass(frozen=True)
class RankSumResult:
    statistic: float  # rank sum of the first sample
    u: float
    p_value: float
    method: str
    degenerate: bool = False


def _midranks(values):
    return stats.rankdata(values, method="average")


def _exact_p(ranks, n1, w_obs):
    n = len(ranks)
    centre = n1 * (n + 1) / 2.0
    obs = abs(w_obs - centre) - 1e-9
    hits = total = 0
    for combo in itertools.combinations(range(n), n1):
        w = sum(ranks[i] for i in combo)
        total += 1
        if abs(w - centre) >= obs:
            hits += 1
    return hits / total


def wilcoxon_ranksum(a, b, exact_max_n: int = EXACT_MAX_N) -> RankSumResult:
    """Two-sided rank-sum test with midranks for ties.

    Exact permutation distribution of the rank sum when n1 + n2 <= exact_max_n,
    otherwise the tie-corrected normal approximation with continuity correction.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 3 or n2 < 3:
        raise InvalidArgument("rank-sum test needs at least 3 values per sample")
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    w = float(ranks[:n1].sum())
    u = w - n1 * (n1 + 1) / 2.0
    if np.all(pooled == pooled[0]):
        return RankSumResult(w, u, 1.0, "degenerate", True)
    n = n1 + n2
    if n <= exact_max_n:
        return RankSumResult(w, u, _exact_p(ranks.tolist(), n1, w), "exact")
    _, counts = np.unique(pooled, return_counts=True)
    tie = float((counts ** 3 - counts).sum())
    var = n1 * n2 / 12.0 * ((n + 1) - tie / (n * (n - 1)))
    z = max(abs(u - n1 * n2 / 2.0) - 0.5, 0.0) / math.sqrt(var)
    return RankSumResult(w, u, min(1.0, 2.0 * float(stats.norm.sf(z))), "normal")


# --------------------------------------------------------------------------
# Scott-Knott

@dataclass
class SKSplit:
    models: List[str]
    cut: int
    b0: float
    lam: float
    df: float
    p_value: float
    accepted: bool


@dataclass
class SKGrouping:
    groups: List[List[str]]
    means: Dict[str, float]
    splits: List[SKSplit]
    boxcox_lambda: Optional[float] = None
    boxcox_shift: float = 0.0
    excluded: List[str] = field(default_factory=list)

    def rank_of(self, model: str) -> int:
        for i, g in enumerate(self.groups, start=1):
            if model in g:
                return i
        raise KeyError(model)

    def to_dict(self):
        return {
            "groups": [{"rank": i, "models": g, "means": {m: self.means[m] for m in g}}
                       for i, g in enumerate(self.groups, start=1)],
            "boxcox_lambda": self.boxcox_lambda,
            "boxcox_shift": self.boxcox_shift,
            "splits": [{"models": s.models, "cut": s.cut, "b0": s.b0, "lambda": s.lam, "df": s.df,
                        "p_value": s.p_value, "accepted": s.accepted} for s in self.splits],
            "excluded": self.excluded,
        }


def _best_cut(means):
    g = len(means)
    total = sum(means)
    best, cut = None, 1
    for c in range(1, g):
        t1 = sum(means[:c])
        t2 = total - t1
        b = t1 * t1 / c + t2 * t2 / (g - c) - total * total / g
        if best is None or b > best + 1e-12 * max(1.0, abs(best)):
            best, cut = b, c
    return max(best, 0.0), cut


def scott_knott(errors: Mapping[str, Sequence[float]], alpha: float = ALPHA, transform: bool = True) -> SKGrouping:
    """Partition models into non-overlapping groups of mean (transformed)
    absolute error; rank 1 is the lowest-error group."""
    samples, excluded = {}, []
    for name, v in errors.items():
        arr = np.asarray(v, dtype=float)
        arr = arr[np.isfinite(arr)]
        if arr.size < 3:
            warnings.warn(f"scott-knott: model {name!r} has fewer than 3 errors and was excluded", RuntimeWarning)
            excluded.append(name)
        else:
            samples[name] = arr
    if len(samples) < 2:
        raise InvalidArgument("scott-knott needs at least two models with >= 3 errors")

    lam, shift = None, 0.0
    pooled = np.concatenate(list(samples.values()))
    if transform and pooled.size >= MIN_NORMALITY_N and normality_test(pooled).p_value < alpha:
        shift = 1.0 if pooled.min() <= 0 else 0.0
        lam, _ = boxcox(pooled + shift)
        samples = {k: boxcox_transform(v + shift, lam) for k, v in samples.items()}

    means = {k: float(v.mean()) for k, v in samples.items()}
    order = sorted(samples, key=lambda k: (means[k], k))
    n_total = sum(v.size for v in samples.values())
    dof = n_total - len(samples)
    mse = sum(float(((v - v.mean()) ** 2).sum()) for v in samples.values()) / dof
    n_h = len(samples) / sum(1.0 / v.size for v in samples.values())
    var_mean = mse / n_h

    splits, groups = [], []

    def recurse(names):
        g = len(names)
        if g < 2:
            groups.append(list(names))
            return
        mu = [means[k] for k in names]
        b0, cut = _best_cut(mu)
        grand = sum(mu) / g
        sigma2 = (sum((m - grand) ** 2 for m in mu) + dof * var_mean) / (g + dof)
        lam_stat = (math.pi / (2.0 * (math.pi - 2.0))) * b0 / sigma2 if sigma2 > 0 else 0.0
        df = g / (math.pi - 2.0)
        p = float(stats.chi2.sf(lam_stat, df))
        accepted = b0 > 0 and p < alpha
        splits.append(SKSplit(list(names), cut, b0, lam_stat, df, p, accepted))
        if accepted:
            recurse(names[:cut])
            recurse(names[cut:])
        else:
            groups.append(list(names))

    recurse(order)
    return SKGrouping(groups, means, splits, lam, shift, excluded)


# --------------------------------------------------------------------------
# win-tie-loss

@dataclass
class WTLTally:
    win: int = 0
    tie: int = 0
    loss: int = 0

    @property
    def total(self):
        return self.win + self.tie + self.loss

    def __add__(self, other):
        return WTLTally(self.win + other.win, self.tie + other.tie, self.loss + other.loss)


def _folds_of(x):
    return x.folds if isinstance(x, EvaluationReport) else list(x)


def win_tie_loss(
    models: Mapping[str, Sequence],
    measures: Sequence[str] = ("mae", "mbre", "mibre"),
    alpha: float = ALPHA,
    gate: str = "ae",
):
    """Round-robin tally over model pairs and measures.

    Each comparison is gated by a rank-sum test at ``alpha``: ``gate="ae"``
    tests the absolute-error samples for every measure, ``gate="measure"``
    tests the per-fold terms of the measure being compared. A non-significant
    test, or identical aggregates, is a tie; otherwise the smaller aggregate
    wins.

    Returns ``(tallies, details)``.
    """
    if gate not in ("ae", "measure"):
        raise InvalidArgument(f"unknown gate {gate!r}")
    names = list(models)
    if len(names) < 2:
        raise InvalidArgument("win-tie-loss needs at least two models")
    folds = {k: _folds_of(v) for k, v in models.items()}
    counts = {len(v) for v in folds.values()}
    if len(counts) != 1:
        raise InvalidArgument(f"misaligned fold counts: {sorted(counts)}")
    for m in measures:
        if m not in MEASURES:
            raise InvalidArgument(f"unknown measure {m!r}")
    tallies = {k: WTLTally() for k in names}
    details = []
    for i, j in itertools.combinations(range(len(names)), 2):
        a, b = names[i], names[j]
        for m in measures:
            kind = "mae" if gate == "ae" else m
            p = wilcoxon_ranksum(PER_FOLD[kind](folds[a]), PER_FOLD[kind](folds[b])).p_value
            ea, eb = MEASURES[m](folds[a]), MEASURES[m](folds[b])
            if p >= alpha or ea == eb:
                tallies[a].tie += 1
                tallies[b].tie += 1
                outcome = "tie"
            elif ea < eb:
                tallies[a].win += 1
                tallies[b].loss += 1
                outcome = a
            else:
                tallies[b].win += 1
                tallies[a].loss += 1
                outcome = b
            details.append({"a": a, "b": b, "measure": m, "p_value": p, "a_value": ea, "b_value": eb,
                            "winner": outcome})
    return tallies, details


# --------------------------------------------------------------------------
# bundle

@dataclass
class ComparisonResult:
    models: List[str]
    p_matrix: List[List[Optional[float]]]
    scott_knott: SKGrouping
    wtl: Dict[str, WTLTally]
    dataset: str = ""

    def to_dict(self):
        lower = {}
        for i, row in enumerate(self.models):
            lower[row] = {self.models[j]: self.p_matrix[i][j] for j in range(i)}
        return {
            "dataset": self.dataset,
            "models": self.models,
            "wilcoxon_p": lower,
            "scott_knott": self.scott_knott.to_dict(),
            "win_tie_loss": {k: {"win": t.win, "tie": t.tie, "loss": t.loss} for k, t in self.wtl.items()},
        }


def compare_reports(reports: Sequence[EvaluationReport], alpha: float = ALPHA, gate: str = "ae") -> ComparisonResult:
    if len(reports) < 2:
        raise InvalidArgument("need at least two reports to compare")
    names = [r.model for r in reports]
    if len(set(names)) != len(names):
        raise InvalidArgument(f"duplicate model names: {names}")
    ids = reports[0].ids
    for r in reports[1:]:
        if r.ids != ids:
            raise InvalidArgument(f"fold ids of {r.model!r} do not match {reports[0].model!r}")
    ae = {r.model: PER_FOLD["mae"](r.folds) for r in reports}
    p = [[None] * len(names) for _ in names]
    for i, j in itertools.combinations(range(len(names)), 2):
        pv = wilcoxon_ranksum(ae[names[i]], ae[names[j]]).p_value
        p[i][j] = p[j][i] = pv
    sk = scott_knott(ae, alpha)
    wtl, _ = win_tie_loss({r.model: r.folds for r in reports}, alpha=alpha, gate=gate)
    return ComparisonResult(names, p, sk, wtl, reports[0].dataset)
