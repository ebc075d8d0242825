"""One-nearest-neighbour analogy retrieval over environmental factors."""
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument


@dataclass(frozen=True)
class AnalogyIndex:
    features: np.ndarray
    productivity: np.ndarray
    ids: tuple
    historical_correlation: float
    mean_productivity: float


def _nearest(features, query, exclude=None):
    d2 = ((features - np.asarray(query, dtype=float)) ** 2).sum(axis=1)
    if exclude is not None:
        d2[exclude] = np.inf
    return int(np.argmin(d2))  # first index wins ties


def loo_neighbours(features) -> np.ndarray:
    """Index of each row's nearest other row."""
    f = np.asarray(features, dtype=float)
    d2 = ((f[:, None, :] - f[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    return np.argmin(d2, axis=1)


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da, db = a - a.mean(), b - b.mean()
    denom = np.sqrt((da @ da) * (db @ db))
    if not denom > 0:
        return float("nan")
    return float((da @ db) / denom)


def build_index(features, productivity, ids=None) -> AnalogyIndex:
    """Correlation ``r`` compares leave-one-out 1-NN predictions with the
    actual productivities; undefined correlation becomes 0."""
    f = np.asarray(features, dtype=float)
    p = np.asarray(productivity, dtype=float)
    if len(f) == 0 or len(f) != len(p):
        raise InvalidArgument("analogy index needs aligned, non-empty training data")
    ids = tuple(ids) if ids is not None else tuple(str(i) for i in range(len(f)))
    if len(f) >= 2:
        r = pearson(p[loo_neighbours(f)], p)
        if not np.isfinite(r):
            r = 0.0
    else:
        r = 0.0
    return AnalogyIndex(f, p, ids, r, float(p.mean()))


def nearest_analogy(index: AnalogyIndex, query):
    i = _nearest(index.features, query)
    return float(index.productivity[i]), index.ids[i]


def regression_to_mean(neighbour: float, mean: float, r: float) -> float:
    """``neighbour + (mean - neighbour) * (1 - r)``, evaluated as a convex
    combination so the r = 0 and r = 1 endpoints come out exact."""
    return r * neighbour + (1.0 - r) * mean
