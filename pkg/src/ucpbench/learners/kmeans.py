"""Lloyd's k-means with farthest-point seeding, the cluster validity index
used for choosing k, and the best-k search over ``2..m//3``."""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..errors import DegenerateClustering, InvalidArgument
from ..seeding import rng_for

MAX_ITER = 100


@dataclass(frozen=True)
class Clustering:
    k: int
    centers: np.ndarray
    assignment: np.ndarray
    inertia: float
    points: np.ndarray
    inertia_history: tuple = ()
    converged: bool = True

    @property
    def m(self):
        return len(self.points)


def _as_points(points):
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidArgument("points must be a sequence of equal-length vectors")
    return x


def _sqdist(x, centers):
    return ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def _farthest_point_init(x, k, rng):
    m = len(x)
    chosen = [int(rng.integers(m))]
    d = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(d))  # first index on ties
        chosen.append(nxt)
        d = np.minimum(d, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def kmeans_fit(points, k: int, seed: int = 0, max_iter: int = MAX_ITER) -> Clustering:
    x = _as_points(points)
    m = len(x)
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= m):
        raise InvalidArgument(f"k must be in 1..{m}, got {k!r}")
    k = int(k)
    centers = _farthest_point_init(x, k, rng_for(seed, "kmeans-init", k))
    history = []
    assignment = None
    converged = False
    for _ in range(max_iter):
        d2 = _sqdist(x, centers)
        new_assignment = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(m), new_assignment].sum())
        if history and inertia > history[-1] * (1 + 1e-12) + 1e-12:
            raise AssertionError("k-means inertia increased between iterations")
        history.append(inertia)
        if assignment is not None and np.array_equal(new_assignment, assignment):
            converged = True
            break
        assignment = new_assignment
        for j in range(k):
            members = assignment == j
            if members.any():
                centers[j] = x[members].mean(axis=0)
        empty = [j for j in range(k) if not (assignment == j).any()]
        if empty:
            # re-seed each empty cluster on the point farthest from its own center
            own = ((x - centers[assignment]) ** 2).sum(axis=1)
            for j in empty:
                far = int(np.argmax(own))
                centers[j] = x[far]
                own[far] = -1.0
    d2 = _sqdist(x, centers)
    assignment = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(m), assignment].sum())
    return Clustering(
        k=k,
        centers=centers,
        assignment=assignment,
        inertia=inertia,
        points=x,
        inertia_history=tuple(history),
        converged=converged,
    )


def cluster_validity(c: Clustering) -> float:
    """Mean (unsquared) point-to-own-center distance divided by the smallest
    squared distance between two centers."""
    if c.k < 2:
        raise InvalidArgument("cluster validity needs at least two clusters")
    x, z = c.points, c.centers
    within = np.sqrt(((x - z[c.assignment]) ** 2).sum(axis=1)).sum() / len(x)
    sep = _sqdist(z, z)
    sep[np.diag_indices(c.k)] = np.inf
    min_sep = float(sep.min())
    if min_sep <= 0.0:
        raise DegenerateClustering("two cluster centers coincide")
    return float(within / min_sep)


@dataclass(frozen=True)
class KSearch:
    k: int
    scores: dict
    degenerate: bool = False


def k_candidates(m: int) -> range:
    return range(2, max(2, m // 3) + 1)


def search_k(points, seed: int = 0) -> KSearch:
    """Score every candidate k; coincident-center clusterings score +inf."""
    x = _as_points(points)
    m = len(x)
    if m < 6:
        return KSearch(k=2, scores={}, degenerate=True)
    scores = {}
    for k in k_candidates(m):
        try:
            scores[k] = cluster_validity(kmeans_fit(x, k, seed))
        except DegenerateClustering:
            scores[k] = float("inf")
    finite = {k: s for k, s in scores.items() if np.isfinite(s)}
    if not finite:
        return KSearch(k=2, scores=scores, degenerate=True)
    best = min(finite, key=lambda k: (finite[k], k))
    return KSearch(k=best, scores=scores)


def select_best_k(points, seed: int = 0) -> int:
    return search_k(points, seed).k
