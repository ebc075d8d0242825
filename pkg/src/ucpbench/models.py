"""Productivity estimators sharing one fit/predict contract.

Every estimator predicts productivity (person-hours per UCP) from the eight
environmental ratings; effort is productivity times UCP, except for the
Nassif baseline, which uses its own nonlinear form.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from . import baselines
from .baselines import SWLevel, calibrate_nassif, nassif_effort, sw_classify
from .dataset import Dataset
from .errors import InvalidArgument
from .learners.analogy import AnalogyIndex, build_index, nearest_analogy, regression_to_mean
from .learners.forest import ForestModel, ForestParams, rf_fit
from .learners.kmeans import kmeans_fit, select_best_k
from .learners.regression import RegressionModel, regress_predict, stepwise_fit
from .learners.stats import MIN_NORMALITY_N, BoxCoxParams, boxcox, normality_test
from .seeding import derive_seed
from .size import ENVIRONMENTAL_WEIGHTS, as_env

log = logging.getLogger(__name__)

PRODUCTIVITY_BOUNDS = (1.0, 100.0)
NORMALITY_ALPHA = 0.05
MIN_CLUSTER_ROWS = 6
ENV_WEIGHTS = np.asarray(ENVIRONMENTAL_WEIGHTS)


def clamp_productivity(value: float, model: str = "") -> float:
    lo, hi = PRODUCTIVITY_BOUNDS
    if value < lo or value > hi or not np.isfinite(value):
        clamped = lo if not value >= lo else hi
        log.info("%s productivity %.4g clamped to %.4g", model or "model", value, clamped)
        return clamped
    return float(value)


def _env_vector(env):
    return np.asarray(as_env(env).values, dtype=float)


class Estimator:
    name = "base"
    uses_training = True

    def __init__(self, seed: int = 0, **options):
        self.seed = int(seed)
        self.options = options
        self.fitted = False
        self.flags = []

    def preselect(self, full: Dataset) -> dict:
        """Choices made once on the whole dataset before cross-validation."""
        return {}

    def fit(self, train: Dataset, preset: Optional[dict] = None):
        self._fit(train, preset or {})
        self.fitted = True
        return self

    def _fit(self, train, preset):
        pass

    def _require_fitted(self):
        if not self.fitted:
            raise RuntimeError(f"{self.name} estimator used before fit")

    def predict_productivity(self, env) -> float:
        self._require_fitted()
        return self._predict(_env_vector(env))

    def _predict(self, env):
        raise NotImplementedError

    def estimate_effort(self, env, ucp: float) -> float:
        if not ucp > 0:
            raise InvalidArgument(f"ucp must be positive, got {ucp!r}")
        return self.predict_productivity(env) * ucp


class KarnerEstimator(Estimator):
    name = "karner"
    uses_training = False

    def _predict(self, env):
        return baselines.KARNER_RATE


class SWEstimator(Estimator):
    name = "sw"
    uses_training = False

    def _predict(self, env):
        return sw_classify(env.astype(int)).pdr


class NassifEstimator(Estimator):
    """Team productivity is size/effort here, so ``predict_productivity``
    returns a level from the lookup, and effort follows the nonlinear form."""

    name = "nassif"

    def _fit(self, train, preset):
        params = self.options.get("nassif_params")
        if params is None:
            params = calibrate_nassif(
                [r.env for r in train], train.ucp, train.effort,
                alpha=self.options.get("nassif_alpha", baselines.NASSIF_ALPHA),
                beta=self.options.get("nassif_beta", baselines.NASSIF_BETA),
                cutpoints=self.options.get("nassif_cutpoints"),
            )
        self.params = params

    def _predict(self, env):
        return self.params.team_productivity(float(env @ ENV_WEIGHTS))

    def estimate_effort(self, env, ucp):
        return nassif_effort(self.predict_productivity(env), ucp, self.params.alpha, self.params.beta)


# --------------------------------------------------------------------------
# M1: S&W classes decomposed by k-means, learned by a random forest

def _standardize(points):
    mu = points.mean(axis=0)
    sd = points.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (points - mu) / sd


@dataclass
class ClusterGroup:
    """One labelled region: a forest maps env ratings to a cluster label,
    and each label carries its centroid productivity."""

    k: int
    centroids: Dict[int, float]
    forest: Optional[ForestModel]
    fallback: bool = False

    def predict(self, env) -> float:
        if self.forest is None:
            return next(iter(self.centroids.values()))
        return self.centroids[self.forest.predict(env)]

    @property
    def values(self):
        return set(self.centroids.values())


def _cluster_group(env, points, productivity, k, seed, params, tag):
    m = len(points)
    if k is None:
        k = select_best_k(points, derive_seed(seed, f"{tag}:k"))
    k = int(min(max(k, 1), m))
    clustering = kmeans_fit(points, k, derive_seed(seed, f"{tag}:kmeans"))
    labels = clustering.assignment
    centroids = {int(c): float(productivity[labels == c].mean()) for c in np.unique(labels)}
    if len(centroids) == 1:
        return ClusterGroup(k, centroids, None)
    forest = rf_fit(env, labels.tolist(), derive_seed(seed, f"{tag}:rf"), params)
    return ClusterGroup(k, centroids, forest)


def _single_cluster(productivity):
    return ClusterGroup(1, {0: float(np.mean(productivity))}, None)


@dataclass
class M1State:
    groups: Dict[SWLevel, ClusterGroup]
    flags: list = field(default_factory=list)


def _m1_points(env, productivity):
    return _standardize(np.column_stack([env, productivity]))


def _sw_levels(train):
    return np.array([sw_classify(r.env).level.value for r in train])


def m1_select_k(data: Dataset, seed: int) -> Dict[SWLevel, int]:
    out = {}
    if len(data) == 0:
        return out
    levels = _sw_levels(data)
    env, prod = data.env, data.productivity
    for level in SWLevel:
        mask = levels == level.value
        if mask.sum() >= MIN_CLUSTER_ROWS:
            out[level] = select_best_k(_m1_points(env[mask], prod[mask]), derive_seed(seed, f"m1:{level.value}:k"))
    return out


def m1_fit(train: Dataset, seed: int = 0, best_k: Optional[Dict] = None, params: ForestParams = ForestParams()) -> M1State:
    levels = _sw_levels(train)
    env, prod = train.env, train.productivity
    groups, flags = {}, []
    for level in SWLevel:
        mask = levels == level.value
        count = int(mask.sum())
        if count == 0:
            continue
        if count < MIN_CLUSTER_ROWS:
            groups[level] = _single_cluster(prod[mask])
            flags.append(f"{level.value}: {count} rows, treated as one cluster")
            continue
        k = None if best_k is None else best_k.get(level)
        groups[level] = _cluster_group(
            env[mask], _m1_points(env[mask], prod[mask]), prod[mask], k, seed, params, f"m1:{level.value}"
        )
    return M1State(groups, flags)


def m1_predict(state: M1State, env) -> float:
    v = _env_vector(env)
    cls = sw_classify(v.astype(int))
    group = state.groups.get(cls.level)
    if group is None:
        log.info("m1: no training rows in S&W level %s, using its rate %.0f", cls.level.value, cls.pdr)
        return cls.pdr
    return group.predict(v)


class M1Estimator(Estimator):
    name = "m1"

    def preselect(self, full):
        return {"best_k": m1_select_k(full, self.seed)}

    def _fit(self, train, preset):
        self.state = m1_fit(train, self.seed, preset.get("best_k"))
        self.flags.extend(self.state.flags)

    def _predict(self, env):
        return m1_predict(self.state, env)


# --------------------------------------------------------------------------
# M2: clusters of productivity alone, learned by a random forest

@dataclass
class M2State:
    best_k: int
    group: ClusterGroup

    @property
    def centroids(self):
        return sorted(self.group.values)


def m2_select_k(data: Dataset, seed: int) -> int:
    return select_best_k(data.productivity[:, None], derive_seed(seed, "m2:k"))


def m2_fit(train: Dataset, seed: int = 0, best_k: Optional[int] = None, params: ForestParams = ForestParams()) -> M2State:
    prod = train.productivity
    if len(train) < MIN_CLUSTER_ROWS:
        return M2State(1, _single_cluster(prod))
    group = _cluster_group(train.env, prod[:, None], prod, best_k, seed, params, "m2")
    return M2State(group.k, group)


def m2_predict(state: M2State, env) -> float:
    return state.group.predict(_env_vector(env))


class M2Estimator(Estimator):
    name = "m2"

    def preselect(self, full):
        return {"best_k": m2_select_k(full, self.seed)}

    def _fit(self, train, preset):
        self.state = m2_fit(train, self.seed, preset.get("best_k"))

    def _predict(self, env):
        return m2_predict(self.state, env)


# --------------------------------------------------------------------------
# M3: stepwise regression on (Box-Cox normalised) factors

ENV_SHIFT = 1.0  # ratings start at 0; Box-Cox needs positive input


def m3_fit(train: Dataset, p_enter: float = 0.05, p_remove: float = 0.10) -> RegressionModel:
    x = train.env.copy()
    y = train.productivity
    transforms = {}
    if len(train) >= MIN_NORMALITY_N:
        for j in range(x.shape[1]):
            col = x[:, j]
            if np.ptp(col) == 0:
                continue
            if normality_test(col).p_value < NORMALITY_ALPHA:
                lam, z = boxcox(col + ENV_SHIFT)
                transforms[j] = BoxCoxParams(lam, ENV_SHIFT)
                x[:, j] = z
    model = stepwise_fit(x, y, p_enter, p_remove)
    if model.intercept_only:
        log.info("m3: no factor entered; intercept-only model")
    return RegressionModel(
        intercept=model.intercept,
        coefficients=model.coefficients,
        p_values=model.p_values,
        transforms={j: t for j, t in transforms.items() if j in model.coefficients},
        skipped=model.skipped,
    )


def m3_predict(model: RegressionModel, env) -> float:
    return clamp_productivity(regress_predict(model, np.asarray(env, dtype=float)), "m3")


class M3Estimator(Estimator):
    name = "m3"

    def _fit(self, train, preset):
        self.model = m3_fit(train, self.options.get("p_enter", 0.05), self.options.get("p_remove", 0.10))
        if self.model.intercept_only:
            self.flags.append("intercept-only model")

    def _predict(self, env):
        return m3_predict(self.model, env)


# --------------------------------------------------------------------------
# M4: nearest analogy adjusted towards the mean

def m4_fit(train: Dataset) -> AnalogyIndex:
    if len(train) < 3:
        raise InvalidArgument("m4 needs at least 3 training rows")
    return build_index(train.env, train.productivity, train.ids)


def m4_predict_index(index: AnalogyIndex, env) -> float:
    neighbour, _ = nearest_analogy(index, np.asarray(env, dtype=float))
    value = regression_to_mean(neighbour, index.mean_productivity, index.historical_correlation)
    return clamp_productivity(value, "m4")


def m4_predict(train: Dataset, env) -> float:
    return m4_predict_index(m4_fit(train), env)


class M4Estimator(Estimator):
    name = "m4"

    def _fit(self, train, preset):
        self.index = m4_fit(train)

    def _predict(self, env):
        return m4_predict_index(self.index, env)


ESTIMATORS = {
    cls.name: cls
    for cls in (KarnerEstimator, SWEstimator, NassifEstimator, M1Estimator, M2Estimator, M3Estimator, M4Estimator)
}
MODEL_NAMES = tuple(ESTIMATORS)


def make_estimator(name: str, seed: int = 0, **options) -> Estimator:
    try:
        cls = ESTIMATORS[name]
    except KeyError:
        raise InvalidArgument(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}") from None
    return cls(seed=seed, **options)


def estimate_effort(est: Estimator, train: Dataset, query) -> float:
    """Fit ``est`` on ``train`` if needed, then estimate ``query`` effort.

    ``query`` is any object with ``env`` and ``ucp`` attributes, or a
    mapping with those keys.
    """
    env = query["env"] if isinstance(query, dict) else query.env
    ucp = query["ucp"] if isinstance(query, dict) else query.ucp
    if not est.fitted:
        est.fit(train)
    return est.estimate_effort(env, ucp)
