"""Leave-one-out evaluation, error measures and the random-guessing baseline."""
import json
import logging
from dataclasses import dataclass, field, asdict
from typing import List, Optional, Sequence

import numpy as np

from .dataset import Dataset
from .errors import InvalidArgument, MetricError, UndefinedBaseline
from .models import Estimator, make_estimator
from .seeding import derive_seed, rng_for

log = logging.getLogger(__name__)

DEFAULT_RUNS = 1000


@dataclass(frozen=True)
class FoldResult:
    id: str
    actual: float
    estimate: float
    failed: bool = False
    error: Optional[str] = None

    @property
    def ae(self) -> float:
        return abs(self.actual - self.estimate)


def loocv(
    data: Dataset,
    model: str,
    seed: int = 0,
    strict: bool = False,
    **options,
) -> List[FoldResult]:
    """Hold out each row in turn and estimate it from a fresh estimator fit
    on the remaining rows.

    Unless ``strict``, choices the model makes on the whole dataset
    (the number of clusters for m1/m2) are made once up front and reused
    by every fold. A fold whose fit or prediction raises is returned with
    ``failed=True``.
    """
    if len(data) < 4:
        raise InvalidArgument(f"leave-one-out needs at least 4 rows, got {len(data)}")
    preset = {} if strict else make_estimator(model, seed, **options).preselect(data)
    results = []
    for i, record in enumerate(data.records):
        train = data.without(i)
        assert record.id not in set(train.ids), "held-out row leaked into training"
        est = make_estimator(model, derive_seed(seed, f"fold:{model}", i), **options)
        try:
            est.fit(train, preset)
            estimate = float(est.estimate_effort(record.env, record.ucp))
            results.append(FoldResult(record.id, record.effort, estimate))
        except Exception as exc:  # surfaced on the report, never dropped silently
            log.warning("%s fold %s failed: %s", model, record.id, exc)
            results.append(FoldResult(record.id, record.effort, float("nan"), True, f"{type(exc).__name__}: {exc}"))
    return results


def _ok(folds):
    return [f for f in folds if not f.failed]


def _arrays(folds):
    ok = _ok(folds)
    if not ok:
        raise MetricError("no successful folds")
    e = np.array([f.actual for f in ok], dtype=float)
    est = np.array([f.estimate for f in ok], dtype=float)
    return e, est, ok


def absolute_errors(folds) -> np.ndarray:
    e, est, _ = _arrays(folds)
    return np.abs(e - est)


def _check_positive(e, est, ok):
    for f in ok:
        if not (f.actual > 0 and f.estimate > 0):
            raise MetricError(f"fold {f.id}: relative error needs positive actual and estimate")


def balanced_relative_errors(folds) -> np.ndarray:
    e, est, ok = _arrays(folds)
    _check_positive(e, est, ok)
    return np.abs(e - est) / np.minimum(e, est)


def inverted_balanced_relative_errors(folds) -> np.ndarray:
    e, est, ok = _arrays(folds)
    _check_positive(e, est, ok)
    return np.abs(e - est) / np.maximum(e, est)


def mae(folds) -> float:
    return float(np.mean(absolute_errors(folds)))


def mbre(folds) -> float:
    return float(np.mean(balanced_relative_errors(folds)))


def mibre(folds) -> float:
    return float(np.mean(inverted_balanced_relative_errors(folds)))


MEASURES = {"mae": mae, "mbre": mbre, "mibre": mibre}
PER_FOLD = {
    "mae": absolute_errors,
    "mbre": balanced_relative_errors,
    "mibre": inverted_balanced_relative_errors,
}


# --------------------------------------------------------------------------
# random guessing

@dataclass(frozen=True)
class RandomGuessBaseline:
    mae_p0: float
    sp0: float
    runs: int
    seed: int
    exact_mae_p0: float
    run_mae_se: float
    sp0_mode: str = "pooled"


def exact_random_guess_mae(efforts) -> float:
    """Expected MAE when every target is guessed by a uniformly chosen other case."""
    e = np.asarray(efforts, dtype=float)
    n = len(e)
    if n < 2:
        raise InvalidArgument("need at least two efforts")
    diff = np.abs(e[:, None] - e[None, :])
    return float(diff.sum() / (n * (n - 1)))


def random_guess_baseline(efforts, runs: int = DEFAULT_RUNS, seed: int = 0, sp0_mode: str = "pooled") -> RandomGuessBaseline:
    """Monte Carlo random guessing.

    ``sp0_mode="pooled"`` takes the sample standard deviation of every
    per-guess absolute error across all runs; ``"run"`` takes the standard
    deviation of the per-run MAEs.
    """
    e = np.asarray(efforts, dtype=float)
    n = len(e)
    if n < 3:
        raise InvalidArgument(f"random guessing needs at least 3 cases, got {n}")
    if runs < 1:
        raise InvalidArgument("runs must be >= 1")
    if sp0_mode not in ("pooled", "run"):
        raise InvalidArgument(f"unknown sp0 mode {sp0_mode!r}")
    rng = rng_for(seed, "random-guess")
    pick = rng.integers(0, n - 1, size=(runs, n))
    target = np.arange(n)
    pick = pick + (pick >= target)  # uniform over the other n-1 cases
    ae = np.abs(e[None, :] - e[pick])
    run_mae = ae.mean(axis=1)
    if sp0_mode == "pooled":
        sp0 = float(ae.std(ddof=1)) if ae.size > 1 else 0.0
    else:
        sp0 = float(run_mae.std(ddof=1)) if runs > 1 else 0.0
    se = float(run_mae.std(ddof=1) / np.sqrt(runs)) if runs > 1 else 0.0
    return RandomGuessBaseline(
        mae_p0=float(run_mae.mean()),
        sp0=sp0,
        runs=int(runs),
        seed=int(seed),
        exact_mae_p0=exact_random_guess_mae(e),
        run_mae_se=se,
        sp0_mode=sp0_mode,
    )


def standardized_accuracy(mae_value: float, mae_p0: float) -> float:
    if not mae_p0 > 0:
        raise UndefinedBaseline("random-guess MAE is zero; SA undefined")
    return 1.0 - mae_value / mae_p0


def effect_size(mae_value: float, mae_p0: float, sp0: float) -> float:
    """Positive when the model beats random guessing."""
    if not sp0 > 0:
        raise UndefinedBaseline("random-guess spread is zero; effect size undefined")
    return (mae_p0 - mae_value) / sp0


def effect_category(delta: float) -> str:
    a = abs(delta)
    if a >= 0.8:
        return "large"
    if a >= 0.5:
        return "medium"
    if a >= 0.2:
        return "small"
    return "negligible"


# --------------------------------------------------------------------------
# reports

@dataclass
class EvaluationReport:
    model: str
    seed: int
    dataset: str
    folds: List[FoldResult]
    mae: float
    mbre: float
    mibre: float
    sa: Optional[float]
    delta: Optional[float]
    baseline: RandomGuessBaseline
    warnings: List[str] = field(default_factory=list)

    @property
    def ok_folds(self):
        return _ok(self.folds)

    @property
    def ids(self):
        return [f.id for f in self.folds]

    def to_dict(self):
        return {
            "model": self.model,
            "seed": self.seed,
            "dataset": self.dataset,
            "folds": [
                {"id": f.id, "e": f.actual, "e_hat": f.estimate, "ae": f.ae,
                 **({"failed": True, "error": f.error} if f.failed else {})}
                for f in self.folds
            ],
            "aggregates": {"mae": self.mae, "mbre": self.mbre, "mibre": self.mibre, "sa": self.sa, "delta": self.delta},
            "baseline": {
                "mae_p0": self.baseline.mae_p0,
                "sp0": self.baseline.sp0,
                "runs": self.baseline.runs,
                "seed": self.baseline.seed,
                "exact_mae_p0": self.baseline.exact_mae_p0,
                "sp0_mode": self.baseline.sp0_mode,
            },
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d):
        folds = []
        for f in d["folds"]:
            failed = bool(f.get("failed", False))
            est = float("nan") if f.get("e_hat") is None else float(f["e_hat"])
            folds.append(FoldResult(str(f["id"]), float(f["e"]), est, failed, f.get("error")))
        b = d["baseline"]
        baseline = RandomGuessBaseline(
            mae_p0=b["mae_p0"], sp0=b["sp0"], runs=b["runs"], seed=b["seed"],
            exact_mae_p0=b["exact_mae_p0"], run_mae_se=b.get("run_mae_se", float("nan")),
            sp0_mode=b.get("sp0_mode", "pooled"),
        )
        a = d["aggregates"]
        return cls(d["model"], d["seed"], d.get("dataset", ""), folds, a["mae"], a["mbre"], a["mibre"],
                   a.get("sa"), a.get("delta"), baseline, list(d.get("warnings", [])))


def build_report(model, data_name, folds, seed=0, runs=DEFAULT_RUNS, sp0_mode="pooled") -> EvaluationReport:
    ok = _ok(folds)
    warnings = [f"fold {f.id} failed: {f.error}" for f in folds if f.failed]
    if len(ok) < 3:
        first = next((f.error for f in folds if f.failed), "")
        raise MetricError(f"{model}: only {len(ok)} of {len(folds)} folds succeeded ({first})")
    baseline = random_guess_baseline([f.actual for f in ok], runs, derive_seed(seed, "baseline"), sp0_mode)
    m = mae(folds)
    sa = delta = None
    try:
        sa = standardized_accuracy(m, baseline.mae_p0)
        delta = effect_size(m, baseline.mae_p0, baseline.sp0)
    except UndefinedBaseline as exc:
        warnings.append(str(exc))
    log.debug("%s: MC mae_p0 %.6g vs exact %.6g", model, baseline.mae_p0, baseline.exact_mae_p0)
    return EvaluationReport(model, int(seed), data_name, list(folds), m, mbre(folds), mibre(folds), sa, delta,
                            baseline, warnings)


def evaluate(data: Dataset, model: str, seed: int = 0, runs: int = DEFAULT_RUNS, strict: bool = False,
             sp0_mode: str = "pooled", **options) -> EvaluationReport:
    folds = loocv(data, model, seed, strict=strict, **options)
    return build_report(model, data.name, folds, seed, runs, sp0_mode)
