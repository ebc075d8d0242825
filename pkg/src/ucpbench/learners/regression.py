"""Bidirectional stepwise OLS regression.

Entry and removal use the coefficient t-test, evaluated as the equivalent
one-degree-of-freedom partial F-test (F = t^2), which stays well defined
when a fit is exact.
"""
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy import stats

from ..errors import InvalidArgument
from .stats import BoxCoxParams

EXACT_FIT_RTOL = 1e-14


@dataclass(frozen=True)
class RegressionModel:
    intercept: float
    coefficients: Dict[int, float]
    p_values: Dict[int, float] = field(default_factory=dict)
    transforms: Dict[int, BoxCoxParams] = field(default_factory=dict)
    skipped: tuple = ()

    @property
    def selected(self):
        return tuple(sorted(self.coefficients))

    @property
    def intercept_only(self):
        return not self.coefficients

    def transform_row(self, env) -> np.ndarray:
        x = np.asarray(env, dtype=float).copy()
        for j, t in self.transforms.items():
            x[j] = float(t.apply(x[j]))
        return x

    def design(self, rows) -> np.ndarray:
        x = np.atleast_2d(np.asarray(rows, dtype=float)).copy()
        for j, t in self.transforms.items():
            x[:, j] = t.apply(x[:, j])
        return x


def _sse(x, y, cols):
    a = np.column_stack([np.ones(len(y))] + [x[:, j] for j in cols])
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    r = y - a @ coef
    return float(r @ r), coef


def _partial_p(sse_small, sse_big, df, scale):
    if df <= 0:
        return 1.0
    tol = EXACT_FIT_RTOL * max(scale, 1e-300)
    if sse_small <= tol:
        return 1.0
    if sse_big <= tol:
        return 0.0
    f = max(sse_small - sse_big, 0.0) / (sse_big / df)
    return float(stats.f.sf(f, 1, df))


def coefficient_p_values(x, y, cols) -> Dict[int, float]:
    """Two-sided t-test p-value of each included coefficient."""
    n = len(y)
    # exact-fit tolerance; y @ y keeps it meaningful when y is constant
    scale = max(float(((y - y.mean()) ** 2).sum()), float(y @ y))
    sse_full, _ = _sse(x, y, cols)
    df = n - len(cols) - 1
    out = {}
    for j in cols:
        rest = [c for c in cols if c != j]
        sse_rest, _ = _sse(x, y, rest)
        out[j] = _partial_p(sse_rest, sse_full, df, scale)
    return out


def stepwise_fit(X, y, p_enter: float = 0.05, p_remove: float = 0.10, max_steps: int = 200) -> RegressionModel:
    x = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or len(x) != len(y):
        raise InvalidArgument("X must be a 2-D array aligned with y")
    if len(y) < 10:
        raise InvalidArgument(f"stepwise regression needs at least 10 rows, got {len(y)}")
    if not p_enter <= p_remove:
        raise InvalidArgument("p_enter must not exceed p_remove")
    n, d = x.shape
    # exact-fit tolerance; y @ y keeps it meaningful when y is constant
    scale = max(float(((y - y.mean()) ** 2).sum()), float(y @ y))

    skipped = tuple(j for j in range(d) if np.ptp(x[:, j]) == 0)
    for j in skipped:
        warnings.warn(f"factor {j + 1} has zero variance and was skipped", RuntimeWarning, stacklevel=2)
    pool = [j for j in range(d) if j not in skipped]

    included = []
    seen = set()
    for _ in range(max_steps):
        changed = False
        sse_cur, _ = _sse(x, y, included)
        df = n - len(included) - 2
        best_j, best_p = None, 1.0
        for j in pool:
            if j in included:
                continue
            sse_new, _ = _sse(x, y, included + [j])
            p = _partial_p(sse_cur, sse_new, df, scale)
            if p < best_p:
                best_j, best_p = j, p
        if best_j is not None and best_p < p_enter:
            included.append(best_j)
            changed = True
        while included:
            pv = coefficient_p_values(x, y, included)
            worst = max(included, key=lambda j: (pv[j], -j))
            if pv[worst] > p_remove:
                included.remove(worst)
                changed = True
            else:
                break
        state = tuple(sorted(included))
        if not changed or state in seen:
            break
        seen.add(state)

    cols = sorted(included)
    _, coef = _sse(x, y, cols)
    pv = coefficient_p_values(x, y, cols) if cols else {}
    return RegressionModel(
        intercept=float(coef[0]),
        coefficients={j: float(b) for j, b in zip(cols, coef[1:])},
        p_values=pv,
        skipped=skipped,
    )


def regress_predict(model: RegressionModel, env) -> float:
    x = model.transform_row(env)
    return model.intercept + sum(b * x[j] for j, b in model.coefficients.items())
