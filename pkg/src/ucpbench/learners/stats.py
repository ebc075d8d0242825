"""Box-Cox transformation and the D'Agostino-Pearson omnibus normality test."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import InvalidArgument, UnsupportedSampleSize

LAMBDA_GRID = np.round(np.arange(-300, 301) / 100.0, 2)


def boxcox_transform(values, lam: float) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if lam == 0.0:
        return np.log(v)
    return (np.power(v, lam) - 1.0) / lam


def boxcox_loglik(values, lam: float) -> float:
    v = np.asarray(values, dtype=float)
    y = boxcox_transform(v, lam)
    var = float(np.var(y))
    if not var > 0 or not math.isfinite(var):
        return -math.inf
    return (lam - 1.0) * float(np.log(v).sum()) - 0.5 * len(v) * math.log(var)


def _grid_loglik(v, grid):
    logv = np.log(v)
    nz = grid != 0.0
    y = np.empty((grid.size, v.size))
    y[nz] = np.expm1(grid[nz, None] * logv[None, :]) / grid[nz, None]
    y[~nz] = logv
    with np.errstate(divide="ignore", invalid="ignore"):
        var = np.var(y, axis=1)
        ll = (grid - 1.0) * logv.sum() - 0.5 * v.size * np.log(var)
    ll[~np.isfinite(ll)] = -np.inf
    return ll


def boxcox(values, grid=LAMBDA_GRID):
    """Maximum-likelihood lambda over ``grid``; returns ``(lam, transformed)``.

    Values must already be strictly positive (shift zeros upstream).
    All-equal input has a flat likelihood and gets lam = 1.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InvalidArgument("boxcox needs at least one value")
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise InvalidArgument("boxcox requires strictly positive values")
    if np.all(v == v[0]):
        return 1.0, boxcox_transform(v, 1.0)
    ll = _grid_loglik(v, np.asarray(grid, dtype=float))
    lam = float(grid[int(np.argmax(ll))])
    return lam, boxcox_transform(v, lam)


@dataclass(frozen=True)
class BoxCoxParams:
    lam: float
    shift: float = 0.0

    def apply(self, values):
        return boxcox_transform(np.asarray(values, dtype=float) + self.shift, self.lam)


def fit_boxcox(values, shift_zeros=True) -> BoxCoxParams:
    v = np.asarray(values, dtype=float)
    shift = 1.0 if shift_zeros and np.any(v <= 0) else 0.0
    lam, _ = boxcox(v + shift)
    return BoxCoxParams(lam, shift)


def _moments(x):
    d = x - x.mean()
    m2 = float(np.mean(d ** 2))
    return m2, float(np.mean(d ** 3)), float(np.mean(d ** 4))


def skewness_z(x) -> float:
    x = np.asarray(x, dtype=float)
    n = x.size
    m2, m3, _ = _moments(x)
    b1 = m3 / m2 ** 1.5
    y = b1 * math.sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)))
    beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / ((n - 2.0) * (n + 5) * (n + 7) * (n + 9))
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    return delta * math.asinh(y / alpha)


def kurtosis_z(x) -> float:
    x = np.asarray(x, dtype=float)
    n = x.size
    m2, _, m4 = _moments(x)
    b2 = m4 / m2 ** 2
    mean = 3.0 * (n - 1) / (n + 1)
    var = 24.0 * n * (n - 2) * (n - 3) / ((n + 1.0) ** 2 * (n + 3) * (n + 5))
    z = (b2 - mean) / math.sqrt(var)
    sqrt_beta1 = (6.0 * (n * n - 5 * n + 2) / ((n + 7.0) * (n + 9))
                  * math.sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2.0) * (n - 3))))
    a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + math.sqrt(1.0 + 4.0 / sqrt_beta1 ** 2))
    term1 = 1.0 - 2.0 / (9.0 * a)
    denom = 1.0 + z * math.sqrt(2.0 / (a - 4.0))
    if denom == 0:
        return math.nan
    term2 = math.copysign(abs((1.0 - 2.0 / a) / denom) ** (1.0 / 3.0), denom)
    return (term1 - term2) / math.sqrt(2.0 / (9.0 * a))


@dataclass(frozen=True)
class NormalityResult:
    statistic: float
    p_value: float
    skew_z: float
    kurt_z: float

    def __iter__(self):
        return iter((self.statistic, self.p_value))


MIN_NORMALITY_N = 20


def normality_test(values) -> NormalityResult:
    """K^2 = z_skew^2 + z_kurt^2, referred to chi-squared with 2 df.

    A constant sample carries no evidence against normality and returns p = 1.
    """
    x = np.asarray(values, dtype=float)
    if x.size < MIN_NORMALITY_N:
        raise UnsupportedSampleSize(f"normality test needs n >= {MIN_NORMALITY_N}, got {x.size}")
    m2, _, _ = _moments(x)
    if m2 <= 1e-300 or np.all(x == x[0]):
        return NormalityResult(0.0, 1.0, 0.0, 0.0)
    zs, zk = skewness_z(x), kurtosis_z(x)
    k2 = zs * zs + zk * zk
    return NormalityResult(k2, float(special.chdtrc(2, k2)), zs, zk)
