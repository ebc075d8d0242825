"""Prior UCP effort models: Karner's fixed rate, Schneider-Winters levels
and Nassif's nonlinear model.

Nassif's published model turns ``prod_sum`` into team productivity with an
expert fuzzy rule base that is not reproduced here. ``NassifParams`` stands
in with a four-level threshold lookup; by default the thresholds are the
training quartiles of ``prod_sum`` and each level's productivity is
calibrated on the training rows that fall in it. This is an approximation
of the cited model, not a reimplementation.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidArgument
from .size import env_values, env_weighted_sum

KARNER_RATE = 20.0
NASSIF_ALPHA = 8.16
NASSIF_BETA = 1.17


class SWLevel(str, Enum):
    FAIR = "fair"
    LOW = "low"
    VERY_LOW = "very_low"


SW_RATES = {SWLevel.FAIR: 20.0, SWLevel.LOW: 28.0, SWLevel.VERY_LOW: 36.0}


@dataclass(frozen=True)
class SWClassification:
    count_low_env16: int
    count_high_env78: int
    total: int
    level: SWLevel
    pdr: float


def _positive_ucp(ucp):
    if not ucp > 0:
        raise InvalidArgument(f"ucp must be positive, got {ucp!r}")


def karner_estimate(ucp: float) -> float:
    _positive_ucp(ucp)
    return KARNER_RATE * ucp


def sw_level_for_total(total: int) -> SWLevel:
    if total <= 2:
        return SWLevel.FAIR
    if total <= 4:
        return SWLevel.LOW
    return SWLevel.VERY_LOW


def sw_classify(e) -> SWClassification:
    v = env_values(e)
    low = sum(1 for r in v[:6] if r < 3)
    high = sum(1 for r in v[6:] if r > 3)
    total = low + high
    level = sw_level_for_total(total)
    return SWClassification(low, high, total, level, SW_RATES[level])


def sw_estimate(e, ucp: float) -> float:
    _positive_ucp(ucp)
    return sw_classify(e).pdr * ucp


@dataclass(frozen=True)
class NassifParams:
    alpha: float = NASSIF_ALPHA
    beta: float = NASSIF_BETA
    # lower prod_sum bound of each level (first is -inf) and its team productivity
    thresholds: Tuple[float, ...] = (-np.inf,)
    levels: Tuple[float, ...] = (1.0,)

    def __post_init__(self):
        t = tuple(float(v) for v in self.thresholds)
        lv = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "levels", lv)
        if len(t) != len(lv) or not lv:
            raise InvalidArgument("nassif thresholds and levels must have equal non-zero length")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise InvalidArgument("nassif thresholds must be strictly increasing")
        if any(not p > 0 for p in lv):
            raise InvalidArgument("nassif productivity levels must be strictly positive")
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidArgument("nassif alpha and beta must be positive")

    @classmethod
    def from_cutpoints(cls, cutpoints: Sequence[float], levels: Sequence[float], alpha=NASSIF_ALPHA, beta=NASSIF_BETA):
        """``cutpoints`` are the len(levels)-1 interior boundaries."""
        return cls(alpha, beta, (-np.inf,) + tuple(cutpoints), tuple(levels))

    def team_productivity(self, prod_sum: float) -> float:
        i = int(np.searchsorted(self.thresholds, prod_sum, side="right")) - 1
        return self.levels[max(i, 0)]

    def level_index(self, prod_sum: float) -> int:
        return max(int(np.searchsorted(self.thresholds, prod_sum, side="right")) - 1, 0)


def calibrate_nassif(env_rows, ucp, effort, alpha=NASSIF_ALPHA, beta=NASSIF_BETA, cutpoints=None) -> NassifParams:
    """Quartile thresholds on training ``prod_sum``; each level's team
    productivity is the median of ``alpha * ucp**beta / effort`` over the
    training rows in that level."""
    s = np.array([env_weighted_sum(r) for r in env_rows], dtype=float)
    ucp = np.asarray(ucp, dtype=float)
    effort = np.asarray(effort, dtype=float)
    implied = alpha * ucp ** beta / effort
    if cutpoints is None:
        cutpoints = np.unique(np.quantile(s, [0.25, 0.5, 0.75])) if len(s) else []
    thresholds = (-np.inf,) + tuple(float(c) for c in cutpoints)
    overall = float(np.median(implied)) if len(implied) else 1.0
    idx = np.searchsorted(thresholds, s, side="right") - 1
    levels = []
    for i in range(len(thresholds)):
        members = implied[idx == i]
        levels.append(float(np.median(members)) if len(members) else overall)
    return NassifParams(alpha, beta, thresholds, tuple(levels))


def nassif_effort(team_productivity: float, ucp: float, alpha=NASSIF_ALPHA, beta=NASSIF_BETA) -> float:
    _positive_ucp(ucp)
    if not team_productivity > 0:
        raise InvalidArgument("team productivity must be positive")
    return alpha / team_productivity * ucp ** beta


def nassif_estimate(e, ucp: float, params: NassifParams = NassifParams()) -> float:
    _positive_ucp(ucp)
    prod = params.team_productivity(env_weighted_sum(e))
    return nassif_effort(prod, ucp, params.alpha, params.beta)
