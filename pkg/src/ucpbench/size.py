"""Use Case Points size arithmetic and project delivery rate.

All functions are pure. Ratings are validated on construction of the
factor containers, so the compute functions can assume well-formed input.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument

TECHNICAL_WEIGHTS = (2.0, 2.0, 1.0, 1.0, 1.0, 0.5, 0.5, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0)
ENVIRONMENTAL_WEIGHTS = (1.5, 0.5, 1.0, 0.5, 1.0, 2.0, -1.0, -1.0)

ACTOR_WEIGHTS = (1, 2, 3)
USE_CASE_WEIGHTS = (5, 10, 15)

TCF_RANGE = (0.6, 1.35)
EF_RANGE = (0.425, 1.7)


class Complexity(str, Enum):
    SIMPLE = "simple"
    AVERAGE = "average"
    COMPLEX = "complex"


class SizeMode(str, Enum):
    FULL = "full"
    NO_EF = "no_ef"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise InvalidArgument(f"unknown size mode {value!r}; expected full or no_ef") from None


def _check_count(name, value):
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise InvalidArgument(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def _check_ratings(values, length, label):
    values = tuple(values)
    if len(values) != length:
        raise InvalidArgument(f"{label} needs exactly {length} ratings, got {len(values)}")
    if all(type(v) is int and 0 <= v <= 5 for v in values):
        return values
    out = []
    for i, v in enumerate(values, start=1):
        if isinstance(v, bool):
            raise InvalidArgument(f"{label}{i} must be an integer rating")
        try:
            iv = int(v)
        except (TypeError, ValueError):
            raise InvalidArgument(f"{label}{i} must be an integer rating, got {v!r}") from None
        if iv != v:
            raise InvalidArgument(f"{label}{i} must be an integer rating, got {v!r}")
        if not 0 <= iv <= 5:
            raise InvalidArgument(f"{label}{i} out of range: {iv} not in 0..5")
        out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class ActorCounts:
    simple: int = 0
    average: int = 0
    complex: int = 0

    def __post_init__(self):
        for name in ("simple", "average", "complex"):
            object.__setattr__(self, name, _check_count(f"actors.{name}", getattr(self, name)))


@dataclass(frozen=True)
class UseCaseCounts:
    simple: int = 0
    average: int = 0
    complex: int = 0

    def __post_init__(self):
        for name in ("simple", "average", "complex"):
            object.__setattr__(self, name, _check_count(f"usecases.{name}", getattr(self, name)))


@dataclass(frozen=True)
class TechnicalFactors:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", _check_ratings(self.values, 13, "tcf"))


@dataclass(frozen=True)
class EnvironmentalFactors:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", _check_ratings(self.values, 8, "env"))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return 8

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self):
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class SizeBreakdown:
    uaw: float
    uucw: float
    uucp: float
    tcf: float
    ef: Optional[float]
    ucp: float
    mode: SizeMode = SizeMode.FULL

    def as_dict(self):
        return {
            "uaw": self.uaw,
            "uucw": self.uucw,
            "uucp": self.uucp,
            "tcf": self.tcf,
            "ef": self.ef,
            "ucp": self.ucp,
            "mode": self.mode.value,
        }


def as_env(e) -> EnvironmentalFactors:
    return e if isinstance(e, EnvironmentalFactors) else EnvironmentalFactors(tuple(e))


def classify_use_case(transaction_count: int) -> Complexity:
    n = _check_count("transaction_count", transaction_count)
    if n <= 3:
        return Complexity.SIMPLE
    if n <= 7:
        return Complexity.AVERAGE
    return Complexity.COMPLEX


def compute_uaw(a: ActorCounts) -> float:
    return float(ACTOR_WEIGHTS[0] * a.simple + ACTOR_WEIGHTS[1] * a.average + ACTOR_WEIGHTS[2] * a.complex)


def compute_uucw(u: UseCaseCounts) -> float:
    return float(
        USE_CASE_WEIGHTS[0] * u.simple + USE_CASE_WEIGHTS[1] * u.average + USE_CASE_WEIGHTS[2] * u.complex
    )


def compute_tcf(t) -> float:
    values = t.values if isinstance(t, TechnicalFactors) else _check_ratings(t, 13, "tcf")
    return 0.6 + 0.01 * sum(f * w for f, w in zip(values, TECHNICAL_WEIGHTS))


def env_values(e) -> tuple:
    """Validated rating tuple without building an EnvironmentalFactors."""
    return e.values if isinstance(e, EnvironmentalFactors) else _check_ratings(e, 8, "env")


def env_weighted_sum(e) -> float:
    """Weighted environmental sum, also used as Nassif's ``prod_sum``."""
    return sum(v * w for v, w in zip(env_values(e), ENVIRONMENTAL_WEIGHTS))


def compute_ef(e) -> float:
    return 1.4 - 0.03 * env_weighted_sum(e)


def compute_ucp(
    a: ActorCounts,
    u: UseCaseCounts,
    t,
    e=None,
    mode=SizeMode.FULL,
) -> SizeBreakdown:
    """Chain actor/use-case weights through TCF (and EF in full mode) to UCP."""
    mode = SizeMode.parse(mode)
    uaw = compute_uaw(a)
    uucw = compute_uucw(u)
    uucp = uaw + uucw
    tcf = compute_tcf(t)
    if mode is SizeMode.FULL:
        if e is None:
            raise InvalidArgument("environmental factors are required in full mode")
        ef = compute_ef(e)
        ucp = uucp * tcf * ef
    else:
        ef = None
        ucp = uucp * tcf
    return SizeBreakdown(uaw=uaw, uucw=uucw, uucp=uucp, tcf=tcf, ef=ef, ucp=ucp, mode=mode)


def pdr(effort: float, ucp: float) -> float:
    """Project delivery rate in person-hours per UCP."""
    if not effort > 0:
        raise InvalidArgument(f"effort must be positive, got {effort!r}")
    if not ucp > 0:
        raise InvalidArgument(f"ucp must be positive, got {ucp!r}")
    return effort / ucp


def parse_vector(text: str, length: Optional[int] = None, label: str = "vector") -> tuple:
    """Parse ``"1,2,3"`` into ints; used by the CLI."""
    parts = [p.strip() for p in str(text).split(",") if p.strip() != ""]
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise InvalidArgument(f"{label}: expected comma-separated integers, got {text!r}") from None
    if length is not None and len(values) != length:
        raise InvalidArgument(f"{label}: expected {length} values, got {len(values)}")
    return values


def ratings_array(rows: Sequence) -> np.ndarray:
    return np.asarray([as_env(r).values for r in rows], dtype=float)
