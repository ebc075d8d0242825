"""Project records, the CSV dataset format, descriptive statistics and a
synthetic generator calibrated to published dataset profiles."""
import csv
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import InvalidArgument, ParseError, ValidationError
from .seeding import rng_for
from .size import ENVIRONMENTAL_WEIGHTS, EnvironmentalFactors, as_env

log = logging.getLogger(__name__)

ENV_COLUMNS = tuple(f"env{i}" for i in range(1, 9))
HEADER = ("id",) + ENV_COLUMNS + ("ucp", "effort")
OPTIONAL_COLUMN = "productivity"
PRODUCTIVITY_RTOL = 1e-9


@dataclass(frozen=True)
class ProjectRecord:
    id: str
    env: EnvironmentalFactors
    ucp: float
    effort: float

    def __post_init__(self):
        object.__setattr__(self, "env", as_env(self.env))
        if not (self.ucp > 0 and math.isfinite(self.ucp)):
            raise ValidationError(f"ucp must be positive, got {self.ucp!r}", rule="ucp>0")
        if not (self.effort > 0 and math.isfinite(self.effort)):
            raise ValidationError(f"effort must be positive, got {self.effort!r}", rule="effort>0")

    @property
    def productivity(self) -> float:
        return self.effort / self.ucp


@dataclass(frozen=True)
class Dataset:
    name: str
    records: tuple = ()

    def __post_init__(self):
        recs = tuple(self.records)
        object.__setattr__(self, "records", recs)
        seen = set()
        for r in recs:
            if r.id in seen:
                raise ValidationError(f"duplicate id {r.id!r}", rule="unique-id")
            seen.add(r.id)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def ids(self):
        return [r.id for r in self.records]

    @property
    def env(self) -> np.ndarray:
        return np.asarray([r.env.values for r in self.records], dtype=float).reshape(-1, 8)

    @property
    def ucp(self) -> np.ndarray:
        return np.asarray([r.ucp for r in self.records], dtype=float)

    @property
    def effort(self) -> np.ndarray:
        return np.asarray([r.effort for r in self.records], dtype=float)

    @property
    def productivity(self) -> np.ndarray:
        return np.asarray([r.productivity for r in self.records], dtype=float)

    def without(self, index: int) -> "Dataset":
        recs = self.records[:index] + self.records[index + 1:]
        return Dataset(self.name, recs)

    def subset(self, indices) -> "Dataset":
        return Dataset(self.name, tuple(self.records[i] for i in indices))


# --------------------------------------------------------------------------
# file format

def _parse_number(text, row, column):
    s = text.strip()
    if s == "" or "," in s:
        raise ParseError(f"expected a decimal number, got {text!r}", row=row, column=column)
    try:
        value = float(s)
    except ValueError:
        raise ParseError(f"expected a decimal number, got {text!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite number {text!r}", row=row, column=column)
    return value


def _parse_rating(text, row, column):
    s = text.strip()
    try:
        value = int(s)
    except ValueError:
        raise ParseError(f"expected an integer rating, got {text!r}", row=row, column=column) from None
    if not 0 <= value <= 5:
        raise ValidationError(f"{column} out of range: {value} not in 0..5", row=row, rule=f"{column} range")
    return value


def parse_dataset(text: str, name: str = "dataset") -> Dataset:
    if text.startswith("﻿"):
        text = text[1:]
    lines = text.replace("\r\n", "\n").split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty file: missing header", row=1)
    header = tuple(h.strip() for h in lines[0].split(","))
    has_prod = header == HEADER + (OPTIONAL_COLUMN,)
    if header != HEADER and not has_prod:
        raise ParseError(f"header must be {','.join(HEADER)!r}, got {lines[0]!r}", row=1)
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.strip() == "":
            raise ParseError("blank line", row=lineno)
        cells = next(csv.reader([line]))
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", row=lineno)
        rid = cells[0].strip()
        if not rid:
            raise ParseError("empty id", row=lineno, column="id")
        env = tuple(_parse_rating(cells[i + 1], lineno, ENV_COLUMNS[i]) for i in range(8))
        ucp = _parse_number(cells[9], lineno, "ucp")
        effort = _parse_number(cells[10], lineno, "effort")
        if ucp <= 0:
            raise ValidationError(f"ucp must be positive, got {ucp!r}", row=lineno, rule="ucp>0")
        if effort <= 0:
            raise ValidationError(f"effort must be positive, got {effort!r}", row=lineno, rule="effort>0")
        rec = ProjectRecord(rid, EnvironmentalFactors(env), ucp, effort)
        if has_prod:
            given = _parse_number(cells[11], lineno, OPTIONAL_COLUMN)
            if not math.isclose(given, rec.productivity, rel_tol=PRODUCTIVITY_RTOL):
                raise ValidationError(
                    f"productivity {given!r} inconsistent with effort/ucp = {rec.productivity!r}",
                    row=lineno, rule="productivity=effort/ucp",
                )
        records.append(rec)
    try:
        return Dataset(name, tuple(records))
    except ValidationError as exc:
        raise ValidationError(str(exc), rule=exc.rule) from None


def load_dataset(path, name: Optional[str] = None) -> Dataset:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    return parse_dataset(text, name or path.stem)


def dumps_dataset(d: Dataset) -> str:
    buf = io.StringIO()
    buf.write(",".join(HEADER) + "\n")
    for r in d.records:
        cells = [r.id] + [str(v) for v in r.env.values] + [repr(float(r.ucp)), repr(float(r.effort))]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def atomic_write_text(path, text: str):
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_dataset(d: Dataset, path):
    atomic_write_text(path, dumps_dataset(d))


# --------------------------------------------------------------------------
# descriptive statistics

def describe_values(values) -> Dict[str, float]:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise InvalidArgument("cannot describe an empty sample")
    mean = float(np.mean(x))
    dev = x - mean
    m2 = float(np.mean(dev ** 2))
    stdev = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    degenerate = m2 <= 1e-24 * max(1.0, mean * mean)
    if degenerate:
        skew = kurt = 0.0
        stdev = 0.0
    else:
        skew = float(np.mean(dev ** 3)) / m2 ** 1.5
        kurt = float(np.mean(dev ** 4)) / m2 ** 2
    return {
        "n": int(x.size),
        "mean": mean,
        "stdev": stdev,
        "min": float(np.min(x)),
        "median": float(np.median(x)),
        "max": float(np.max(x)),
        "skewness": skew,
        "kurtosis": kurt,
        "degenerate": bool(degenerate),
    }


def describe(d: Dataset) -> Dict[str, Dict[str, float]]:
    if len(d) == 0:
        raise InvalidArgument("cannot describe an empty dataset")
    return {
        "ucp": describe_values(d.ucp),
        "effort": describe_values(d.effort),
        "productivity": describe_values(d.productivity),
    }


# --------------------------------------------------------------------------
# profiles and synthetic generation

@dataclass(frozen=True)
class Target:
    mean: float
    stdev: float
    min: float
    max: float

    def check(self, label):
        if not all(math.isfinite(v) for v in (self.mean, self.stdev, self.min, self.max)):
            raise InvalidArgument(f"{label}: non-finite target")
        if self.max < self.min:
            raise InvalidArgument(f"{label}: max {self.max} < min {self.min}")
        if not self.min <= self.mean <= self.max:
            raise InvalidArgument(f"{label}: mean {self.mean} outside [{self.min}, {self.max}]")
        if self.stdev < 0:
            raise InvalidArgument(f"{label}: negative stdev")


@dataclass(frozen=True)
class DatasetProfile:
    name: str
    n: int
    ucp: Target
    effort: Target
    productivity: Target
    # share of productivity variance explained by a linear fit on env factors
    coupling_r2: float = 0.6
    # a composite profile is generated as the merge of these named profiles;
    # its own targets then describe the merged result
    components: tuple = ()

    def check(self):
        if self.n < 1:
            raise InvalidArgument("profile n must be >= 1")
        for label in ("ucp", "effort", "productivity"):
            getattr(self, label).check(f"{self.name}.{label}")
        if self.ucp.min <= 0 or self.productivity.min <= 0:
            raise InvalidArgument(f"{self.name}: ucp and productivity bounds must be positive")
        if not 0.0 <= self.coupling_r2 <= 1.0:
            raise InvalidArgument(f"{self.name}: coupling_r2 must lie in [0, 1]")
        for c in self.components:
            if c not in PROFILES or PROFILES[c].components:
                raise InvalidArgument(f"{self.name}: component {c!r} must be a simple built-in profile")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                name=str(data.get("name", "custom")),
                n=int(data["n"]),
                ucp=Target(**data["ucp"]),
                effort=Target(**data["effort"]),
                productivity=Target(**data["productivity"]),
                coupling_r2=float(data.get("coupling_r2", 0.6)),
                components=tuple(data.get("components", ())),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidArgument(f"malformed profile: {exc}") from None


PROFILES = {
    "ds1": DatasetProfile(
        "ds1", 45,
        ucp=Target(739.3, 1563.9, 33, 7027),
        effort=Target(20573.5, 47326.9, 570, 224890),
        productivity=Target(24.1, 5.1, 14, 33),
    ),
    "ds2": DatasetProfile(
        "ds2", 65,
        ucp=Target(82.6, 20.7, 40.0, 149.0),
        effort=Target(1672.4, 414.3, 696.0, 2444.0),
        productivity=Target(20.8, 4.8, 11.0, 32.0),
    ),
    "ds3": DatasetProfile(
        "ds3", 110,
        ucp=Target(351.3, 1045.3, 33.0, 7027.0),
        effort=Target(9404.7, 31486.6, 570.0, 224890.0),
        productivity=Target(22.1, 5.2, 11.0, 33.0),
        components=("ds1", "ds2"),
    ),
}

# env rating marginal: roughly uniform over 0..5, slightly peaked in the middle
ENV_RATING_PROBS = np.array([0.12, 0.16, 0.22, 0.22, 0.16, 0.12])


def get_profile(name_or_path) -> DatasetProfile:
    key = str(name_or_path).lower()
    if key in PROFILES:
        return PROFILES[key]
    path = Path(name_or_path)
    if path.is_file():
        with open(path, encoding="utf-8") as fh:
            return DatasetProfile.from_dict(json.load(fh))
    raise InvalidArgument(f"unknown profile {name_or_path!r}; built-ins: {', '.join(PROFILES)}")


def _fit_clipped(latent, target: Target, iterations=50):
    """Affine-map ``latent`` and clip so the clipped sample hits the target
    mean and stdev as closely as the bounds allow."""
    if latent.size < 2 or target.stdev == 0 or target.min == target.max:
        return np.clip(np.full_like(latent, target.mean), target.min, target.max)
    z = (latent - latent.mean()) / latent.std(ddof=1)
    loc, scale = target.mean, target.stdev
    y = np.clip(loc + scale * z, target.min, target.max)
    for _ in range(iterations):
        sd = y.std(ddof=1)
        if sd <= 0:
            break
        loc += target.mean - y.mean()
        scale *= target.stdev / sd
        y = np.clip(loc + scale * z, target.min, target.max)
    return y


def generate_synthetic(profile: DatasetProfile, seed: int, n: Optional[int] = None) -> Dataset:
    """Draw a dataset whose outcome columns follow ``profile``.

    Productivity falls linearly with the weighted environmental sum (the
    quantity inside EF), mixed with truncated-normal noise so that the
    linear R^2 is about ``profile.coupling_r2`` before clipping.
    UCP is log-normal with the profile's mean and stdev, clipped to bounds.
    """
    profile.check()
    if profile.components:
        if n is not None and int(n) != profile.n:
            raise InvalidArgument(f"composite profile {profile.name!r} has a fixed size of {profile.n}")
        parts = [generate_synthetic(PROFILES[c], seed) for c in profile.components]
        out = parts[0]
        for part in parts[1:]:
            out = merge(out, part, name=profile.name)
        return out
    n = profile.n if n is None else int(n)
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    env_rng = rng_for(seed, f"{profile.name}:env")
    noise_rng = rng_for(seed, f"{profile.name}:noise")
    ucp_rng = rng_for(seed, f"{profile.name}:ucp")

    env = env_rng.choice(6, size=(n, 8), p=ENV_RATING_PROBS)
    signal = env @ np.asarray(ENVIRONMENTAL_WEIGHTS)
    sd = signal.std()
    signal_z = (signal - signal.mean()) / sd if sd > 0 else np.zeros(n)
    noise = stats.truncnorm.rvs(-3.0, 3.0, size=n, random_state=noise_rng)
    noise = noise / stats.truncnorm.std(-3.0, 3.0)
    rho = math.sqrt(profile.coupling_r2)
    latent = -rho * signal_z + math.sqrt(1.0 - profile.coupling_r2) * noise
    productivity = _fit_clipped(latent, profile.productivity)

    u = profile.ucp
    if u.stdev > 0 and u.mean > 0:
        sigma2 = math.log1p((u.stdev / u.mean) ** 2)
        mu = math.log(u.mean) - sigma2 / 2
        ucp = ucp_rng.lognormal(mu, math.sqrt(sigma2), size=n)
    else:
        ucp = np.full(n, u.mean)
    ucp = np.clip(ucp, u.min, u.max)
    # keep effort = productivity * ucp inside the effort bounds as well
    lo = np.maximum(u.min, profile.effort.min / productivity)
    hi = np.minimum(u.max, profile.effort.max / productivity)
    feasible = lo <= hi
    if not feasible.all():
        log.warning("%s: %d rows cannot meet every bound; effort bounds relaxed", profile.name, (~feasible).sum())
    ucp = np.where(feasible, np.clip(ucp, lo, np.where(feasible, hi, lo)), ucp)

    width = max(3, len(str(n)))
    records = tuple(
        ProjectRecord(
            f"p{i + 1:0{width}d}",
            EnvironmentalFactors(tuple(int(v) for v in env[i])),
            float(ucp[i]),
            float(productivity[i] * ucp[i]),
        )
        for i in range(n)
    )
    return Dataset(profile.name, records)


def merge(a: Dataset, b: Dataset, name: Optional[str] = None) -> Dataset:
    """Concatenate two datasets, prefixing ids with their source name."""
    if len(b) == 0:
        return a if name is None else Dataset(name, a.records)
    if len(a) == 0:
        return b if name is None else Dataset(name, b.records)

    def prefixed(d):
        out = []
        for r in d.records:
            rid = r.id if r.id.startswith(f"{d.name}:") else f"{d.name}:{r.id}"
            out.append(ProjectRecord(rid, r.env, r.ucp, r.effort))
        return out

    return Dataset(name or f"{a.name}+{b.name}", tuple(prefixed(a) + prefixed(b)))
