"""Run configuration and its key/value file format.

A config file holds one ``key = value`` pair per line; ``#`` starts a
comment. List values are comma separated. Recognised keys are the fields
of :class:`RunConfig`.
"""
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Tuple

from .baselines import NassifParams
from .errors import InvalidArgument
from .models import MODEL_NAMES

DEFAULT_SEED = 42
SEED_ENV_VAR = "UCPBENCH_SEED"


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    mc_runs: int = 1000
    models: Tuple[str, ...] = MODEL_NAMES
    datasets: Tuple[str, ...] = ()
    nassif_alpha: float = 8.16
    nassif_beta: float = 1.17
    nassif_cutpoints: Optional[Tuple[float, ...]] = None
    nassif_levels: Optional[Tuple[float, ...]] = None
    p_enter: float = 0.05
    p_remove: float = 0.10
    strict_fold_k: bool = False
    sp0_mode: str = "pooled"
    wtl_gate: str = "ae"
    output: Optional[str] = None
    format: str = "table"

    def validate(self, check_files=True):
        unknown = [m for m in self.models if m not in MODEL_NAMES]
        if unknown:
            raise InvalidArgument(f"unknown model(s) {', '.join(unknown)}; catalog: {', '.join(MODEL_NAMES)}")
        if not self.models:
            raise InvalidArgument("no models selected")
        if self.mc_runs < 1:
            raise InvalidArgument("mc_runs must be >= 1")
        if not 0 < self.p_enter <= self.p_remove < 1:
            raise InvalidArgument("need 0 < p_enter <= p_remove < 1")
        if self.format not in ("table", "json"):
            raise InvalidArgument(f"format must be table or json, got {self.format!r}")
        if self.sp0_mode not in ("pooled", "run"):
            raise InvalidArgument(f"sp0_mode must be pooled or run, got {self.sp0_mode!r}")
        if self.wtl_gate not in ("ae", "measure"):
            raise InvalidArgument(f"wtl_gate must be ae or measure, got {self.wtl_gate!r}")
        if self.nassif_levels is not None:
            cuts = self.nassif_cutpoints or ()
            if len(cuts) != len(self.nassif_levels) - 1:
                raise InvalidArgument("nassif_levels needs exactly one more entry than nassif_cutpoints")
            self.nassif_params()
        if check_files:
            missing = [p for p in self.datasets if not Path(p).is_file()]
            if missing:
                raise InvalidArgument(f"dataset file(s) not found: {', '.join(missing)}")
        return self

    def nassif_params(self) -> Optional[NassifParams]:
        if self.nassif_levels is None:
            return None
        return NassifParams.from_cutpoints(self.nassif_cutpoints or (), self.nassif_levels,
                                           self.nassif_alpha, self.nassif_beta)

    def model_options(self) -> dict:
        return {
            "nassif_params": self.nassif_params(),
            "nassif_alpha": self.nassif_alpha,
            "nassif_beta": self.nassif_beta,
            "nassif_cutpoints": self.nassif_cutpoints,
            "p_enter": self.p_enter,
            "p_remove": self.p_remove,
        }


def _parse_bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _split(s):
    return tuple(p.strip() for p in s.split(",") if p.strip())


_PARSERS = {
    "seed": int,
    "mc_runs": int,
    "models": _split,
    "datasets": _split,
    "nassif_alpha": float,
    "nassif_beta": float,
    "nassif_cutpoints": lambda s: tuple(float(v) for v in _split(s)),
    "nassif_levels": lambda s: tuple(float(v) for v in _split(s)),
    "p_enter": float,
    "p_remove": float,
    "strict_fold_k": _parse_bool,
    "sp0_mode": str.strip,
    "wtl_gate": str.strip,
    "output": str.strip,
    "format": str.strip,
}


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"config line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _PARSERS:
            raise InvalidArgument(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise InvalidArgument(f"config line {lineno}: bad value for {key}: {exc}") from None
    return values


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidArgument(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


def resolve_seed(cli_seed: Optional[int], file_values: dict) -> int:
    """``--seed`` wins, then the config file, then $UCPBENCH_SEED, then 42."""
    if cli_seed is not None:
        return int(cli_seed)
    if "seed" in file_values:
        return int(file_values["seed"])
    env = os.environ.get(SEED_ENV_VAR)
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError:
            raise InvalidArgument(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def build_config(file_values: dict, **overrides) -> RunConfig:
    cfg = RunConfig(**{k: v for k, v in file_values.items() if k != "seed"})
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **cleaned)
