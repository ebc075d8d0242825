"""Command-line front end.

Exit codes: 0 on success, 1 on usage or validation errors, 2 on data
errors (unreadable or malformed dataset/report files, mismatched folds).
"""
import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import __version__
from .config import build_config, load_config, resolve_seed
from .dataset import atomic_write_text, describe, dumps_dataset, generate_synthetic, get_profile, load_dataset
from .errors import InvalidArgument, MetricError, ParseError, UCPBenchError, ValidationError
from .evaluation import EvaluationReport, effect_category, evaluate
from .comparison import compare_reports
from .models import MODEL_NAMES, make_estimator
from .size import ActorCounts, SizeMode, UseCaseCounts, compute_ucp, parse_vector

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; we reserve 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _vector(text, length, label):
    """Parse ``1,2,3`` or the repeat shorthand ``0x13`` (also ``0×13``)."""
    s = str(text).strip().replace("×", "x")
    if "," not in s and "x" in s:
        value, _, count = s.partition("x")
        try:
            s = ",".join([str(int(value))] * int(count))
        except ValueError:
            raise InvalidArgument(f"{label}: bad repeat shorthand {text!r}") from None
    return parse_vector(s, length, label)


def _fmt(x, scale=1.0):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    return f"{x * scale:.2f}"


def _table(headers, rows):
    cells = [headers] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _clean(obj):
    """Replace non-finite floats with None so the JSON stays standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _emit(text, output=None):
    if output:
        atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _load(path):
    try:
        return load_dataset(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    except (ParseError, ValidationError) as exc:
        raise DataError(f"{path}: {exc}") from None


# --------------------------------------------------------------------------
# compute-size

def cmd_compute_size(args):
    mode = SizeMode.parse(args.mode)
    actors = ActorCounts(*_vector(args.actors, 3, "actors"))
    usecases = UseCaseCounts(*_vector(args.usecases, 3, "usecases"))
    tcf = _vector(args.tcf, 13, "tcf")
    if mode is SizeMode.FULL and args.ef is None:
        raise UsageError("--ef is required with --mode full")
    ef = _vector(args.ef, 8, "ef") if args.ef is not None else None
    b = compute_ucp(actors, usecases, tcf, ef, mode)
    if args.format == "json":
        _emit(_dump_json(b.as_dict()))
    else:
        rows = [(k, _fmt(v) if isinstance(v, float) else (v if v is not None else "-")) for k, v in b.as_dict().items()]
        _emit(_table(["quantity", "value"], rows) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# estimate

def cmd_estimate(args):
    env = _vector(args.env, 8, "env")
    if not args.ucp > 0:
        raise UsageError(f"--ucp must be positive, got {args.ucp}")
    if args.model not in MODEL_NAMES:
        raise UsageError(f"unknown model {args.model!r}; catalog: {', '.join(MODEL_NAMES)}")
    file_values = load_config(args.config) if args.config else {}
    cfg = build_config(file_values, models=(args.model,))
    cfg.validate(check_files=False)
    train = _load(args.train)
    seed = resolve_seed(args.seed, file_values)
    est = make_estimator(args.model, seed, **cfg.model_options())
    try:
        est.fit(train, est.preselect(train))
    except (UCPBenchError, ArithmeticError) as exc:
        raise DataError(f"cannot fit {args.model} on {args.train}: {exc}") from None
    effort = est.estimate_effort(env, args.ucp)
    out = {"model": args.model, "productivity": effort / args.ucp, "ucp": args.ucp, "effort": effort}
    if args.format == "json":
        _emit(_dump_json(out))
    else:
        _emit(_table(["model", "productivity", "ucp", "effort"],
                     [(args.model, _fmt(out["productivity"]), _fmt(args.ucp), _fmt(effort))]) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# evaluate

def _evaluate_one(job):
    path, model, seed, runs, strict, sp0_mode, options = job
    data = load_dataset(path)
    return evaluate(data, model, seed, runs, strict, sp0_mode, **options).to_dict()


def _evaluation_table(reports):
    rows = []
    for r in reports:
        a = r["aggregates"]
        cat = effect_category(a["delta"]) if a["delta"] is not None else "-"
        rows.append((r["dataset"], r["model"], _fmt(a["mae"]), _fmt(a["mbre"], 100), _fmt(a["mibre"], 100),
                     _fmt(a["sa"], 100), _fmt(a["delta"]), cat))
    return _table(["dataset", "model", "MAE", "MBRE%", "MIBRE%", "SA%", "delta", "effect"], rows)


def cmd_evaluate(args):
    file_values = load_config(args.config) if args.config else {}
    overrides = {
        "mc_runs": args.runs,
        "models": tuple(m.strip() for m in args.models.split(",") if m.strip()) if args.models else None,
        "datasets": tuple(args.dataset) if args.dataset else None,
        "strict_fold_k": True if args.strict_fold_k else None,
        "output": args.output,
        "format": args.format,
        "p_enter": args.p_enter,
        "p_remove": args.p_remove,
    }
    cfg = build_config(file_values, **overrides)
    cfg = replace(cfg, seed=resolve_seed(args.seed, file_values))
    if not cfg.datasets:
        raise UsageError("no dataset given (use --dataset or the datasets config key)")
    cfg.validate()
    datasets = [_load(p) for p in cfg.datasets]
    options = cfg.model_options()
    jobs = [(p, m, cfg.seed, cfg.mc_runs, cfg.strict_fold_k, cfg.sp0_mode, options)
            for p in cfg.datasets for m in cfg.models]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_evaluate_one, jobs))
    else:
        reports = [evaluate(d, m, cfg.seed, cfg.mc_runs, cfg.strict_fold_k, cfg.sp0_mode, **options).to_dict()
                   for d in datasets for m in cfg.models]
    bundle = _clean({
        "seed": cfg.seed,
        "mc_runs": cfg.mc_runs,
        "strict_fold_k": cfg.strict_fold_k,
        "datasets": [d.name for d in datasets],
        "reports": reports,
    })
    text = _dump_json(bundle)
    if cfg.output:
        atomic_write_text(cfg.output, text)
    if cfg.format == "json":
        if not cfg.output:
            sys.stdout.write(text)
    else:
        sys.stdout.write(_evaluation_table(bundle["reports"]) + "\n")
        for r in bundle["reports"]:
            for w in r["warnings"]:
                sys.stdout.write(f"warning [{r['dataset']}/{r['model']}]: {w}\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# compare

def _read_reports(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from None
    items = doc.get("reports", [doc]) if isinstance(doc, dict) else doc
    try:
        return [EvaluationReport.from_dict(d) for d in items]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not an evaluation report: {exc}") from None


def _sk_rows(res):
    sk = res.scott_knott
    order = sorted(res.models, key=lambda m: (sk.rank_of(m), sk.means[m]))
    return [(sk.rank_of(m), m, _fmt(sk.means[m])) for m in order]


def cmd_compare(args):
    reports = []
    for p in args.reports:
        reports.extend(_read_reports(p))
    by_dataset = {}
    for r in reports:
        by_dataset.setdefault(r.dataset, []).append(r)
    results = []
    for name, group in by_dataset.items():
        if len(group) < 2:
            raise UsageError(f"dataset {name!r} has only one report; need at least two to compare")
        ids = group[0].ids
        for r in group[1:]:
            if r.ids != ids:
                raise DataError(f"fold ids of {r.model!r} do not match {group[0].model!r} on {name!r}")
        results.append(compare_reports(group, alpha=args.alpha, gate=args.gate))
    doc = _clean({"comparisons": [r.to_dict() for r in results]})
    text = _dump_json(doc)
    if args.output:
        atomic_write_text(args.output, text)
    if args.format == "json":
        if not args.output:
            sys.stdout.write(text)
        return EXIT_OK
    for res in results:
        sys.stdout.write(f"== {res.dataset}\n\nWilcoxon rank-sum p-values (absolute errors)\n")
        rows = [[res.models[i]] + [_fmt(res.p_matrix[i][j]) for j in range(i)] + [""] * (len(res.models) - i)
                for i in range(len(res.models))]
        sys.stdout.write(_table(["model"] + res.models, rows) + "\n\nScott-Knott groups\n")
        sys.stdout.write(_table(["rank", "model", "mean"], _sk_rows(res)) + "\n\nwin-tie-loss\n")
        wrows = [(m, t.win, t.tie, t.loss) for m, t in res.wtl.items()]
        sys.stdout.write(_table(["model", "win", "tie", "loss"], wrows) + "\n\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# generate / describe

def cmd_generate(args):
    profile = get_profile(args.profile)
    seed = resolve_seed(args.seed, {})
    data = generate_synthetic(profile, seed, args.n)
    _emit(dumps_dataset(data), args.out)
    return EXIT_OK


def cmd_describe(args):
    data = _load(args.dataset)
    stats = describe(data)
    if args.format == "json":
        _emit(_dump_json({"dataset": data.name, "n": len(data), **stats}))
    else:
        keys = ("mean", "stdev", "min", "median", "max", "skewness", "kurtosis")
        rows = [[col] + [_fmt(stats[col][k]) for k in keys] for col in ("ucp", "effort", "productivity")]
        _emit(f"{data.name} (n={len(data)})\n" + _table(["variable"] + list(keys), rows) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="ucpbench", description="Use Case Points sizing, productivity models and benchmarking.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("compute-size", help="compute UAW, UUCW, TCF, EF and UCP")
    s.add_argument("--actors", required=True, help="simple,average,complex actor counts")
    s.add_argument("--usecases", required=True, help="simple,average,complex use-case counts")
    s.add_argument("--tcf", required=True, help="13 technical ratings 0..5 (or shorthand 0x13)")
    s.add_argument("--ef", help="8 environmental ratings 0..5 (or shorthand 3x8)")
    s.add_argument("--mode", default="full", choices=["full", "no-ef", "no_ef"])
    s.add_argument("--format", default="table", choices=["table", "json"])
    s.set_defaults(func=cmd_compute_size)

    s = sub.add_parser("estimate", help="fit a model on a training file and estimate one project")
    s.add_argument("--model", required=True)
    s.add_argument("--train", required=True)
    s.add_argument("--env", required=True, help="8 environmental ratings 0..5")
    s.add_argument("--ucp", required=True, type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--config")
    s.add_argument("--format", default="table", choices=["table", "json"])
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("evaluate", help="leave-one-out evaluation of models on datasets")
    s.add_argument("--config")
    s.add_argument("--dataset", action="append", help="dataset file (repeatable)")
    s.add_argument("--models", help="comma-separated model names")
    s.add_argument("--seed", type=int)
    s.add_argument("--runs", type=int, help="Monte Carlo runs of the random-guess baseline")
    s.add_argument("--p-enter", type=float)
    s.add_argument("--p-remove", type=float)
    s.add_argument("--strict-fold-k", action="store_true", help="re-select cluster counts inside each fold")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--output")
    s.add_argument("--format", choices=["table", "json"])
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("compare", help="statistical comparison of evaluation reports")
    s.add_argument("reports", nargs="+")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--gate", choices=["ae", "measure"], default="ae")
    s.add_argument("--output")
    s.add_argument("--format", default="table", choices=["table", "json"])
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("generate", help="write a synthetic dataset from a profile")
    s.add_argument("--profile", required=True, help="ds1, ds2, ds3 or a profile JSON file")
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("describe", help="descriptive statistics of a dataset")
    s.add_argument("dataset")
    s.add_argument("--format", default="table", choices=["table", "json"])
    s.set_defaults(func=cmd_describe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DataError, MetricError) as exc:
        print(f"ucpbench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, InvalidArgument) as exc:
        print(f"ucpbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ucpbench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
