"""Seed sweep over a synthetic profile: LOOCV every model, then tally how
often each proposed model beats the Karner baseline and its win-tie-loss
record against the two fixed-rate baselines.

    python3 scripts/run_synthetic_benchmark.py --profile ds3 --seeds 10 --out sweep.json
"""
import argparse
import json
import time

import numpy as np

from ucpbench.comparison import compare_reports
from ucpbench.dataset import atomic_write_text, generate_synthetic, get_profile
from ucpbench.evaluation import evaluate
from ucpbench.models import MODEL_NAMES

PROPOSED = ("m1", "m2", "m3", "m4")


def run_seed(profile, seed, models, runs):
    data = generate_synthetic(profile, seed)
    t0 = time.perf_counter()
    reports = [evaluate(data, m, seed, runs) for m in models]
    elapsed = time.perf_counter() - t0
    cmp = compare_reports(reports)
    return data, reports, cmp, elapsed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--profile", default="ds3")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--models", default=",".join(MODEL_NAMES))
    ap.add_argument("--out")
    args = ap.parse_args()

    profile = get_profile(args.profile)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    rows = []
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        data, reports, cmp, elapsed = run_seed(profile, seed, models, args.runs)
        by = {r.model: r for r in reports}
        row = {
            "seed": seed,
            "seconds": elapsed,
            "mae": {m: r.mae for m, r in by.items()},
            "sa": {m: r.sa for m, r in by.items()},
            "scott_knott": {m: cmp.scott_knott.rank_of(m) for m in by},
            "wtl": {m: [t.win, t.tie, t.loss] for m, t in cmp.wtl.items()},
        }
        rows.append(row)
        line = "  ".join(f"{m}={by[m].mae:8.1f}" for m in models)
        print(f"seed {seed:3d} ({elapsed:5.1f}s)  {line}")

    print()
    if "karner" in models:
        for m in [m for m in PROPOSED if m in models]:
            beat = sum(r["mae"][m] < r["mae"]["karner"] for r in rows)
            sa = sum(r["sa"][m] > 0.5 for r in rows)
            print(f"{m}: MAE below karner in {beat}/{len(rows)} seeds, SA > 50% in {sa}/{len(rows)}")
    med = {m: float(np.median([r["mae"][m] for r in rows])) for m in models}
    print("median MAE:", ", ".join(f"{m} {v:.1f}" for m, v in med.items()))
    if args.out:
        atomic_write_text(args.out, json.dumps({"profile": profile.name, "runs": args.runs, "seeds": rows}, indent=2))


if __name__ == "__main__":
    main()
