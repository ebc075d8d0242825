"""How closely the synthetic generator reproduces each profile's productivity
mean and standard deviation, averaged over a range of seeds."""
import argparse

import numpy as np

from ucpbench.dataset import PROFILES, generate_synthetic


def summarize(profile, seeds):
    keys = ("ucp", "effort", "productivity")
    stats = {k: [] for k in keys}
    for s in seeds:
        d = generate_synthetic(profile, s)
        for k in keys:
            v = getattr(d, k)
            stats[k].append((v.mean(), v.std(ddof=1)))
    return {k: np.mean(np.array(v), axis=0) for k, v in stats.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    seeds = range(args.seeds)
    print(f"{'profile':8s} {'variable':13s} {'mean':>10s} {'target':>10s} {'sd':>10s} {'target':>10s}")
    for name, profile in PROFILES.items():
        got = summarize(profile, seeds)
        for k in ("ucp", "effort", "productivity"):
            t = getattr(profile, k)
            m, s = got[k]
            print(f"{name:8s} {k:13s} {m:10.2f} {t.mean:10.2f} {s:10.2f} {t.stdev:10.2f}")


if __name__ == "__main__":
    main()
