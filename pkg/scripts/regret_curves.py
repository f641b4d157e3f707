"""Mean regret of explore-then-commit against the horizon, with log-log slopes.

    python scripts/regret_curves.py --T 1000 10000 100000 --seeds 20 --out regret.csv
"""
import argparse
import csv

import numpy as np

from drsubmax import DRQuadratic, EtcConfig, box, regret
from drsubmax.cli import fmt
from drsubmax.experiments import fit_slope, reference_optimum, regret_rate, run_etc_seeds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[10 ** 3, 10 ** 4, 10 ** 5])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--sigma", type=float, default=0.1)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="regret.csv")
    args = ap.parse_args()

    # F(x) = x - x^2 / 2 on [0, 1]
    K = box([0.0], [1.0])
    F = DRQuadratic([[-1.0]], [1.0])
    F_star = reference_optimum(F, K).F
    rows = []
    for fb in ("bandit", "semi_bandit"):
        means = []
        for T in args.T:
            recs = run_etc_seeds(EtcConfig(T, fb, "A", args.sigma), K, F, range(args.seeds),
                                 args.jobs)
            R = np.array([regret(r, F_star, 1.0) for r in recs])
            Ra = np.array([regret(r, F_star, r.alpha) for r in recs])
            means.append(R.mean())
            rows.append({"feedback": fb, "T": T, "T0": recs[0].T0, "N": recs[0].N,
                         "B": recs[0].B, "delta": recs[0].delta, "regret_mean": R.mean(),
                         "regret_stderr": R.std(ddof=1) / np.sqrt(R.size),
                         "regret_alpha_mean": Ra.mean(),
                         "scaled": R.mean() / T ** regret_rate(fb)})
        slope = fit_slope(args.T, means)
        print(f"{fb}: slope {slope:.3f} (rate {regret_rate(fb):.3f})")
        for r in rows:
            if r["feedback"] == fb:
                r["slope"] = slope
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(rows[0].keys())
        for r in rows:
            w.writerow([fmt(x) for x in r.values()])


if __name__ == "__main__":
    main()
