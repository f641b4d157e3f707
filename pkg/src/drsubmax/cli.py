"""Command-line harness.

Usage::

    drsubmax offline|online|sweep|baseline --config CFG --out OUT.csv
             [--seeds 1,2,...] [--jobs N]

The main table goes to ``--out``; a summary table goes next to it as
``OUT.summary.csv``.  Floats are written with 17 significant digits, so
identical configs and seeds give byte-identical files.  Exit codes: 0 on
success, 1 for configuration errors, 2 for runtime failures.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .baseline import grid_maximize
from .config import MODES, load_config
from .errors import ConfigError, DrsubmaxError
from .experiments import (default_grid_m, etc_summary, fit_slope, offline_summary,
                          reference_optimum, resolve_jobs, run_etc_seeds, run_offline_seeds)

log = logging.getLogger("drsubmax")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def summary_path(out: Path) -> Path:
    return out.with_name(out.stem + ".summary.csv")


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def write_dicts(path: Path, dicts) -> None:
    header = list(dicts[0].keys())
    write_csv(path, header, [[d[k] for k in header] for d in dicts])


def _trajectory_rows(seed, t):
    N = t.config.N
    for i in range(N + 1):
        q = 0 if i == 0 else t.query_count[i - 1]
        err = t.grad_err_sq[i] if i < N else float("nan")
        yield [seed, i + 1, q, t.F[i], err]


def cmd_offline(cfg, out: Path, jobs: int) -> int:
    trajs = run_offline_seeds(cfg.fw, cfg.body, cfg.objective, cfg.seeds, jobs)
    rows = []
    for s, t in zip(cfg.seeds, trajs):
        rows.extend(_trajectory_rows(s, t))
    write_csv(out, ["seed", "n", "query_count", "F_exact", "grad_err_sq"], rows)
    ref = reference_optimum(cfg.objective, cfg.body, cfg.grid_m)
    summ = offline_summary(trajs, cfg.body, cfg.objective, ref)
    summ["F_final"] = summ["F_mean"]
    write_dicts(summary_path(out), [summ])
    log.info("F_final=%.6g bound_rhs=%.6g pass=%s", summ["F_mean"], summ["rhs"], summ["pass"])
    return 0


def cmd_online(cfg, out: Path, jobs: int) -> int:
    recs = run_etc_seeds(cfg.etc, cfg.body, cfg.objective, cfg.seeds, jobs)
    ref = reference_optimum(cfg.objective, cfg.body, cfg.grid_m)
    d = cfg.body.d
    header = ["seed", "t"] + [f"z{j + 1}" for j in range(d)] + ["F_exact", "reward"]
    rows = []
    for s, r in zip(cfg.seeds, recs):
        for i in range(r.T):
            rows.append([s, int(r.t[i]), *r.z[i], r.F[i], r.reward[i]])
    write_csv(out, header, rows)
    summ = []
    for s, r in zip(cfg.seeds, recs):
        row = {"seed": s, "feedback": cfg.etc.feedback}
        row.update(etc_summary(r, cfg.etc.feedback, ref.F))
        summ.append(row)
    write_dicts(summary_path(out), summ)
    return 0


def cmd_sweep(cfg, out: Path, jobs: int) -> int:
    ref = reference_optimum(cfg.objective, cfg.body, cfg.grid_m)
    summ = []
    rows = []
    if cfg.N_grid:
        for N in cfg.N_grid:
            fw = replace(cfg.fw, N=N)
            trajs = run_offline_seeds(fw, cfg.body, cfg.objective, cfg.seeds, jobs)
            for s, t in zip(cfg.seeds, trajs):
                rows.append([N, s, t.F_final, t.total_queries])
            sm = offline_summary(trajs, cfg.body, cfg.objective, ref)
            sm["error"] = ref.F - sm["F_mean"]
            sm["alpha_error"] = sm["alpha"] * ref.F - sm["F_mean"]
            summ.append(sm)
        write_csv(out, ["N", "seed", "F_final", "query_count"], rows)
        slope = fit_slope([s["N"] for s in summ], [s["error"] for s in summ])
    else:
        for T in cfg.T_grid:
            etc = replace(cfg.etc, T=T)
            recs = run_etc_seeds(etc, cfg.body, cfg.objective, cfg.seeds, jobs)
            per = [etc_summary(r, etc.feedback, ref.F) for r in recs]
            for s, p in zip(cfg.seeds, per):
                rows.append([T, s, p["regret_1"], p["regret_alpha"], p["explore_rounds"]])
            R1 = np.array([p["regret_1"] for p in per])
            Ra = np.array([p["regret_alpha"] for p in per])
            n = R1.size
            summ.append({
                "T": T, "T0": per[0]["T0"], "N": per[0]["N"], "B": per[0]["B"],
                "delta": per[0]["delta"], "n_seeds": n,
                "regret_mean": float(R1.mean()),
                "regret_stderr": float(R1.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
                "regret_alpha_mean": float(Ra.mean()), "alpha": per[0]["alpha"],
                "F_star": ref.F,
            })
        write_csv(out, ["T", "seed", "regret_1", "regret_alpha", "explore_rounds"], rows)
        slope = fit_slope([s["T"] for s in summ], [s["regret_mean"] for s in summ])
    for s in summ:
        s["slope"] = slope
    write_dicts(summary_path(out), summ)
    log.info("log-log slope %.4f", slope)
    return 0


def cmd_baseline(cfg, out: Path, jobs: int) -> int:
    m = cfg.grid_m or default_grid_m(cfg.body.hull_dim)
    res = grid_maximize(cfg.objective, cfg.body, m, jobs=jobs)
    d = cfg.body.d
    write_csv(out, [f"z{j + 1}" for j in range(d)] + ["F_star", "gap_bound", "m"],
              [[*res.z, res.F, res.gap_bound, m]])
    return 0


COMMANDS = {"offline": cmd_offline, "online": cmd_online, "sweep": cmd_sweep,
            "baseline": cmd_baseline}


def _seed_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seeds expects comma-separated integers, got {s!r}")


class _Parser(argparse.ArgumentParser):
    # bad command lines are configuration errors (exit 1), not runtime ones
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="drsubmax",
                                description="Projection-free DR-submodular maximization experiments")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=True, type=Path, help="TOML or JSON experiment config")
    p.add_argument("--out", required=True, type=Path, help="main CSV output path")
    p.add_argument("--seeds", type=_seed_list, default=None, help="override the config seed list")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $DRSUBMAX_JOBS or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.mode, seeds=args.seeds)
        jobs = resolve_jobs(args.jobs)
    except (ConfigError, ValueError) as e:
        print(f"drsubmax: config error: {e}", file=sys.stderr)
        return 1
    try:
        return COMMANDS[args.mode](cfg, args.out, jobs)
    except ConfigError as e:
        print(f"drsubmax: config error: {e}", file=sys.stderr)
        return 1
    except (DrsubmaxError, ArithmeticError, np.linalg.LinAlgError) as e:
        print(f"drsubmax: runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
