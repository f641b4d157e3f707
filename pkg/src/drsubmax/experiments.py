"""Seed-replicated runs, summaries and slope fits shared by the CLI and scripts."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .baseline import GridResult, grid_maximize
from .bounds import tracking_constant, error_bound
from .fw import FwConfig, run_offline
from .online import EtcConfig, RegretRecord, regret, run_etc


def default_grid_m(k: int) -> int:
    if k == 1:
        return 2001
    if k == 2:
        return 401
    return max(2, int(math.floor(10 ** (6 / k))))


def reference_optimum(objective, body, m: int | None = None) -> GridResult:
    return grid_maximize(objective, body, m or default_grid_m(body.hull_dim))


def resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        jobs = int(os.environ.get("DRSUBMAX_JOBS", "1") or 1)
    return max(1, int(jobs))


def _offline_task(args):
    cfg, body, objective = args
    t = run_offline(cfg, body, objective)
    # the injected oracle and sampler are not needed downstream
    t.extra = {}
    return t


def _etc_task(args):
    cfg, body, objective = args
    return run_etc(cfg, body, objective)


def _map(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(min(jobs, len(tasks))) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def run_offline_seeds(cfg: FwConfig, body, objective, seeds, jobs: int = 1):
    """One trajectory per seed, returned in seed-list order."""
    tasks = [(replace(cfg, seed=int(s)), body, objective) for s in seeds]
    return _map(_offline_task, tasks, jobs)


def run_etc_seeds(cfg: EtcConfig, body, objective, seeds, jobs: int = 1) -> list[RegretRecord]:
    tasks = [(replace(cfg, seed=int(s)), body, objective) for s in seeds]
    return _map(_etc_task, tasks, jobs)


def bound_for(trajectory, body, objective) -> tuple[float, float]:
    """``(Q, additive bound)`` with every constant instantiated."""
    cfg = trajectory.config
    Q = tracking_constant(cfg.oracle_case, G=objective.G, L=objective.L, D=body.diameter_bound,
                          k=body.hull_dim, B=cfg.B, sigma=cfg.sigma, delta=cfg.delta)
    bound = error_bound(cfg.variant, cfg.N, G=objective.G, L=objective.L,
                        D=body.diameter_bound, d=body.d, r=body.inradius, Q=Q,
                        delta=cfg.delta)
    return Q, bound


def offline_summary(trajs, body, objective, ref: GridResult) -> dict:
    F = np.array([t.F_final for t in trajs])
    n = F.size
    se = float(F.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    t0 = trajs[0]
    Q, bound = bound_for(t0, body, objective)
    rhs = t0.alpha * ref.F - bound - ref.gap_bound
    mean = float(F.mean())
    return {
        "variant": t0.config.variant.name, "case": t0.config.oracle_case,
        "N": t0.config.N, "B": t0.config.B, "delta": t0.config.delta,
        "n_seeds": n, "F_mean": mean, "F_stderr": se, "F_star": ref.F,
        "gap_bound": ref.gap_bound, "alpha": t0.alpha, "Q": Q, "bound": bound,
        "rhs": rhs, "pass": mean >= rhs,
    }


def regret_rate(feedback: str) -> float:
    return 5 / 6 if feedback == "bandit" else 3 / 4


def etc_summary(rec: RegretRecord, feedback: str, F_star: float) -> dict:
    R = regret(rec, F_star, rec.alpha)
    R1 = regret(rec, F_star, 1.0)
    return {
        "T": rec.T, "T0": rec.T0, "N": rec.N, "B": rec.B, "delta": rec.delta,
        "alpha": rec.alpha, "F_star": F_star, "regret_alpha": R, "regret_1": R1,
        "regret_scaled": R1 / rec.T ** regret_rate(feedback),
        "explore_rounds": rec.explore_rounds,
    }


def fit_slope(x, y) -> float:
    """Least-squares slope of ``log y`` on ``log x``; NaN when fewer than two usable points."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])
