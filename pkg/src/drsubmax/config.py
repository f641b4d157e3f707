"""Experiment configuration files (TOML, or JSON by extension).

Example::

    seeds = [1, 2, 3]

    [body]                      # or: body_file = "triangle.json"
    d = 2
    A = [[1.0, 1.0]]
    b = [1.0]

    [objective]
    kind = "dr_quadratic"
    H = [[-1.0, -0.5], [-0.5, -1.0]]
    h0 = [1.0, 0.9]

    [oracle]
    case = 2
    sigma = 0.2

    [run]                       # offline / sweep over N
    variant = "B"
    N = 1000                    # or epsilon_target = 0.05
    B = 1

    [online]                    # online / sweep over T
    T = 10000
    feedback = "bandit"

    [sweep]
    N_grid = [100, 1000, 10000] # or T_grid = [...]

    [baseline]
    m = 401

Relative paths are resolved against the config file's directory.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .bounds import Variant, params_for_target
from .errors import ConfigError, DrsubmaxError
from .fw import FwConfig
from .geometry import body_from_dict, box, load_body
from .objectives import objective_from_dict
from .online import EtcConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODES = ("offline", "online", "sweep", "baseline")
MAX_ITERATIONS = 10 ** 7


@dataclass
class ExperimentConfig:
    body: object
    objective: object
    mode: str
    seeds: list[int]
    fw: FwConfig | None = None
    etc: EtcConfig | None = None
    N_grid: list[int] = field(default_factory=list)
    T_grid: list[int] = field(default_factory=list)
    grid_m: int | None = None
    epsilon_target: float | None = None
    source: Path | None = None


def read_config_file(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config: file not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            return json.loads(path.read_text())
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"config: cannot parse {path}: {e}") from None


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected a table")
    return sec


def _parse_body(raw: dict, base: Path):
    try:
        if "body_file" in raw:
            p = Path(raw["body_file"])
            p = p if p.is_absolute() else base / p
            if not p.is_file():
                raise ConfigError(f"body_file: file not found: {p}")
            return load_body(p)
        spec = _section(raw, "body")
        if not spec:
            raise ConfigError("body: missing [body] table or body_file")
        if "box" in spec:
            bx = spec["box"]
            return box(bx["lo"], bx["hi"], spec.get("d"))
        return body_from_dict(spec)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"body: {e}") from None
    except DrsubmaxError as e:
        raise ConfigError(f"body: {type(e).__name__}: {e}") from None


def _parse_objective(raw: dict):
    spec = _section(raw, "objective")
    if not spec:
        raise ConfigError("objective: missing [objective] table")
    try:
        return objective_from_dict(spec)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"objective: {e}") from None


def _int_list(v, name) -> list[int]:
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise ConfigError(f"{name}: expected a list of integers")
    return list(v)


def _fw_config(run: dict, oracle: dict, body, objective, N_override=None):
    variant = run.get("variant")
    if variant is None:
        raise ConfigError("run.variant: missing")
    try:
        Variant.parse(variant)
    except ValueError as e:
        raise ConfigError(f"run.variant: {e}") from None
    case = oracle.get("case")
    if case not in (1, 2, 3, 4):
        raise ConfigError(f"oracle.case: must be 1-4, got {case!r}")
    sigma = float(oracle.get("sigma", 0.0))
    N, B, delta = run.get("N"), run.get("B"), run.get("delta")
    eps = run.get("epsilon_target")
    if eps is not None:
        try:
            p = params_for_target(case, variant, float(eps), G=objective.G, L=objective.L,
                                  D=body.diameter_bound, d=body.d, r=body.inradius,
                                  sigma=sigma, k=body.hull_dim)
        except DrsubmaxError as e:
            raise ConfigError(f"run.epsilon_target: {e}") from None
        N = p.N if N is None else N
        B = p.B if B is None else B
        delta = p.delta if delta is None else delta
    if N_override is not None:
        N = N_override
    if N is None:
        raise ConfigError("run.N: missing (give N or epsilon_target)")
    if N > MAX_ITERATIONS:
        raise ConfigError(f"run.N: {N} exceeds the iteration cap {MAX_ITERATIONS}")
    B = 1 if B is None else B
    delta = 0.0 if delta is None else float(delta)
    return FwConfig(variant, case, N, B, delta, sigma, 0)


def _etc_config(online: dict, oracle: dict, run: dict, T_override=None) -> EtcConfig:
    T = online.get("T") if T_override is None else T_override
    if T is None:
        raise ConfigError("online.T: missing")
    fb = online.get("feedback")
    if fb is None:
        raise ConfigError("online.feedback: missing")
    variant = online.get("variant", run.get("variant", "A"))
    sigma = online.get("sigma", oracle.get("sigma", 0.1))
    return EtcConfig(T, fb, variant, float(sigma), online.get("reward_sigma"), 0)


def parse_config(raw: dict, mode: str, *, base: Path = Path("."), seeds=None) -> ExperimentConfig:
    if mode not in MODES:
        raise ConfigError(f"mode: must be one of {MODES}, got {mode!r}")
    body = _parse_body(raw, base)
    objective = _parse_objective(raw)
    if objective.d != body.d:
        raise ConfigError(f"objective: dimension {objective.d} does not match body d={body.d}")
    if seeds is None:
        seeds = _int_list(raw.get("seeds", [0]), "seeds")
    if not seeds:
        raise ConfigError("seeds: empty seed list")
    run, oracle = _section(raw, "run"), _section(raw, "oracle")
    online, sweep = _section(raw, "online"), _section(raw, "sweep")
    m = _section(raw, "baseline").get("m")
    if m is not None and (not isinstance(m, int) or m < 2):
        raise ConfigError("baseline.m: must be an integer >= 2")
    cfg = ExperimentConfig(body, objective, mode, list(seeds), grid_m=m, source=base,
                           epsilon_target=run.get("epsilon_target"))

    if mode == "offline":
        cfg.fw = _fw_config(run, oracle, body, objective)
    elif mode == "online":
        cfg.etc = _etc_config(online, oracle, run)
    elif mode == "sweep":
        if "N_grid" in sweep:
            cfg.N_grid = _int_list(sweep["N_grid"], "sweep.N_grid")
            if not cfg.N_grid:
                raise ConfigError("sweep.N_grid: empty grid")
            for N in cfg.N_grid:
                _fw_config(run, oracle, body, objective, N)
            cfg.fw = _fw_config(run, oracle, body, objective, cfg.N_grid[0])
        elif "T_grid" in sweep:
            cfg.T_grid = _int_list(sweep["T_grid"], "sweep.T_grid")
            if not cfg.T_grid:
                raise ConfigError("sweep.T_grid: empty grid")
            for T in cfg.T_grid:
                _etc_config(online, oracle, run, T)
            cfg.etc = _etc_config(online, oracle, run, cfg.T_grid[0])
        else:
            raise ConfigError("sweep: give N_grid or T_grid")
    return cfg


def load_config(path, mode: str, seeds=None) -> ExperimentConfig:
    path = Path(path)
    raw = read_config_file(path)
    return parse_config(raw, mode, base=path.parent, seeds=seeds)
