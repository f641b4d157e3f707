"""Projection-free DR-submodular maximization over general convex sets."""
from .baseline import GridResult, grid_maximize
from .bounds import (Variant, approximation_ratio, epsilon_for, error_bound, params_for_target,
                     tracking_constant)
from .errors import (ConfigError, DegenerateHull, DeltaTooLarge, DrsubmaxError,
                     FeasibilityViolation, Infeasible, InfeasibleQuery, TargetTooTight,
                     VariantBodyMismatch)
from .fw import FwConfig, Trajectory, optimal_direction, run_offline, update_step
from .geometry import (ConvexBody, ShrunkenBody, box, build_body, contains, load_body,
                       min_inf_norm_point, shrink)
from .grad_estimation import bbge, momentum_update, rho
from .linear_oracle import lmo, lp_solve
from .objectives import CoverageMultilinear, DRQuadratic, SmoothedView
from .online import EtcConfig, RegretRecord, horizon_split, regret, run_etc
from .oracles import OracleHandle, OracleKind

__all__ = [
    "GridResult",
    "grid_maximize",
    "Variant",
    "approximation_ratio",
    "epsilon_for",
    "error_bound",
    "params_for_target",
    "tracking_constant",
    "ConfigError",
    "DegenerateHull",
    "DeltaTooLarge",
    "DrsubmaxError",
    "FeasibilityViolation",
    "Infeasible",
    "InfeasibleQuery",
    "TargetTooTight",
    "VariantBodyMismatch",
    "FwConfig",
    "Trajectory",
    "optimal_direction",
    "run_offline",
    "update_step",
    "ConvexBody",
    "ShrunkenBody",
    "box",
    "build_body",
    "contains",
    "load_body",
    "min_inf_norm_point",
    "shrink",
    "bbge",
    "momentum_update",
    "rho",
    "lmo",
    "lp_solve",
    "CoverageMultilinear",
    "DRQuadratic",
    "SmoothedView",
    "EtcConfig",
    "RegretRecord",
    "horizon_split",
    "regret",
    "run_etc",
    "OracleHandle",
    "OracleKind",
]

__version__ = "0.1.0"
