"""Generalized DR-submodular Frank-Wolfe with momentum.

One loop serves all sixteen (variant, oracle case) settings::

    K_delta = shrink(K, delta);  z_1 = argmin ||z||_inf over K_delta
    for n = 1..N:
        g_n    = gradient estimate at z_n      (oracle batch or BBGE)
        gbar_n = (1 - rho_n) gbar_{n-1} + rho_n g_n
        v_n    = LMO(gbar_n) under the variant's rule
        z_n+1  = z_n + eps v_n            (A, B)
               = (1 - eps) z_n + eps v_n  (C, D)

Gradient cases use ``delta = 0`` so ``K_delta = K``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import Variant, approximation_ratio, epsilon_for
from .errors import ConfigError, FeasibilityViolation, VariantBodyMismatch
from .geometry import contains, min_inf_norm_point, shrink
from .grad_estimation import (MomentumState, SphereSampler, bbge, grad_oracle_batch,
                              momentum_update)
from .linear_oracle import lmo
from .oracles import OracleHandle, OracleKind
from .rng import make_rng, seed_sequence

FEAS_TOL = 1e-7

__all__ = ["Variant", "FwConfig", "Trajectory", "epsilon_for", "optimal_direction",
           "update_step", "run_offline", "check_variant"]


@dataclass(frozen=True)
class FwConfig:
    variant: Variant
    oracle_case: int
    N: int
    B: int = 1
    delta: float = 0.0
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "variant", Variant.parse(self.variant))
        except ValueError as e:
            raise ConfigError(f"variant: {e}") from None
        if self.oracle_case not in (1, 2, 3, 4):
            raise ConfigError(f"oracle_case: must be 1-4, got {self.oracle_case!r}")
        if int(self.N) != self.N or self.N < 4:
            raise ConfigError(f"N: must be an integer >= 4, got {self.N!r}")
        if int(self.B) != self.B or self.B < 1:
            raise ConfigError(f"B: must be an integer >= 1, got {self.B!r}")
        if self.sigma < 0:
            raise ConfigError("sigma: must be non-negative")
        gradient = self.oracle_case in (1, 2)
        if gradient and self.delta != 0:
            raise ConfigError("delta: gradient-oracle cases use delta = 0")
        if not gradient and not self.delta > 0:
            raise ConfigError("delta: value-oracle cases need delta > 0")

    @property
    def kind(self) -> OracleKind:
        return OracleKind.from_case(self.oracle_case)

    @property
    def queries_per_iter(self) -> int:
        return self.B if self.oracle_case in (1, 2) else 2 * self.B


@dataclass
class Trajectory:
    """Per-iteration record; row ``n - 1`` belongs to iteration ``n``.

    ``z`` has ``N + 1`` rows (the last is the output ``z_{N+1}``) and so does
    ``F``.  ``F`` and ``grad_err_sq`` are side-channel diagnostics computed
    from the objective itself and never counted as queries.
    """

    config: FwConfig
    z: np.ndarray
    v: np.ndarray
    gbar_norm: np.ndarray
    F: np.ndarray
    query_count: np.ndarray
    grad_err_sq: np.ndarray
    z1: np.ndarray
    epsilon: float
    alpha: float
    extra: dict = field(default_factory=dict)

    @property
    def z_final(self) -> np.ndarray:
        return self.z[-1]

    @property
    def F_final(self) -> float:
        return float(self.F[-1])

    @property
    def total_queries(self) -> int:
        return int(self.query_count[-1]) if self.query_count.size else 0


def check_variant(variant, body) -> None:
    v = Variant.parse(variant)
    if v is Variant.A and not body.contains_origin:
        raise VariantBodyMismatch("variant A needs a body containing the origin; use C")
    if v is Variant.B and not (body.down_closed and body.contains_origin):
        raise VariantBodyMismatch("variant B needs a down-closed body containing the origin; use D")


def optimal_direction(variant, shrunken, gbar, z_n, z1) -> np.ndarray:
    """LMO step for the variant (A/B over ``K_delta - z1``, C/D over ``K_delta``)."""
    v = Variant.parse(variant)
    if v is Variant.A:
        return lmo(shrunken, gbar, shift=z1)
    if v is Variant.B:
        cap = np.maximum(1.0 - np.asarray(z_n, dtype=float), 0.0)
        return lmo(shrunken, gbar, shift=z1, cap=cap)
    return lmo(shrunken, gbar)


def update_step(variant, z_n, v_n, eps: float, body=None) -> np.ndarray:
    v = Variant.parse(variant)
    z_n = np.asarray(z_n, dtype=float)
    if v.additive:
        z = z_n + eps * np.asarray(v_n, dtype=float)
    else:
        z = (1.0 - eps) * z_n + eps * np.asarray(v_n, dtype=float)
    if body is not None and not contains(body, z, FEAS_TOL):
        raise FeasibilityViolation(f"iterate left the feasible set: {z.tolist()}")
    return z


def _smoothed_grad(objective, z, basis, full):
    g = objective.grad(z)
    return g if full else basis @ (basis.T @ g)


def run_offline(config: FwConfig, body, objective, *, oracle: OracleHandle | None = None,
                sampler: SphereSampler | None = None) -> Trajectory:
    """Run the full loop and return the trajectory ending at ``z_{N+1}``.

    ``oracle`` and ``sampler`` can be injected (the online wrapper does this
    to keep the play log); by default both are seeded from ``config.seed``.
    """
    cfg = config
    check_variant(cfg.variant, body)
    if objective.d != body.d:
        raise ConfigError("objective and body dimensions differ")
    Kd = shrink(body, cfg.delta)
    basis = body.hull_basis
    full = basis.shape[1] == body.d
    oracle_seed, sphere_seed = seed_sequence(cfg.seed).spawn(2)
    if oracle is None:
        oracle = OracleHandle(objective, cfg.kind, cfg.sigma, body, oracle_seed)
    if sampler is None:
        sampler = SphereSampler(basis, make_rng(sphere_seed))
    eps = epsilon_for(cfg.variant, cfg.N)
    z1 = min_inf_norm_point(Kd)
    alpha = approximation_ratio(cfg.variant, float(np.abs(z1).max()))

    N, d = cfg.N, body.d
    Z = np.empty((N + 1, d))
    V = np.empty((N, d))
    gnorm = np.empty(N)
    Fz = np.empty(N + 1)
    qc = np.empty(N, dtype=np.int64)
    gerr = np.empty(N)

    det = cfg.oracle_case == 1
    state = MomentumState.zero(d)
    z = z1.copy()
    if not contains(Kd, z, FEAS_TOL):
        raise FeasibilityViolation(f"starting point outside K_delta: {z.tolist()}")
    q0 = oracle.query_count
    for i in range(N):
        Z[i] = z
        Fz[i] = objective.value(z)
        if cfg.kind.is_gradient:
            g = grad_oracle_batch(oracle, z, cfg.B, basis)
        else:
            g = bbge(oracle, z, cfg.delta, sampler, cfg.B)
        state = momentum_update(state, g, deterministic=det)
        v = optimal_direction(cfg.variant, Kd, state.g_bar, z, z1)
        target = _smoothed_grad(objective, z, basis, full)
        gerr[i] = float(np.sum((target - state.g_bar) ** 2))
        gnorm[i] = float(np.linalg.norm(state.g_bar))
        V[i] = v
        qc[i] = oracle.query_count - q0
        # update_step re-checks membership of every new iterate
        z = update_step(cfg.variant, z, v, eps, Kd)
    Z[N] = z
    Fz[N] = objective.value(z)
    return Trajectory(cfg, Z, V, gnorm, Fz, qc, gerr, z1, eps, alpha,
                      extra={"oracle": oracle, "sampler": sampler, "shrunken": Kd})
