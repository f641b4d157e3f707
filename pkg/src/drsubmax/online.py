"""Explore-then-commit for stochastic bandit and semi-bandit feedback.

The first ``T0`` rounds run the offline optimizer; each oracle query is one
played action.  Under bandit feedback both BBGE points ``y+`` and ``y-`` are
played.  The remaining ``T - T0`` rounds repeat ``z_{N+1}``.  Regret is
measured with the exact objective::

    R(T) = alpha T F(z*) - sum_t F(z_t)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import Variant, approximation_ratio, params_for_target
from .errors import ConfigError, TargetTooTight
from .fw import FwConfig, run_offline
from .geometry import min_inf_norm_point
from .grad_estimation import SphereSampler, bbge_points
from .oracles import OracleHandle, OracleKind
from .rng import make_rng, seed_sequence

FEEDBACKS = ("bandit", "semi_bandit")


def horizon_split(T: int, feedback: str) -> int:
    """Exploration length: ``ceil(T^(3/4))`` (semi-bandit) or ``ceil(T^(5/6))`` (bandit).

    Computed in integers: the smallest ``n`` with ``n^4 >= T^3`` (resp.
    ``n^6 >= T^5``).
    """
    T = int(T)
    if T < 4:
        raise ValueError("horizon T must be >= 4")
    if feedback == "semi_bandit":
        p, q = 3, 4
    elif feedback == "bandit":
        p, q = 5, 6
    else:
        raise ValueError(f"feedback must be one of {FEEDBACKS}, got {feedback!r}")
    target = T ** p
    n = max(1, int(round(T ** (p / q))) - 2)
    while n ** q < target:
        n += 1
    while n > 1 and (n - 1) ** q >= target:
        n -= 1
    return n


@dataclass(frozen=True)
class EtcConfig:
    T: int
    feedback: str
    variant: Variant = Variant.A
    sigma: float = 0.1
    reward_sigma: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.feedback not in FEEDBACKS:
            raise ConfigError(f"feedback: must be one of {FEEDBACKS}, got {self.feedback!r}")
        try:
            object.__setattr__(self, "variant", Variant.parse(self.variant))
        except ValueError as e:
            raise ConfigError(f"variant: {e}") from None
        if int(self.T) != self.T or self.T < 4:
            raise ConfigError("T: must be an integer >= 4")
        if self.sigma < 0:
            raise ConfigError("sigma: must be non-negative")

    @property
    def oracle_case(self) -> int:
        return 4 if self.feedback == "bandit" else 2

    @property
    def T0(self) -> int:
        return horizon_split(self.T, self.feedback)


@dataclass
class RegretRecord:
    """Per-round log plus the parameters that produced it."""

    t: np.ndarray
    z: np.ndarray
    reward: np.ndarray
    F: np.ndarray
    T0: int
    N: int
    B: int
    delta: float
    alpha: float
    z1_inf: float
    h: float
    explore_rounds: int
    F_star: float | None = None
    F_star_source: str = ""
    params: dict = field(default_factory=dict)

    @property
    def T(self) -> int:
        return int(self.t.size)

    def regret(self, F_star: float | None = None, alpha: float | None = None) -> float:
        Fs = self.F_star if F_star is None else F_star
        if Fs is None:
            raise ValueError("no reference optimum attached")
        return regret(self, Fs, self.alpha if alpha is None else alpha)


def regret(record: RegretRecord, F_star: float, alpha: float) -> float:
    return float(alpha * record.T * F_star - record.F.sum())


def _constants(body, objective):
    return dict(G=objective.G, L=objective.L, D=body.diameter_bound, d=body.d,
                r=body.inradius)


def choose_params(config: EtcConfig, body, objective) -> tuple[int, int, float, float]:
    """``(N, B, delta, eps_target)`` for the exploration budget ``T0``.

    Semi-bandit uses one gradient sample per iteration, ``N = T0``.  Bandit
    searches for the smallest target ``eps`` whose bound-inverted schedule
    fits in ``T0`` queries, keeps its ``delta`` and ``B`` and spends the
    whole budget on ``N = T0 // 2B`` iterations.
    """
    T0 = config.T0
    if config.feedback == "semi_bandit":
        if T0 < 4:
            raise ConfigError("T: exploration budget below 4 iterations")
        return T0, 1, 0.0, float("nan")
    c = _constants(body, objective)
    k = body.hull_dim

    def params(eps):
        try:
            return params_for_target(4, config.variant, eps, sigma=config.sigma, k=k, **c)
        except TargetTooTight:
            return None

    def fits(p):
        return p is not None and 2 * p.N * p.B <= T0

    lo, hi = 1e-6, 1.0
    while not fits(params(hi)):
        hi *= 2
        if params(hi) is None:
            break
    if fits(params(hi)):
        for _ in range(60):
            mid = math.sqrt(lo * hi)
            if fits(params(mid)):
                hi = mid
            else:
                lo = mid
            if hi / lo < 1 + 1e-6:
                break
        eps = hi
        p = params(eps)
    else:
        # budget too small for any admissible target: largest usable delta
        eps = hi / 2
        while params(eps) is None:
            eps /= 2
        p = params(eps)
    B = p.B
    N = T0 // (2 * B)
    if N < 4:
        B = max(1, T0 // 8)
        N = T0 // (2 * B)
    if N < 4:
        raise ConfigError("T: exploration budget below 4 iterations")
    return N, B, p.delta, eps


def run_etc(config: EtcConfig, body, objective, *, F_star: float | None = None,
            F_star_source: str = "") -> RegretRecord:
    T, T0 = int(config.T), config.T0
    N, B, delta, eps = choose_params(config, body, objective)
    case = config.oracle_case
    kind = OracleKind.from_case(case)
    s_oracle, s_sphere, s_reward = seed_sequence(config.seed).spawn(3)
    oracle = OracleHandle(objective, kind, config.sigma, body, s_oracle, record=True)
    sampler = SphereSampler(body.hull_basis, make_rng(s_sphere))
    rsig = config.sigma if config.reward_sigma is None else config.reward_sigma
    reward_oracle = OracleHandle(objective, OracleKind.value_stoch, rsig, body, s_reward)

    fw = FwConfig(config.variant, case, N, B, delta, config.sigma, config.seed)
    traj = run_offline(fw, body, objective, oracle=oracle, sampler=sampler)
    z_out = traj.z_final

    # leftover budget: a truncated batch at z_{N+1} whose estimate is discarded
    left = T0 - oracle.query_count
    if left > 0:
        if kind.is_gradient:
            oracle.sample_many(np.broadcast_to(z_out, (left, body.d)))
        else:
            U = sampler.sample((left + 1) // 2)
            oracle.sample_many(bbge_points(z_out, delta, U)[:left])

    Zx = oracle.played_points()
    if Zx.shape[0] != T0:
        raise AssertionError(f"exploration played {Zx.shape[0]} rounds, expected {T0}")
    if kind.is_gradient:
        rx = reward_oracle.sample_many(Zx)
    else:
        rx = oracle.observations()
    Zc = np.broadcast_to(z_out, (T - T0, body.d))
    rc = reward_oracle.sample_many(Zc) if T > T0 else np.zeros(0)
    Z = np.vstack([Zx, Zc])
    F = np.concatenate([objective.value(Zx), np.full(T - T0, objective.value(z_out))])
    h = float(np.abs(min_inf_norm_point(body)).max())
    z1_inf = float(np.abs(traj.z1).max())
    alpha = approximation_ratio(config.variant, z1_inf)
    return RegretRecord(
        t=np.arange(1, T + 1), z=Z, reward=np.concatenate([rx, rc]), F=F,
        T0=T0, N=N, B=B, delta=delta, alpha=alpha, z1_inf=z1_inf, h=h,
        explore_rounds=int(Zx.shape[0]), F_star=F_star, F_star_source=F_star_source,
        params={"eps_target": eps, "z_final": z_out.copy()},
    )
