"""Approximation ratios, error bounds and parameter schedules.

The four algorithm variants and their guarantees:

=========  ==============================  ===========  =================
variant    setting                         ratio        step size
=========  ==============================  ===========  =================
A          monotone, ``0 in K``            1 - 1/e      1/N
B          non-monotone, down-closed K     1/e          1/N
C          monotone, general K             1/2          ln(N) / 2N
D          non-monotone, general K         (1-h)/4      ln(2) / N
=========  ==============================  ===========  =================

``h`` is the infinity norm of the starting point.  Logs are natural.
"""
from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple

from .errors import TargetTooTight


class Variant(str, Enum):
    A = "A_monotone_origin"
    B = "B_nonmonotone_dc"
    C = "C_monotone_general"
    D = "D_nonmonotone_general"

    @classmethod
    def parse(cls, v) -> "Variant":
        if isinstance(v, cls):
            return v
        s = str(v).strip()
        for member in cls:
            if s in (member.name, member.value) or s.upper() == member.name:
                return member
        raise ValueError(f"unknown variant {v!r}; expected one of A, B, C, D")

    @property
    def additive(self) -> bool:
        """Variants A and B step ``z + eps v``; C and D take convex combinations."""
        return self in (Variant.A, Variant.B)


def epsilon_for(variant, N: int) -> float:
    v = Variant.parse(variant)
    if N < 4:
        raise ValueError("N must be >= 4")
    if v.additive:
        return 1.0 / N
    if v is Variant.C:
        return math.log(N) / (2 * N)
    return math.log(2) / N


def approximation_ratio(variant, z1_inf: float = 0.0) -> float:
    v = Variant.parse(variant)
    return {
        Variant.A: 1 - math.exp(-1),
        Variant.B: math.exp(-1),
        Variant.C: 0.5,
        Variant.D: 0.25 * (1 - z1_inf),
    }[v]


def tracking_constant(case: int, *, G: float, L: float, D: float, k: int, B: int = 1,
                      sigma: float = 0.0, delta: float = 0.0, C: float | None = None) -> float:
    """Momentum tracking constant ``Q``.

    ``k`` is the dimension the estimator samples in (the hull dimension).
    ``C`` is the single-sample variance constant of the two-point
    estimator; the default ``C = k`` is certified because each sample has
    norm at most ``k G``.
    """
    if case == 1:
        return 0.0
    floor = 4 ** (2 / 3) * G ** 2
    if case == 2:
        return max(floor, 6 * L ** 2 * D ** 2 + 4 * sigma ** 2 / B)
    if case in (3, 4):
        if delta <= 0:
            raise ValueError("value-oracle cases need delta > 0")
        C = float(k) if C is None else C
        s0 = sigma if case == 4 else 0.0
        return max(floor, 6 * L ** 2 * D ** 2 + (4 * C * k * G ** 2 + 2 * k ** 2 * s0 ** 2 / delta ** 2) / B)
    raise ValueError(f"oracle case must be 1-4, got {case!r}")


def _terms(variant: Variant, N: int, *, G, L, D, d, r, Q, delta):
    """The three additive error terms (noise, curvature, smoothing)."""
    lnN = math.log(N)
    if variant.additive:
        t1 = 3 * D * math.sqrt(Q) / N ** (1 / 3)
        t2 = L * D ** 2 / (2 * N)
        t3 = delta * G * (2 + (math.sqrt(d) + D) / r) if delta else 0.0
    elif variant is Variant.C:
        t1 = 3 * D * math.sqrt(Q) * lnN / (2 * N ** (1 / 3))
        t2 = (4 * D * G + L * D ** 2 * lnN ** 2) / (8 * N)
        t3 = delta * G * (2 + D / r) if delta else 0.0
    else:
        t1 = 3 * D * math.sqrt(Q) / N ** (1 / 3)
        t2 = (D * G + 2 * L * D ** 2) / (4 * N)
        t3 = delta * G * (2 + D / r) if delta else 0.0
    return t1, t2, t3


def error_bound(variant, N: int, *, G, L, D, d, r, Q=0.0, delta=0.0) -> float:
    """Additive error bound on ``alpha F(z*) - E F(z_{N+1})``."""
    return sum(_terms(Variant.parse(variant), N, G=G, L=L, D=D, d=d, r=r, Q=Q, delta=delta))


def smoothing_coefficient(variant, *, d, D, r) -> float:
    v = Variant.parse(variant)
    return 2 + (math.sqrt(d) + D) / r if v.additive else 2 + D / r


class TargetParams(NamedTuple):
    N: int
    B: int
    delta: float


def _smallest_n(ok) -> int:
    """Smallest N >= 4 with ``ok(N)``; ``ok`` is monotone beyond N = 64."""
    for n in range(4, 65):
        if ok(n):
            return n
    hi = 128
    while not ok(hi):
        hi *= 2
        if hi > 2 ** 62:
            raise TargetTooTight("no iteration count reaches the target")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def params_for_target(case: int, variant, eps: float, *, G: float, L: float, D: float,
                      d: int, r: float, sigma: float = 0.0, k: int | None = None,
                      C: float | None = None) -> TargetParams:
    """Smallest ``(N, B, delta)`` whose error bound is at most ``eps``.

    Each non-zero additive term of the bound gets an equal share of ``eps``.
    Value oracles set ``delta`` from the smoothing term; the stochastic
    value oracle picks ``B`` so that ``2 k^2 sigma^2 / (delta^2 B) <= G^2``.
    """
    v = Variant.parse(variant)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = d if k is None else k
    n_terms = {1: 1, 2: 2, 3: 3, 4: 3}[case]
    share = eps / n_terms
    delta = 0.0
    B = 1
    if case in (3, 4):
        delta = share / (G * smoothing_coefficient(v, d=d, D=D, r=r))
        if delta >= r:
            raise TargetTooTight(f"delta={delta:.4g} would reach the inradius r={r:.4g}")
        if case == 4 and sigma > 0:
            B = max(1, math.ceil(2 * k ** 2 * sigma ** 2 / (delta ** 2 * G ** 2)))
    Q = tracking_constant(case, G=G, L=L, D=D, k=k, B=B, sigma=sigma, delta=delta, C=C)

    # relative slack absorbs rounding in D**2 and friends
    lim = share * (1 + 1e-12)

    def ok(n):
        t1, t2, _ = _terms(v, n, G=G, L=L, D=D, d=d, r=r, Q=Q, delta=delta)
        return (case == 1 or t1 <= lim) and t2 <= lim

    return TargetParams(_smallest_n(ok), B, delta)
