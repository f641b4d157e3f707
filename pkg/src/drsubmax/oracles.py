"""The four oracle kinds, restricted to the feasible set.

Value oracles return ``F(z) + xi`` with ``xi ~ N(0, sigma0^2)``.  Gradient
oracles return ``grad F(z) + zeta`` with ``zeta ~ N(0, sigma1^2 / d I)`` so that
``E ||zeta||^2 = sigma1^2``.  Any query outside the guard body raises
:class:`InfeasibleQuery`.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import InfeasibleQuery
from .geometry import contains_many
from .rng import make_rng, seed_sequence

GUARD_TOL = 1e-9


class OracleKind(str, Enum):
    grad_det = "grad_det"
    grad_stoch = "grad_stoch"
    value_det = "value_det"
    value_stoch = "value_stoch"

    @property
    def is_gradient(self) -> bool:
        return self in (OracleKind.grad_det, OracleKind.grad_stoch)

    @property
    def is_stochastic(self) -> bool:
        return self in (OracleKind.grad_stoch, OracleKind.value_stoch)

    @classmethod
    def from_case(cls, case: int) -> "OracleKind":
        try:
            return [cls.grad_det, cls.grad_stoch, cls.value_det, cls.value_stoch][int(case) - 1]
        except (IndexError, ValueError):
            raise ValueError(f"oracle case must be 1-4, got {case!r}") from None


class OracleHandle:
    """Single-consumer oracle with a query ledger.

    Use :meth:`split` to fan out to independently seeded children for
    concurrent sampling, then :meth:`merge` to fold their counts back.
    """

    def __init__(self, objective, kind, sigma: float = 0.0, body=None, seed=0, *,
                 record: bool = False):
        self.objective = objective
        self.kind = OracleKind(kind)
        self.sigma = float(sigma) if self.kind.is_stochastic else 0.0
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        self.body = body
        self._seed = seed_sequence(seed)
        self.rng = make_rng(self._seed)
        self.query_count = 0
        self.record = record
        self.log_points: list[np.ndarray] = []
        self.log_obs: list[np.ndarray] = []

    def _guard(self, Z: np.ndarray) -> None:
        if self.body is None:
            return
        ok = contains_many(self.body, Z, GUARD_TOL)
        if not np.all(ok):
            bad = Z[np.flatnonzero(~ok)[0]]
            raise InfeasibleQuery(f"oracle queried outside the feasible set at {bad.tolist()}")

    def sample_many(self, Z) -> np.ndarray:
        """One oracle sample per row of ``Z``."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        self._guard(Z)
        n = Z.shape[0]
        F = self.objective
        if self.kind.is_gradient:
            out = F.grad(Z)
            if self.sigma > 0:
                out = out + self.rng.standard_normal(out.shape) * (self.sigma / np.sqrt(F.d))
        else:
            out = F.value(Z)
            if self.sigma > 0:
                out = out + self.rng.standard_normal(n) * self.sigma
        self.query_count += n
        if self.record:
            self.log_points.append(Z.copy())
            self.log_obs.append(np.array(out, copy=True))
        return out

    def sample(self, z):
        out = self.sample_many(np.asarray(z, dtype=float)[None, :])
        return out[0] if self.kind.is_gradient else float(out[0])

    __call__ = sample

    def split(self, n: int) -> list["OracleHandle"]:
        children = []
        for s in self._seed.spawn(n):
            children.append(OracleHandle(self.objective, self.kind, self.sigma, self.body, s,
                                         record=self.record))
        return children

    def merge(self, children) -> None:
        for ch in children:
            self.query_count += ch.query_count
            self.log_points.extend(ch.log_points)
            self.log_obs.extend(ch.log_obs)

    def played_points(self) -> np.ndarray:
        if not self.log_points:
            return np.zeros((0, self.objective.d))
        return np.vstack(self.log_points)

    def observations(self) -> np.ndarray:
        if not self.log_obs:
            return np.zeros(0)
        return np.concatenate(self.log_obs, axis=0)
