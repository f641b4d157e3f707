"""Gradient estimates for the Frank-Wolfe loop.

* :func:`bbge` is the antithetic two-point spherical estimator on the affine
  hull of the feasible set (value oracles).
* :func:`grad_oracle_batch` averages projected gradient-oracle samples.
* :func:`momentum_update` is the variance-reducing running average.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def rho(n: int) -> float:
    """Momentum weight ``2 / (n + 3)^(2/3)`` for the n-th update (n >= 1)."""
    return 2.0 / (n + 3) ** (2.0 / 3.0)


@dataclass(frozen=True)
class MomentumState:
    g_bar: np.ndarray
    step_index: int = 0

    @classmethod
    def zero(cls, d: int) -> "MomentumState":
        return cls(np.zeros(d), 0)


def momentum_update(state: MomentumState, g, deterministic: bool = False) -> MomentumState:
    n = state.step_index + 1
    p = 1.0 if deterministic else rho(n)
    g_bar = (1.0 - p) * state.g_bar + p * np.asarray(g, dtype=float)
    return MomentumState(g_bar, n)


@dataclass
class SphereSampler:
    """Uniform directions on the unit sphere of ``span(hull_basis)``."""

    hull_basis: np.ndarray
    rng: np.random.Generator

    @property
    def k(self) -> int:
        return self.hull_basis.shape[1]

    def sample(self, n: int | None = None) -> np.ndarray:
        m = 1 if n is None else n
        g = self.rng.standard_normal((m, self.k))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        U = g @ self.hull_basis.T
        # the basis map is orthonormal; renormalise to kill rounding drift
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        return U[0] if n is None else U


def sample_sphere(sampler: SphereSampler, n: int | None = None) -> np.ndarray:
    return sampler.sample(n)


def bbge_points(z, delta: float, U: np.ndarray) -> np.ndarray:
    """Query points in play order ``y1+, y1-, y2+, y2-, ...``."""
    Y = np.empty((2 * U.shape[0], U.shape[1]))
    Y[0::2] = z + delta * U
    Y[1::2] = z - delta * U
    return Y


def bbge_samples(oracle_value, z, delta: float, sampler: SphereSampler, n: int,
                 scale: float | None = None) -> np.ndarray:
    """``n`` single-direction estimates ``(k / 2 delta) (F(z + delta u) - F(z - delta u)) u``, one per row."""
    if n < 1:
        raise ValueError("batch size B must be >= 1")
    if delta <= 0:
        raise ValueError("BBGE needs a positive sampling radius")
    z = np.asarray(z, dtype=float)
    kappa = sampler.k if scale is None else scale
    U = sampler.sample(n)
    vals = oracle_value.sample_many(bbge_points(z, delta, U))
    diff = vals[0::2] - vals[1::2]
    return (kappa / (2.0 * delta)) * diff[:, None] * U


def bbge(oracle_value, z, delta: float, sampler: SphereSampler, B: int = 1,
         scale: float | None = None) -> np.ndarray:
    """Batch mean of :func:`bbge_samples`; consumes ``2 B`` value queries.

    ``scale`` defaults to the hull dimension ``k``, which makes the estimate
    unbiased for the gradient of the smoothed function projected onto the
    hull.
    """
    return bbge_samples(oracle_value, z, delta, sampler, B, scale).mean(axis=0)


def grad_oracle_batch(oracle_grad, z, B: int, hull_basis: np.ndarray) -> np.ndarray:
    """Mean of ``B`` gradient samples projected onto the hull directions."""
    if B < 1:
        raise ValueError("batch size B must be >= 1")
    z = np.asarray(z, dtype=float)
    G = oracle_grad.sample_many(np.broadcast_to(z, (B, z.size)))
    g = G.mean(axis=0)
    if hull_basis.shape[1] == hull_basis.shape[0]:
        return g
    return hull_basis @ (hull_basis.T @ g)
