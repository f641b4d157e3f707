"""DR-submodular test objectives with certified constants, and smoothing.

Every objective evaluates on a single point ``(d,)`` or on a batch
``(n, d)``.  ``G`` and ``L`` are certified upper bounds on the Lipschitz and
smoothness constants over the unit cube.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionTooLarge, OutOfDomain

MAX_VERTEX_DIM = 20
MAX_COVERAGE_DIM = 12


def _cube_vertices(d: int) -> np.ndarray:
    if d > MAX_VERTEX_DIM:
        raise DimensionTooLarge(f"vertex certification needs d <= {MAX_VERTEX_DIM}")
    return np.array(list(itertools.product((0.0, 1.0), repeat=d)))


def _check_domain(x: np.ndarray, tol: float = 1e-9) -> None:
    # NaN fails both comparisons, so it is caught too
    if not ((x >= -tol) & (x <= 1 + tol)).all():
        raise OutOfDomain("objective evaluated outside [0, 1]^d")


class Objective:
    """Base class: subclasses provide ``_value`` and ``_grad`` on batches."""

    kind = "abstract"
    d: int
    G: float
    L: float
    monotone: bool

    def value(self, x):
        x = np.asarray(x, dtype=float)
        _check_domain(x)
        if x.ndim == 1:
            return float(self._value(x[None, :])[0])
        return self._value(x)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        _check_domain(x)
        if x.ndim == 1:
            return self._grad(x[None, :])[0]
        return self._grad(x)

    __call__ = value

    def _value(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _grad(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class DRQuadratic(Objective):
    """``F(x) = x.H.x / 2 + h0.x + c0`` with every entry of ``H`` non-positive."""

    kind = "dr_quadratic"

    def __init__(self, H, h0, c0: float = 0.0, *, enforce_nonneg: bool = True):
        H = np.atleast_2d(np.asarray(H, dtype=float))
        h0 = np.atleast_1d(np.asarray(h0, dtype=float))
        d = h0.size
        if H.shape != (d, d):
            raise ValueError("H must be d x d")
        if not np.allclose(H, H.T, atol=1e-12):
            raise ValueError("H must be symmetric")
        if np.any(H > 1e-12):
            raise ValueError("DR-submodular quadratic needs every entry of H <= 0")
        self.H, self.h0, self.d = H, h0, d
        self.c0 = float(c0)

        # H_ii <= 0 makes F concave along each axis, so extrema of F and of the
        # affine map Hx + h0 over the cube are attained at vertices.
        V = _cube_vertices(d)
        vals = 0.5 * np.einsum("ni,ij,nj->n", V, H, V) + V @ h0 + self.c0
        self.offset = 0.0
        if enforce_nonneg and vals.min() < 0:
            self.offset = -float(vals.min())
            self.c0 += self.offset
        grads = V @ H + h0
        self.monotone = bool(grads.min() >= -1e-12)
        self.G = float(np.linalg.norm(grads, axis=1).max())
        self.L = float(np.abs(np.linalg.eigvalsh(H)).max()) if d else 0.0

    def _value(self, X):
        return 0.5 * np.einsum("ni,ij,nj->n", X, self.H, X) + X @ self.h0 + self.c0

    def _grad(self, X):
        return X @ self.H + self.h0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "H": self.H.tolist(), "h0": self.h0.tolist(),
                "c0": self.c0 - self.offset}


class CoverageMultilinear(Objective):
    """Weighted probabilistic coverage ``sum_j w_j (1 - prod_{i in S_j} (1 - x_i))``."""

    kind = "coverage"

    def __init__(self, sets, weights, d: int | None = None):
        sets = [sorted({int(i) for i in s}) for s in sets]
        weights = np.asarray(weights, dtype=float)
        if len(sets) != weights.size:
            raise ValueError("one weight per set")
        if np.any(weights < 0):
            raise ValueError("coverage weights must be non-negative")
        if d is None:
            d = 1 + max((max(s) for s in sets if s), default=0)
        if d > MAX_COVERAGE_DIM:
            raise DimensionTooLarge(f"coverage objectives support d <= {MAX_COVERAGE_DIM}")
        self.d = d
        self.sets = sets
        self.weights = weights
        M = np.zeros((len(sets), d))
        for j, s in enumerate(sets):
            M[j, s] = 1.0
        self._member = M
        self.monotone = True
        # partial derivatives are largest at the origin
        g0 = M.T @ weights
        self.G = float(np.linalg.norm(g0))
        # |d2F/dxi dxl| <= sum of weights of sets holding both i and l
        pair = (M * weights[:, None]).T @ M
        np.fill_diagonal(pair, 0.0)
        self.L = float(np.linalg.norm(pair, 2)) if d > 1 else 0.0

    def _prod(self, X):
        # prod_{i in S_j} (1 - x_i) for every set, shape (n, m)
        out = np.ones((X.shape[0], len(self.sets)))
        for j, s in enumerate(self.sets):
            if s:
                out[:, j] = np.prod(1.0 - X[:, s], axis=1)
        return out

    def _value(self, X):
        return (1.0 - self._prod(X)) @ self.weights

    def _grad(self, X):
        n = X.shape[0]
        g = np.zeros((n, self.d))
        for j, s in enumerate(self.sets):
            w = self.weights[j]
            if not s or w == 0:
                continue
            Y = 1.0 - X[:, s]
            for a, i in enumerate(s):
                others = np.delete(Y, a, axis=1)
                g[:, i] += w * np.prod(others, axis=1)
        return g

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sets": self.sets, "weights": self.weights.tolist()}


class CustomObjective(Objective):
    """User-supplied callables with declared constants (trusted, not certified)."""

    kind = "custom"

    def __init__(self, d: int, value_fn: Callable, grad_fn: Callable, *, G: float,
                 L: float, monotone: bool):
        self.d, self.G, self.L, self.monotone = d, float(G), float(L), bool(monotone)
        self._vf, self._gf = value_fn, grad_fn

    def _value(self, X):
        return np.array([self._vf(x) for x in X], dtype=float)

    def _grad(self, X):
        return np.array([self._gf(x) for x in X], dtype=float)


def build_coverage_multilinear(sets, weights, d: int | None = None) -> CoverageMultilinear:
    return CoverageMultilinear(sets, weights, d)


def objective_from_dict(spec: dict) -> Objective:
    kind = spec.get("kind")
    if kind == "dr_quadratic":
        return DRQuadratic(spec["H"], spec["h0"], spec.get("c0", 0.0))
    if kind in ("coverage", "coverage_multilinear"):
        return CoverageMultilinear(spec["sets"], spec["weights"], spec.get("d"))
    raise ValueError(f"unknown objective kind {kind!r}")


# ---------------------------------------------------------------------------
# smoothing

def sample_unit_ball(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = rng.random(n) ** (1.0 / k)
    return g * radius[:, None]


@dataclass(frozen=True)
class SmoothedView:
    """``F_delta(x) = E_v F(x + delta v)``, ``v`` uniform in the unit ball of the hull."""

    objective: Objective
    delta: float
    hull_basis: np.ndarray

    @property
    def k(self) -> int:
        return self.hull_basis.shape[1]

    def closed_form(self, x) -> float:
        F = self.objective
        if not isinstance(F, DRQuadratic):
            raise TypeError("closed-form smoothing is only available for quadratics")
        B = self.hull_basis
        # E[v v^T] = I_k / (k + 2) for the uniform k-ball
        curv = np.trace(B.T @ F.H @ B)
        return F.value(x) + self.delta ** 2 * curv / (2 * (self.k + 2))

    def monte_carlo(self, x, M: int, rng: np.random.Generator, chunk: int = 200_000):
        """Sample mean and standard error over ``M`` ball draws."""
        x = np.asarray(x, dtype=float)
        total = 0.0
        total_sq = 0.0
        done = 0
        while done < M:
            n = min(chunk, M - done)
            V = sample_unit_ball(self.k, n, rng) @ self.hull_basis.T
            vals = self.objective.value(x + self.delta * V)
            total += vals.sum()
            total_sq += (vals ** 2).sum()
            done += n
        mean = total / M
        var = max(total_sq / M - mean ** 2, 0.0) * M / max(M - 1, 1)
        return mean, float(np.sqrt(var / M))


def smoothed_eval(view: SmoothedView, x, mode: str = "closed_form", *, M: int = 100_000,
                  rng: np.random.Generator | None = None):
    if mode == "closed_form":
        return view.closed_form(x)
    if mode == "monte_carlo":
        return view.monte_carlo(x, M, rng if rng is not None else np.random.default_rng())
    raise ValueError(f"unknown smoothing mode {mode!r}")
