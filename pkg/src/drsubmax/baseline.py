"""Brute-force grid maximizer used as the reference optimum ``F(z*)``.

The grid lives in hull coordinates ``w = B^T (x - anchor)`` over the
bounding box of the body, so equality-constrained bodies are handled the
same way as full-dimensional ones.  Grid points outside the body are
skipped.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GridTooLarge
from .geometry import contains_many
from .linear_oracle import lp_solve

MAX_GRID_POINTS = 10 ** 8
CHUNK = 1 << 18


@dataclass(frozen=True)
class GridSpec:
    m: int
    body: object

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("grid resolution m must be >= 2")
        k = self.body.hull_dim
        if self.m ** k > MAX_GRID_POINTS:
            raise GridTooLarge(f"m^k = {self.m}^{k} exceeds {MAX_GRID_POINTS:.0e} grid points")


class GridResult(NamedTuple):
    z: np.ndarray
    F: float
    gap_bound: float


def hull_ranges(body) -> tuple[np.ndarray, np.ndarray]:
    """Range of each hull coordinate over the body (two LPs per coordinate)."""
    Bm, a = body.hull_basis, body.anchor
    lo, hi = [], []
    for j in range(Bm.shape[1]):
        c = Bm[:, j]
        up = lp_solve(c, body.A, body.b, body.E, body.f).value - c @ a
        dn = -lp_solve(-c, body.A, body.b, body.E, body.f).value - c @ a
        lo.append(dn)
        hi.append(up)
    return np.array(lo), np.array(hi)


def _chunk_best(objective, body, axes, start, stop):
    shape = tuple(len(ax) for ax in axes)
    idx = np.unravel_index(np.arange(start, stop), shape)
    W = np.column_stack([ax[i] for ax, i in zip(axes, idx)])
    X = body.from_hull(W)
    # snap rounding noise of the map back into the cube
    X = np.clip(X, 0.0, 1.0)
    ok = contains_many(body, X, body.tol)
    if not ok.any():
        return None
    Xf = X[ok]
    vals = objective.value(Xf)
    i = int(np.argmax(vals))
    return float(vals[i]), start + int(np.flatnonzero(ok)[i]), Xf[i]


def grid_maximize(objective, body, m: int, *, jobs: int = 1) -> GridResult:
    """Best feasible grid point and a Lipschitz gap bound.

    With spacing ``h_j = range_j / (m - 1)`` the gap is ``G ||h||``, which is
    ``G sqrt(k) / (m - 1)`` when every hull coordinate has unit range.
    Ties go to the first grid point in index (lexicographic) order.
    """
    spec = GridSpec(m, body)
    lo, hi = hull_ranges(body)
    axes = [np.linspace(l, h, spec.m) for l, h in zip(lo, hi)]
    total = spec.m ** len(axes)
    bounds = [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    if jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(jobs) as ex:
            parts = list(ex.map(lambda se: _chunk_best(objective, body, axes, *se), bounds))
    else:
        parts = [_chunk_best(objective, body, axes, *se) for se in bounds]
    parts = [p for p in parts if p is not None]
    if not parts:
        raise GridTooLarge("no grid point fell inside the body; increase m")
    # max value, then smallest index
    best = max(parts, key=lambda p: (p[0], -p[1]))
    h = (hi - lo) / (spec.m - 1)
    gap = float(objective.G * np.linalg.norm(h))
    return GridResult(best[2].copy(), best[0], gap)
