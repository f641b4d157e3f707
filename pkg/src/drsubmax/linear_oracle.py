"""Dense two-phase simplex and the linear maximization oracle.

The solver works on ``max c.x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, x >= 0``.
Every feasible region used by the package lies in the unit cube, so the
problems are always bounded.  Among several optimal points the solver returns
the lexicographically smallest one, which makes every downstream argmax
deterministic.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import Infeasible, NumericalFailure

_PIVOT_TOL = 1e-11


class LpResult(NamedTuple):
    x: np.ndarray
    value: float


class _Tableau:
    """Simplex tableau; the last row holds reduced costs (optimal when >= 0)."""

    def __init__(self, T: np.ndarray, basis: list[int], n_struct: int):
        self.T = T
        self.basis = basis
        self.n_struct = n_struct
        self.bland = False
        self.degenerate = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j

    def set_objective(self, cost: np.ndarray) -> None:
        """Install ``max cost.x`` as the objective row for the current basis."""
        T = self.T
        ncol = T.shape[1] - 1
        row = np.zeros(ncol + 1)
        row[:ncol] = -cost
        cb = cost[self.basis]
        row += cb @ T[:-1]
        T[-1] = row

    def run(self, allowed: np.ndarray, tol: float) -> None:
        T = self.T
        m = self.m
        max_iter = 50 * (m + T.shape[1]) + 1000
        degenerate_limit = 3 * max(m, 1)
        for _ in range(max_iter):
            rc = T[-1, :-1]
            cand = np.flatnonzero(allowed & (rc < -tol))
            if cand.size == 0:
                return
            if self.bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmin(rc[cand])])
            col = T[:-1, j]
            rows = np.flatnonzero(col > _PIVOT_TOL)
            if rows.size == 0:
                raise NumericalFailure("unbounded direction in a bounded LP")
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tol]
            r = int(min(ties, key=lambda i: self.basis[i]))
            if best <= tol:
                self.degenerate += 1
                if self.degenerate > degenerate_limit:
                    self.bland = True
            self.pivot(r, j)
        raise NumericalFailure("simplex iteration limit reached")

    def solution(self) -> np.ndarray:
        x = np.zeros(self.T.shape[1] - 1)
        x[self.basis] = self.T[:-1, -1]
        return x


def _as_2d(A, n: int) -> np.ndarray:
    if A is None:
        return np.zeros((0, n))
    A = np.asarray(A, dtype=float)
    return A.reshape(-1, n)


def _solve_once(c, A_ub, b_ub, A_eq, b_eq, tol, lexicographic, bland):
    n = c.size
    m1, m2 = A_ub.shape[0], A_eq.shape[0]
    m = m1 + m2
    rows = np.zeros((m, n + m1))
    rhs = np.concatenate([b_ub, b_eq]).astype(float)
    rows[:m1, :n] = A_ub
    rows[:m1, n:] = np.eye(m1)
    rows[m1:, :n] = A_eq
    flip = rhs < 0
    rows[flip] *= -1.0
    rhs[flip] *= -1.0
    needs_art = np.ones(m, dtype=bool)
    needs_art[:m1] = flip[:m1]
    art_rows = np.flatnonzero(needs_art)
    n_art = art_rows.size
    ncol = n + m1 + n_art

    T = np.zeros((m + 1, ncol + 1))
    T[:m, : n + m1] = rows
    T[:m, -1] = rhs
    basis = [0] * m
    for i in range(m1):
        basis[i] = n + i
    for a, i in enumerate(art_rows):
        T[i, n + m1 + a] = 1.0
        basis[i] = n + m1 + a
    tab = _Tableau(T, basis, n)
    tab.bland = bland
    scale = max(1.0, float(np.abs(rhs).max(initial=0.0)))

    if n_art:
        cost1 = np.zeros(ncol)
        cost1[n + m1 :] = -1.0
        tab.set_objective(cost1)
        tab.run(np.ones(ncol, dtype=bool), tol)
        if tab.T[-1, -1] < -1e-8 * scale:
            raise Infeasible("no point satisfies the constraints")
        # drive artificials out of the basis; drop redundant rows
        r = 0
        while r < tab.m:
            if tab.basis[r] >= n + m1:
                cand = np.flatnonzero(np.abs(tab.T[r, : n + m1]) > 1e-9)
                if cand.size:
                    tab.pivot(r, int(cand[0]))
                else:
                    tab.T = np.delete(tab.T, r, axis=0)
                    del tab.basis[r]
                    continue
            r += 1
        tab.T = np.delete(tab.T, np.s_[n + m1 : ncol], axis=1)
        ncol = n + m1

    cost = np.zeros(ncol)
    cost[:n] = c
    tab.set_objective(cost)
    allowed = np.ones(ncol, dtype=bool)
    ctol = tol * max(1.0, float(np.abs(c).max(initial=0.0)))
    tab.run(allowed, ctol)

    if lexicographic:
        # Restrict to the optimal face (columns with positive reduced cost are
        # pinned at zero), then minimise x_0, x_1, ... in turn on that face.
        for j in range(n):
            nonbasic = np.ones(ncol, dtype=bool)
            nonbasic[tab.basis] = False
            allowed &= ~(nonbasic & (tab.T[-1, :-1] > ctol))
            if not np.any(allowed & nonbasic):
                break  # the face is a single vertex
            cost = np.zeros(ncol)
            cost[j] = -1.0
            tab.set_objective(cost)
            ctol = tol
            tab.run(allowed, tol)

    x = tab.solution()[:n]
    x[np.abs(x) < 1e-14] = 0.0
    return x


def lp_solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, tol=1e-9,
             lexicographic=True) -> LpResult:
    """Maximise ``c @ x`` over ``{x >= 0 : A_ub x <= b_ub, A_eq x = b_eq}``.

    Dantzig pricing, switching to Bland's rule after ``3 m`` degenerate
    pivots.  With ``lexicographic`` the lexicographically smallest optimal
    vertex is returned.

    Raises
    ------
    Infeasible
        If the constraint system is empty.
    NumericalFailure
        If the returned point violates the constraints even after a retry
        under Bland's rule.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    A_ub = _as_2d(A_ub, n)
    A_eq = _as_2d(A_eq, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape[0] != b_ub.size or A_eq.shape[0] != b_eq.size:
        raise ValueError("constraint matrix and rhs sizes differ")

    scale = max(1.0, float(np.abs(np.concatenate([b_ub, b_eq])).max(initial=0.0)))
    for bland in (False, True):
        try:
            x = _solve_once(c, A_ub, b_ub, A_eq, b_eq, tol, lexicographic, bland)
        except NumericalFailure:
            if bland:
                raise
            continue
        ok = x.min(initial=0.0) >= -1e-7
        if A_ub.shape[0]:
            ok &= bool(np.all(A_ub @ x <= b_ub + 1e-7 * scale))
        if A_eq.shape[0]:
            ok &= bool(np.all(np.abs(A_eq @ x - b_eq) <= 1e-7 * scale))
        if ok:
            x = np.maximum(x, 0.0)
            return LpResult(x, float(c @ x))
    raise NumericalFailure("simplex result violates constraints")


def lmo(body, direction, shift=None, cap=None, *, tol=1e-9, use_vertices=True) -> np.ndarray:
    """Linear maximization oracle over ``body - shift``.

    Returns ``v = x* - shift`` where ``x*`` maximises ``<direction, x>`` over
    the body, intersected with ``{x - shift <= cap}`` when ``cap`` is given.
    Ties go to the lexicographically smallest maximiser.  When the body has an
    enumerated vertex list and no cap applies, the argmax is taken over the
    vertices (same answer as the LP, much cheaper inside Frank-Wolfe loops).
    """
    g = np.asarray(direction, dtype=float)
    if not np.all(np.isfinite(g)):
        raise ValueError("LMO direction must be finite")
    d = g.size
    shift = np.zeros(d) if shift is None else np.asarray(shift, dtype=float)
    verts = getattr(body, "vertices", None)

    if cap is None and use_vertices and verts is not None:
        vals = verts @ g
        best = vals.max()
        # vertices are stored in lexicographic order
        i = int(np.flatnonzero(vals >= best - tol * max(1.0, np.abs(g).max()))[0])
        return verts[i] - shift

    A, b = body.A, body.b
    if cap is not None:
        cap = np.asarray(cap, dtype=float)
        A = np.vstack([A, np.eye(d)])
        b = np.concatenate([b, shift + cap])
    res = lp_solve(g, A, b, body.E, body.f, tol=tol)
    return res.x - shift
