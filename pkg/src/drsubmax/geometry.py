"""Polytopes inside the unit cube and their shrunken versions.

A :class:`ConvexBody` is ``{x : A x <= b, E x = f} ∩ [0, 1]^d``.  Building one
caches everything the optimizer needs: the affine hull, a Chebyshev center
``c`` with inradius ``r`` measured inside the hull, a diameter bound, the
smallest infinity norm over the body, and (when cheap) the vertex list.

:func:`shrink` produces ``(1 - delta/r) K + (delta/r) c``, the set from
which a ball of radius ``delta`` (inside the hull) always stays in ``K``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DegenerateHull, DeltaTooLarge
from .linear_oracle import lp_solve

IMPLIED_EQ_TOL = 1e-7
MAX_VERTICES = 2 ** 12
MAX_VERTEX_COMBINATIONS = 200_000


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ConvexBody:
    A: np.ndarray
    b: np.ndarray
    E: np.ndarray
    f: np.ndarray
    d: int
    anchor: np.ndarray
    hull_basis: np.ndarray
    cheb_center: np.ndarray
    inradius: float
    diameter_bound: float
    diameter_exact: bool
    min_inf_norm: float
    contains_origin: bool
    down_closed: bool
    vertices: np.ndarray | None = None
    implied_rows: tuple[int, ...] = ()
    tol: float = 1e-9
    n_user_rows: int = 0

    @property
    def hull_dim(self) -> int:
        return self.hull_basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        """Orthogonal projection onto the linear space parallel to aff(K)."""
        return self.hull_basis @ self.hull_basis.T

    def to_hull(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.anchor) @ self.hull_basis

    def from_hull(self, w) -> np.ndarray:
        return self.anchor + np.asarray(w, dtype=float) @ self.hull_basis.T

    def to_dict(self) -> dict:
        n = self.n_user_rows
        return {
            "d": self.d,
            "A": self.A[:n].tolist(),
            "b": self.b[:n].tolist(),
            "E": self.E.tolist(),
            "f": self.f.tolist(),
            "flags": {"down_closed": self.down_closed},
        }


@dataclass(frozen=True, eq=False)
class ShrunkenBody:
    parent: ConvexBody
    delta: float
    b: np.ndarray
    f: np.ndarray
    vertices: np.ndarray | None = field(default=None)

    @property
    def A(self) -> np.ndarray:
        return self.parent.A

    @property
    def E(self) -> np.ndarray:
        return self.parent.E

    @property
    def d(self) -> int:
        return self.parent.d

    @property
    def hull_basis(self) -> np.ndarray:
        return self.parent.hull_basis

    @property
    def hull_dim(self) -> int:
        return self.parent.hull_dim

    @property
    def tol(self) -> float:
        return self.parent.tol

    @property
    def ratio(self) -> float:
        """``delta / r``."""
        return self.delta / self.parent.inradius

    @property
    def outer_margin(self) -> float:
        return self.delta * self.parent.diameter_bound / self.parent.inradius

    def psi(self, x) -> np.ndarray:
        """The affine map ``x -> (1 - delta/r) x + (delta/r) c`` from K onto K_delta."""
        t = self.ratio
        return (1.0 - t) * np.asarray(x, dtype=float) + t * self.parent.cheb_center


# ---------------------------------------------------------------------------
# construction

def _cube_rows(d: int) -> tuple[np.ndarray, np.ndarray]:
    A = np.vstack([np.eye(d), -np.eye(d)])
    b = np.concatenate([np.ones(d), np.zeros(d)])
    return A, b


def _canonical_basis(N: np.ndarray) -> np.ndarray:
    """Make a null-space basis reproducible: identity if full, sign-fixed otherwise."""
    d, k = N.shape
    if k == d:
        return np.eye(d)
    # reduced orthonormal basis; flip each column so its first significant entry is positive
    Q, _ = np.linalg.qr(N)
    for j in range(k):
        col = Q[:, j]
        i = int(np.flatnonzero(np.abs(col) > 1e-12)[0])
        if col[i] < 0:
            Q[:, j] = -col
    return Q


def affine_hull(A, b, E, f, tol: float = 1e-9):
    """Anchor, orthonormal basis and dimension of aff(K).

    Inequalities that are tight on all of K are detected with one LP per row
    (``min a_i.x == b_i``) and folded into the equality system.  Rows already
    seen slack at some feasible point are skipped.

    Returns ``(anchor, basis, k, implied_rows)``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    E = np.asarray(E, dtype=float).reshape(-1, A.shape[1])
    f = np.asarray(f, dtype=float)
    d = A.shape[1]

    first = lp_solve(np.zeros(d), A, b, E, f, tol=tol).x
    known = [first]
    implied = []
    for i in range(A.shape[0]):
        if any(b[i] - A[i] @ p > IMPLIED_EQ_TOL for p in known):
            continue
        res = lp_solve(-A[i], A, b, E, f, tol=tol)
        known.append(res.x)
        if b[i] - A[i] @ res.x <= IMPLIED_EQ_TOL:
            implied.append(i)

    M = np.vstack([E, A[implied]]) if (E.size or implied) else np.zeros((0, d))
    if M.shape[0]:
        _, s, Vt = np.linalg.svd(M)
        rank = int(np.sum(s > 1e-10 * max(1.0, s.max())))
        N = Vt[rank:].T
    else:
        N = np.eye(d)
    k = N.shape[1]
    if k == 0:
        raise DegenerateHull("feasible set is a single point")
    anchor = np.mean(known, axis=0)
    return anchor, _canonical_basis(N), k, tuple(implied)


def chebyshev_center(A, b, E, f, basis, implied=(), tol: float = 1e-9):
    """Largest ball inside the polytope, measured within the affine hull.

    Solves ``max r  s.t.  a_i.c + r ||P a_i|| <= b_i`` with ``c`` on the hull
    via a single LP in ``(c, r)``; ties are broken towards the
    lexicographically smallest center.
    """
    A = np.asarray(A, dtype=float)
    d = A.shape[1]
    norms = np.linalg.norm(A @ basis, axis=1)
    live = norms > 1e-12
    live[list(implied)] = False
    A_ub = np.hstack([A[live], norms[live, None]])
    b_ub = np.asarray(b, dtype=float)[live]
    eq_rows = [np.asarray(E, dtype=float).reshape(-1, d)]
    eq_rhs = [np.asarray(f, dtype=float)]
    if implied:
        eq_rows.append(A[list(implied)])
        eq_rhs.append(np.asarray(b, dtype=float)[list(implied)])
    E2 = np.vstack(eq_rows)
    A_eq = np.hstack([E2, np.zeros((E2.shape[0], 1))])
    b_eq = np.concatenate(eq_rhs)
    cost = np.zeros(d + 1)
    cost[-1] = 1.0
    res = lp_solve(cost, A_ub, b_ub, A_eq, b_eq, tol=tol)
    c, r = res.x[:d], float(res.x[-1])
    if r <= 1e-12:
        raise DegenerateHull("inradius is zero")
    return c, r


def _enumerate_vertices(A, b, anchor, basis):
    """Vertices via all k-subsets of active rows, in hull coordinates."""
    k = basis.shape[1]
    Aw = A @ basis
    bw = b - A @ anchor
    live = np.linalg.norm(Aw, axis=1) > 1e-12
    Aw, bw = Aw[live], bw[live]
    q = Aw.shape[0]
    if math.comb(q, k) > MAX_VERTEX_COMBINATIONS:
        return None
    combos = np.array(list(itertools.combinations(range(q), k)), dtype=int)
    M = Aw[combos]
    rhs = bw[combos]
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-10
    if not np.any(ok):
        return None
    W = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
    feas = np.all(W @ Aw.T <= bw + 1e-9, axis=1)
    W = W[feas]
    X = anchor + W @ basis.T
    X = np.round(X, 12) + 0.0
    X = np.unique(X, axis=0)  # sorted lexicographically
    if X.shape[0] > MAX_VERTICES:
        return None
    return X


def _min_inf_norm(A, b, E, f, tol):
    d = A.shape[1]
    # variables (z, t): min t s.t. z_i - t <= 0
    A_ub = np.vstack([
        np.hstack([A, np.zeros((A.shape[0], 1))]),
        np.hstack([np.eye(d), -np.ones((d, 1))]),
    ])
    b_ub = np.concatenate([b, np.zeros(d)])
    E = np.asarray(E, dtype=float).reshape(-1, d)
    A_eq = np.hstack([E, np.zeros((E.shape[0], 1))])
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    res = lp_solve(cost, A_ub, b_ub, A_eq, np.asarray(f, dtype=float), tol=tol)
    return res.x[:d]


def _rows_down_closed(A, b, tol):
    # sup over y in [0, x] of a.y is a+.x, so K is down-closed iff max_K a+.x <= b per row
    for a, bi in zip(A, b):
        if np.all(a >= 0):
            continue
        top = lp_solve(np.maximum(a, 0.0), A, b, tol=tol).value
        if top > bi + IMPLIED_EQ_TOL:
            return False
    return True


def build_body(A=None, b=None, E=None, f=None, *, d: int | None = None, flags=None,
               tol: float = 1e-9) -> ConvexBody:
    """Build a :class:`ConvexBody` from ``A x <= b, E x = f``; cube rows are added.

    ``flags`` may set ``down_closed`` explicitly; otherwise it is detected
    exactly for inequality-only bodies containing the origin (one LP per row
    with negative coefficients).

    Raises :class:`Infeasible` for an empty set and :class:`DegenerateHull`
    when the set is a single point.
    """
    flags = dict(flags or {})
    if d is None:
        for M in (A, E):
            if M is not None and np.size(M):
                d = np.asarray(M).reshape(np.shape(M)[0], -1).shape[1]
                break
        else:
            raise ValueError("dimension d is required when no constraints are given")
    A_user = np.zeros((0, d)) if A is None else np.asarray(A, dtype=float).reshape(-1, d)
    b_user = np.zeros(0) if b is None else np.asarray(b, dtype=float).ravel()
    E = np.zeros((0, d)) if E is None else np.asarray(E, dtype=float).reshape(-1, d)
    f = np.zeros(0) if f is None else np.asarray(f, dtype=float).ravel()
    if A_user.shape[0] != b_user.size or E.shape[0] != f.size:
        raise ValueError("constraint matrix and rhs sizes differ")

    Ac, bc = _cube_rows(d)
    A_full = np.vstack([A_user, Ac])
    b_full = np.concatenate([b_user, bc])

    anchor, basis, k, implied = affine_hull(A_full, b_full, E, f, tol)
    c, r = chebyshev_center(A_full, b_full, E, f, basis, implied, tol)
    verts = _enumerate_vertices(A_full, b_full, c, basis)
    if verts is not None and verts.shape[0] >= 2:
        D, exact = float(pdist(verts).max()), True
    else:
        D, exact = math.sqrt(d), False
        verts = None if verts is None or verts.shape[0] < 2 else verts
    z = _min_inf_norm(A_full, b_full, E, f, tol)
    h = float(np.abs(z).max())

    body = ConvexBody(
        A=_frozen(A_full), b=_frozen(b_full), E=_frozen(E), f=_frozen(f), d=d,
        anchor=_frozen(c), hull_basis=_frozen(basis), cheb_center=_frozen(c),
        inradius=r, diameter_bound=D, diameter_exact=exact, min_inf_norm=h,
        contains_origin=False, down_closed=False,
        vertices=None if verts is None else _frozen(verts),
        implied_rows=implied, tol=tol, n_user_rows=A_user.shape[0],
    )
    has_origin = contains(body, np.zeros(d), tol=1e-9)
    if "down_closed" in flags:
        dc = bool(flags["down_closed"])
    else:
        dc = has_origin and E.shape[0] == 0 and _rows_down_closed(A_full, b_full, tol)
    object.__setattr__(body, "contains_origin", has_origin)
    object.__setattr__(body, "down_closed", dc)
    return body


def box(lo, hi, d: int | None = None) -> ConvexBody:
    """Axis-aligned box ``[lo, hi]`` (scalars broadcast to ``d`` coordinates)."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if d is not None:
        lo = np.broadcast_to(lo, (d,))
        hi = np.broadcast_to(hi, (d,))
    d = max(lo.size, hi.size)
    lo, hi = np.broadcast_to(lo, (d,)), np.broadcast_to(hi, (d,))
    I = np.eye(d)
    return build_body(np.vstack([I, -I]), np.concatenate([hi, -lo]), d=d)


def body_from_dict(spec: dict, tol: float = 1e-9) -> ConvexBody:
    """Build from the JSON layout ``{"d", "A", "b", "E", "f", "flags"}``."""
    d = int(spec["d"])
    return build_body(
        spec.get("A") or None, spec.get("b") or None,
        spec.get("E") or None, spec.get("f") or None,
        d=d, flags=spec.get("flags"), tol=tol,
    )


def load_body(path) -> ConvexBody:
    return body_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# shrinking, membership, starting point

def shrink(body: ConvexBody, delta: float) -> ShrunkenBody:
    """``K_delta = (1 - delta/r) K + (delta/r) c`` in polytope form."""
    delta = float(delta)
    r = body.inradius
    if delta < 0:
        raise DeltaTooLarge("delta must be non-negative")
    if delta > 0 and delta >= r:
        raise DeltaTooLarge(f"delta={delta} must be below the inradius r={r}")
    if delta == 0:
        return ShrunkenBody(body, 0.0, body.b, body.f, body.vertices)
    t = delta / r
    c = body.cheb_center
    b_new = _frozen((1 - t) * body.b + t * (body.A @ c))
    f_new = _frozen((1 - t) * body.f + t * (body.E @ c)) if body.f.size else body.f
    verts = None
    if body.vertices is not None:
        verts = _frozen((1 - t) * body.vertices + t * c)
    return ShrunkenBody(body, delta, b_new, f_new, verts)


def contains(body, x, tol: float = 1e-9) -> bool:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        return False
    return bool(contains_many(body, x[None, :], tol)[0])


def contains_many(body, X, tol: float = 1e-9) -> np.ndarray:
    """Row-wise membership test for a batch of points."""
    X = np.asarray(X, dtype=float)
    ok = np.all(X @ body.A.T <= body.b + tol, axis=1)
    if body.E.shape[0]:
        ok &= np.all(np.abs(X @ body.E.T - body.f) <= tol, axis=1)
    ok &= np.all((X >= -tol) & (X <= 1 + tol), axis=1)
    return ok


def min_inf_norm_point(body) -> np.ndarray:
    """Lexicographically smallest point of ``argmin_{z in body} ||z||_inf``."""
    return _min_inf_norm(np.asarray(body.A), np.asarray(body.b), body.E, body.f, body.tol)


# ---------------------------------------------------------------------------
# sampling helpers used by tests and audit scripts

def sample_hull_sphere(body, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` uniform unit vectors in the linear space parallel to aff(K)."""
    B = body.hull_basis
    g = rng.standard_normal((n, B.shape[1]))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g @ B.T


def sample_points(body, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random points of the body: all vertices plus Dirichlet mixtures of them."""
    V = body.vertices
    if V is None:
        raise ValueError("sampling needs an enumerated vertex list")
    w = rng.dirichlet(np.full(V.shape[0], 0.5), size=max(n - V.shape[0], 0))
    return np.vstack([V, w @ V])[:n] if n >= V.shape[0] else V[rng.choice(V.shape[0], n, replace=False)]
