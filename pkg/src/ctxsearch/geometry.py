"""Convex polytopes in [0,1]^d as halfspace intersections.

The canonical representation is the halfspace list (rows of ``A x <= b``
with unit-norm rows, always containing the 2d box constraints).  Vertices
are computed on demand by enumerating d-subsets of constraints, solving
the d x d systems and filtering by feasibility; once a polytope carries a
vertex cache, clipping updates it incrementally (kept vertices plus
crossing-edge intersections), which is what keeps long cut sequences
cheap.  Polytopes are immutable: every mutation returns a new value.

Tolerances: feasibility and activity checks are absolute at 1e-9; vertices
closer than 1e-10 are merged.  Beyond ``ENUM_DIM_MAX`` dimensions the
vertex machinery is unavailable and directional extents fall back to
linear programming on the halfspace representation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

TAU_FEAS = 1e-9        # absolute feasibility slack
TAU_ACT = 1e-9         # activity (tightness) slack for pruning
VERTEX_MERGE_TOL = 1e-10
DEGENERATE_DIAM = 1e-8  # sets this small are numerically points: stop cutting
V_MAX_DEFAULT = 512    # halfspace-count guard for enumeration
ENUM_DIM_MAX = 8       # no vertex enumeration above this dimension
ENUM_BUDGET = 2_000_000  # cap on number of d-subsets to enumerate


class GeometryError(Exception):
    pass


class EmptyPolytopeError(GeometryError):
    pass


class TooManyConstraintsError(GeometryError):
    pass


class SliceOutOfRangeError(GeometryError):
    pass


@dataclass(frozen=True)
class Halfspace:
    """{ x : <normal, x> <= offset }; normal need not be unit length."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64)
        if n.ndim != 1 or not np.any(np.abs(n) > 0):
            raise GeometryError("halfspace normal must be a nonzero vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    def normalized(self) -> "Halfspace":
        s = float(np.linalg.norm(self.normal))
        return Halfspace(self.normal / s, self.offset / s)


@dataclass(frozen=True)
class DirectionalExtent:
    """Min and max of <u, x> over a polytope, plus their difference."""

    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _lexsorted(points: np.ndarray) -> np.ndarray:
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def _merge_close(points: np.ndarray, tol: float = VERTEX_MERGE_TOL) -> np.ndarray:
    """Drop points within tol (Chebyshev) of an earlier point, keep order."""
    if len(points) <= 1:
        return points
    keep = [0]
    for i in range(1, len(points)):
        d = np.max(np.abs(points[keep] - points[i]), axis=1)
        if np.all(d > tol):
            keep.append(i)
    return points[keep]


class Polytope:
    """Immutable bounded convex polytope inside [0,1]^d.

    ``A`` has unit rows; the first 2d rows are the box constraints
    -x_i <= 0 and x_i <= 1 and are never pruned.
    """

    __slots__ = ("dim", "A", "b", "generation", "_vertices", "_tight")

    def __init__(self, dim: int, A: np.ndarray, b: np.ndarray,
                 generation: int = 0, vertices: np.ndarray | None = None,
                 tight: np.ndarray | None = None):
        self.dim = int(dim)
        self.A = np.asarray(A, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.generation = int(generation)
        self._vertices = vertices
        self._tight = tight

    # -- construction -------------------------------------------------

    @staticmethod
    def unit_box(dim: int) -> "Polytope":
        if dim < 1:
            raise GeometryError("dimension must be >= 1")
        eye = np.eye(dim)
        A = np.vstack([-eye, eye])
        b = np.concatenate([np.zeros(dim), np.ones(dim)])
        return Polytope(dim, A, b)

    @staticmethod
    def from_halfspaces(dim: int, halfspaces: list[Halfspace]) -> "Polytope":
        """Unit box intersected with the given extra halfspaces."""
        p = Polytope.unit_box(dim)
        for h in halfspaces:
            p = clip(p, h)
        return p

    # -- basic queries -------------------------------------------------

    @property
    def n_halfspaces(self) -> int:
        return self.A.shape[0]

    @property
    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(self.A[i].copy(), float(self.b[i]))
                for i in range(self.A.shape[0])]

    def contains(self, x: np.ndarray, tol: float = TAU_FEAS) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(self.A @ x <= self.b + tol))

    @property
    def is_empty(self) -> bool:
        try:
            return len(self.vertices_array()) == 0
        except TooManyConstraintsError:
            return not _lp_feasible(self.A, self.b)

    def has_vertex_cache(self) -> bool:
        return self._vertices is not None

    # -- vertex machinery ----------------------------------------------

    def vertices_array(self) -> np.ndarray:
        """(n, d) extreme points, lexicographically sorted."""
        if self._vertices is None:
            self._vertices, self._tight = _enumerate_vertices(self.A, self.b, self.dim)
        return self._vertices

    def tight_matrix(self) -> np.ndarray:
        """(n_vertices, n_halfspaces) bool: constraint active at vertex."""
        if self._tight is None:
            X = self.vertices_array()
            self._tight = np.abs(X @ self.A.T - self.b) <= TAU_ACT
        return self._tight

    def edges(self) -> np.ndarray:
        """(m, 2) vertex-index pairs sharing >= d-1 active constraints."""
        X = self.vertices_array()
        n = len(X)
        if n < 2:
            return np.empty((0, 2), dtype=np.int64)
        if self.dim == 1:
            return np.array([[0, n - 1]], dtype=np.int64)
        T = self.tight_matrix().astype(np.float64)
        common = T @ T.T
        iu = np.triu_indices(n, k=1)
        mask = common[iu] >= self.dim - 1 - 0.5
        return np.stack([iu[0][mask], iu[1][mask]], axis=1)

    def facet_vertex_indices(self) -> list[np.ndarray]:
        """Per halfspace, indices of vertices active on it (may be empty)."""
        T = self.tight_matrix()
        return [np.flatnonzero(T[:, i]) for i in range(self.A.shape[0])]

    def __repr__(self):
        return (f"Polytope(dim={self.dim}, halfspaces={self.n_halfspaces}, "
                f"generation={self.generation})")


def _enumerate_vertices(A: np.ndarray, b: np.ndarray, dim: int,
                        v_max: int = V_MAX_DEFAULT):
    """Brute-force vertex enumeration over all d-subsets of constraints."""
    m = A.shape[0]
    if m > v_max:
        raise TooManyConstraintsError(
            f"{m} halfspaces exceeds the enumeration guard ({v_max})")
    if dim > ENUM_DIM_MAX:
        raise TooManyConstraintsError(
            f"vertex enumeration disabled for dim {dim} > {ENUM_DIM_MAX}")
    n_subsets = math.comb(m, dim)
    if n_subsets > ENUM_BUDGET:
        raise TooManyConstraintsError(
            f"C({m},{dim}) = {n_subsets} candidate bases exceeds budget")

    idx = np.array(list(itertools.combinations(range(m), dim)), dtype=np.int64)
    mats = A[idx]                                     # (k, d, d)
    rhs = b[idx]                                      # (k, d)
    dets = np.abs(np.linalg.det(mats))
    ok = dets > 1e-12
    if not np.any(ok):
        return np.empty((0, dim)), np.empty((0, m), dtype=bool)
    sols = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
    feas = np.all(sols @ A.T <= b + TAU_FEAS, axis=1)
    pts = sols[feas] + 0.0    # normalize -0.0
    if len(pts) == 0:
        return np.empty((0, dim)), np.empty((0, m), dtype=bool)
    pts = _merge_close(_lexsorted(pts))
    tight = np.abs(pts @ A.T - b) <= TAU_ACT
    return pts, tight


def _lp_feasible(A: np.ndarray, b: np.ndarray) -> bool:
    from scipy.optimize import linprog
    res = linprog(np.zeros(A.shape[1]), A_ub=A, b_ub=b,
                  bounds=[(None, None)] * A.shape[1], method="highs")
    return res.status == 0


def _lp_extent(A: np.ndarray, b: np.ndarray, u: np.ndarray) -> tuple[float, float]:
    from scipy.optimize import linprog
    lo = linprog(u, A_ub=A, b_ub=b, bounds=[(None, None)] * len(u), method="highs")
    hi = linprog(-u, A_ub=A, b_ub=b, bounds=[(None, None)] * len(u), method="highs")
    if lo.status != 0 or hi.status != 0:
        raise EmptyPolytopeError("polytope is empty or unbounded under LP")
    return float(lo.fun), float(-hi.fun)


def lp_support_point(P: Polytope, direction: np.ndarray) -> np.ndarray:
    """argmax <direction, x> over P via LP (usable in any dimension)."""
    from scipy.optimize import linprog
    res = linprog(-np.asarray(direction, dtype=np.float64), A_ub=P.A, b_ub=P.b,
                  bounds=[(None, None)] * P.dim, method="highs")
    if res.status != 0:
        raise EmptyPolytopeError("support LP infeasible")
    return np.asarray(res.x, dtype=np.float64)


# -- operations ---------------------------------------------------------


def clip(P: Polytope, h: Halfspace) -> Polytope:
    """Intersect P with h; prunes cut rows that lost all active vertices.

    The result may be empty or lower-dimensional; emptiness is a valid
    value for callers to check.  Box rows are always retained.
    """
    hn = h.normalized()
    a, c = hn.normal, hn.offset
    if a.shape != (P.dim,):
        raise GeometryError("halfspace dimension mismatch")

    if P._vertices is not None and P.dim <= ENUM_DIM_MAX:
        return _clip_incremental(P, a, c)

    A = np.vstack([P.A, a])
    b = np.concatenate([P.b, [c]])
    out = Polytope(P.dim, A, b, generation=P.generation + 1)
    if P.dim <= ENUM_DIM_MAX and math.comb(A.shape[0], P.dim) <= ENUM_BUDGET:
        out.vertices_array()
        return _pruned(out)
    return out


def _clip_incremental(P: Polytope, a: np.ndarray, c: float) -> Polytope:
    X = P.vertices_array()
    if len(X) == 0:
        return Polytope(P.dim, np.vstack([P.A, a]), np.concatenate([P.b, [c]]),
                        generation=P.generation + 1,
                        vertices=X, tight=np.empty((0, P.n_halfspaces + 1), bool))
    if len(X) > 1 and float(np.max(X.max(axis=0) - X.min(axis=0))) <= DEGENERATE_DIAM:
        # numerically a point: cuts can no longer be resolved within the
        # feasibility tolerance, so leave the set unchanged
        return Polytope(P.dim, P.A, P.b, generation=P.generation + 1,
                        vertices=P._vertices, tight=P._tight)
    s = X @ a - c
    if np.all(s <= TAU_FEAS):
        # non-binding: prune the new row entirely, keep the same geometry
        return Polytope(P.dim, P.A, P.b, generation=P.generation + 1,
                        vertices=P._vertices, tight=P._tight)
    kept_mask = s <= TAU_FEAS
    new_pts = []
    if np.any(kept_mask) and np.any(~kept_mask):
        E = P.edges()
        sa, sb = s[E[:, 0]], s[E[:, 1]]
        cross = (np.minimum(sa, sb) < -TAU_ACT) & (np.maximum(sa, sb) > TAU_ACT)
        if np.any(cross):
            ei = E[cross]
            si, sj = s[ei[:, 0]], s[ei[:, 1]]
            t = (si / (si - sj))[:, None]
            new_pts = X[ei[:, 0]] + t * (X[ei[:, 1]] - X[ei[:, 0]])

    pieces = [X[kept_mask]]
    if len(new_pts):
        pieces.append(new_pts)
    pts = (np.vstack(pieces) if pieces else np.empty((0, P.dim))) + 0.0

    A = np.vstack([P.A, a])
    b = np.concatenate([P.b, [c]])
    if len(pts) == 0:
        return Polytope(P.dim, A, b, generation=P.generation + 1,
                        vertices=np.empty((0, P.dim)),
                        tight=np.empty((0, A.shape[0]), bool))
    pts = _merge_close(_lexsorted(pts))
    # guard against drift: re-check feasibility against the full system
    feas = np.all(pts @ A.T <= b + 10 * TAU_FEAS, axis=1)
    pts = pts[feas]
    tight = np.abs(pts @ A.T - b) <= TAU_ACT
    out = Polytope(P.dim, A, b, generation=P.generation + 1,
                   vertices=pts, tight=tight)
    return _pruned(out)


def _pruned(P: Polytope) -> Polytope:
    """Drop non-box rows with no active vertex; box rows always stay."""
    tight = P.tight_matrix()
    n_box = 2 * P.dim
    active = tight.any(axis=0)
    keep = np.ones(P.n_halfspaces, dtype=bool)
    keep[n_box:] = active[n_box:]
    if np.all(keep):
        return P
    return Polytope(P.dim, P.A[keep], P.b[keep], generation=P.generation,
                    vertices=P._vertices, tight=tight[:, keep])


def extent(P: Polytope, u: np.ndarray) -> DirectionalExtent:
    """Directional extent (min, max of <u, x> over P)."""
    u = np.asarray(u, dtype=np.float64)
    if abs(np.linalg.norm(u) - 1.0) > 1e-6:
        raise GeometryError("direction must be a unit vector")
    if P.dim > ENUM_DIM_MAX and P._vertices is None:
        lo, hi = _lp_extent(P.A, P.b, u)
        return DirectionalExtent(lo, hi)
    X = P.vertices_array()
    if len(X) == 0:
        raise EmptyPolytopeError("extent of an empty polytope")
    dots = X @ u
    return DirectionalExtent(float(dots.min()), float(dots.max()))


def vertices(P: Polytope) -> list[np.ndarray]:
    """Extreme points in deterministic (lexicographic) order."""
    return [v.copy() for v in P.vertices_array()]


def cross_section(P: Polytope, u: np.ndarray, p: float) -> Polytope:
    """Slice {x in P : <u, x> = p} as a polytope carrying both cut rows.

    The result is (d-1)-dimensional; downstream intrinsic-volume code
    treats it by its affine hull.  A slice at the extent boundary may be
    a single point.
    """
    u = np.asarray(u, dtype=np.float64)
    ext = extent(P, u)
    if p < ext.lo - TAU_FEAS or p > ext.hi + TAU_FEAS:
        raise SliceOutOfRangeError(
            f"slice value {p} outside extent [{ext.lo}, {ext.hi}]")
    p = min(max(p, ext.lo), ext.hi)

    if P._vertices is not None and P.dim <= ENUM_DIM_MAX:
        pts = section_points(P, u, p)
        A = np.vstack([P.A, u, -u])
        b = np.concatenate([P.b, [p], [-p]])
        tight = np.abs(pts @ A.T - b) <= TAU_ACT
        return Polytope(P.dim, A, b, generation=P.generation + 1,
                        vertices=pts, tight=tight)
    lowered = clip(P, Halfspace(u, p))
    return clip(lowered, Halfspace(-u, -p))


def section_points(P: Polytope, u: np.ndarray, p: float) -> np.ndarray:
    """Vertices of the slice {<u,x> = p}: on-plane vertices plus edge cuts."""
    X = P.vertices_array()
    if len(X) == 0:
        return np.empty((0, P.dim))
    s = X @ u - p
    pts = [X[np.abs(s) <= TAU_ACT]]
    E = P.edges()
    if len(E):
        sa, sb = s[E[:, 0]], s[E[:, 1]]
        cross = (np.minimum(sa, sb) < -TAU_ACT) & (np.maximum(sa, sb) > TAU_ACT)
        if np.any(cross):
            ei = E[cross]
            si, sj = s[ei[:, 0]], s[ei[:, 1]]
            t = (si / (si - sj))[:, None]
            pts.append(X[ei[:, 0]] + t * (X[ei[:, 1]] - X[ei[:, 0]]))
    pts = np.vstack([q for q in pts if len(q)]) if any(len(q) for q in pts) \
        else np.empty((0, P.dim))
    return _merge_close(_lexsorted(pts))


# -- 2-D helpers (ordered polygons) --------------------------------------


def ordered_polygon_2d(points: np.ndarray) -> np.ndarray:
    """Counter-clockwise ordering of a convex 2-D point set's hull cycle."""
    pts = _merge_close(_lexsorted(np.asarray(points, dtype=np.float64)))
    if len(pts) <= 2:
        return pts
    center = pts.mean(axis=0)
    ang = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    return pts[np.argsort(ang, kind="stable")]


def polygon_area_perimeter(cycle: np.ndarray) -> tuple[float, float]:
    """Shoelace area and edge-length sum of an ordered convex cycle.

    Degenerate inputs follow the closed-walk convention: a segment has
    area 0 and perimeter twice its length; a point has (0, 0).
    """
    n = len(cycle)
    if n == 0:
        return 0.0, 0.0
    if n == 1:
        return 0.0, 0.0
    nxt = np.roll(cycle, -1, axis=0)
    area = 0.5 * float(np.sum(cycle[:, 0] * nxt[:, 1] - nxt[:, 0] * cycle[:, 1]))
    perim = float(np.sum(np.linalg.norm(nxt - cycle, axis=1)))
    return abs(area), perim
