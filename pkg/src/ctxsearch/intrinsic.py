"""Intrinsic volumes of convex polytopes, exact where cheap, else Monte Carlo.

The d+1 intrinsic volumes V_0..V_d interpolate between the Euler number
(V_0 = 1 for nonempty convex sets) and the ordinary volume V_d.  Exact
values are returned for axis-aligned boxes (elementary symmetric
polynomials of the side lengths), for bodies whose affine hull has
dimension <= 2 (length / area and semiperimeter), and for the top index
j = d (hull volume).  Everything else is estimated by averaging volumes
of projections onto random j-dimensional subspaces drawn from the
rotation-invariant distribution, rescaled by the projection constant

    C(d, j) * kappa_d / (kappa_j * kappa_{d-j})

(kappa_m the m-ball volume), which makes the average equal V_j and makes
estimates independent of the ambient embedding.

Projected volumes are exact per sample: width for j = 1, a facet-normal
sum for j = d-1 (the projected silhouette area), convex-hull volume of
the projected vertices otherwise.

The module also hosts the geometric self-check oracles used by the
``verify`` CLI suites: the tube-volume (Steiner) identity, the
isoperimetric chain, cone and cylinder comparisons, and valuation
additivity across a hyperplane split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    EmptyPolytopeError,
    GeometryError,
    Polytope,
    ordered_polygon_2d,
    polygon_area_perimeter,
)
from .rng import PortableRng

DEFAULT_BUDGET_LOW_DIM = 2000   # subspace samples per estimate, dim <= 4
DEFAULT_BUDGET_HIGH_DIM = 8000  # dim 5 or 6
RANK_TOL = 1e-9


def unit_ball_volume(m: int) -> float:
    """Volume of the unit m-ball; kappa_0 = 1."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return math.exp(0.5 * m * math.log(math.pi) - math.lgamma(0.5 * m + 1.0))


def projection_constant(d: int, j: int) -> float:
    """Rescaling that turns mean projected volume into V_j."""
    return (math.comb(d, j) * unit_ball_volume(d)
            / (unit_ball_volume(j) * unit_ball_volume(d - j)))


def elementary_symmetric(values: np.ndarray) -> np.ndarray:
    """e_0..e_n of the given values, by the standard recurrence."""
    e = np.zeros(len(values) + 1)
    e[0] = 1.0
    for v in values:
        e[1:] = e[1:] + v * e[:-1]
    return e


@dataclass(frozen=True)
class IntrinsicVolumeEstimate:
    j: int
    value: float
    half_width: float
    method: str   # exact-1d | exact-2d | exact-box | exact-volume | monte-carlo
    samples: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("intrinsic volumes are nonnegative")

    def contains(self, truth: float, slack: float = 1e-12) -> bool:
        return abs(self.value - truth) <= self.half_width + slack


@dataclass(frozen=True)
class ProjectionSample:
    subspace_basis: np.ndarray    # (j, d) orthonormal rows
    projected_volume: float


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: dict = field(default_factory=dict)


# -- point-set utilities --------------------------------------------------


def affine_coordinates(points: np.ndarray) -> tuple[np.ndarray, int]:
    """Coordinates of the points inside their affine hull, plus its dim."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) == 0:
        return pts, 0
    center = pts.mean(axis=0)
    centered = pts - center
    if len(pts) == 1:
        return np.zeros((1, 0)), 0
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * max(1.0, s[0] if len(s) else 1.0)))
    return centered @ vt[:rank].T, rank


def hull_volume(points: np.ndarray) -> float:
    """Exact k-dimensional volume of the convex hull of (n, k) points."""
    pts = np.asarray(points, dtype=np.float64)
    n, k = pts.shape if pts.ndim == 2 else (len(pts), 1)
    if n == 0:
        return 0.0
    if k == 0:
        return 0.0
    if k == 1:
        flat = pts.ravel()
        return float(flat.max() - flat.min())
    if k == 2:
        hull = convex_hull_2d(pts)
        area, _ = polygon_area_perimeter(hull)
        return area
    return _qhull_volume(pts)


def _qhull_volume(pts: np.ndarray) -> float:
    from scipy.spatial import ConvexHull, QhullError
    if len(pts) <= pts.shape[1]:
        return 0.0
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        try:
            return float(ConvexHull(pts, qhull_options="QJ").volume)
        except QhullError:
            return 0.0


def convex_hull_2d(pts: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, CCW, without the repeated endpoint."""
    pts = np.unique(np.asarray(pts, dtype=np.float64), axis=0)
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 1e-15:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def hull_facets(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(areas, outward unit normals) of hull boundary simplices.

    For 2-D point sets the "facets" are the polygon edges.  Used by the
    silhouette formula for projections onto hyperplanes.
    """
    pts = np.asarray(points, dtype=np.float64)
    k = pts.shape[1]
    if k == 2:
        cycle = convex_hull_2d(pts)
        if len(cycle) < 2:
            return np.zeros(0), np.zeros((0, 2))
        nxt = np.roll(cycle, -1, axis=0)
        edges = nxt - cycle
        lengths = np.linalg.norm(edges, axis=1)
        ok = lengths > 1e-14
        normals = np.stack([edges[ok, 1], -edges[ok, 0]], axis=1) / lengths[ok, None]
        return lengths[ok], normals
    from scipy.spatial import ConvexHull, QhullError
    try:
        hull = ConvexHull(pts)
    except QhullError:
        try:
            hull = ConvexHull(pts, qhull_options="QJ")
        except QhullError:
            return np.zeros(0), np.zeros((0, k))
    normals = hull.equations[:, :k]
    simplices = pts[hull.simplices]              # (F, k, k)
    base = simplices[:, 0:1, :]
    spans = simplices[:, 1:, :] - base           # (F, k-1, k)
    grams = spans @ np.transpose(spans, (0, 2, 1))
    dets = np.linalg.det(grams)
    areas = np.sqrt(np.maximum(dets, 0.0)) / math.factorial(k - 1)
    return areas, normals


def silhouette_volumes(areas: np.ndarray, normals: np.ndarray,
                       dirs: np.ndarray) -> np.ndarray:
    """Projected (d-1)-volumes onto the hyperplanes orthogonal to dirs.

    Each boundary point of a convex body is covered twice by the facet
    shadows, hence the factor 1/2.
    """
    if len(areas) == 0:
        return np.zeros(len(dirs))
    return 0.5 * (areas @ np.abs(normals @ dirs.T))


# -- the estimator --------------------------------------------------------


def _is_axis_aligned(P: Polytope) -> bool:
    nonzero = np.abs(P.A) > 1e-12
    return bool(np.all(nonzero.sum(axis=1) == 1))


def _box_sides(P: Polytope) -> np.ndarray:
    X = P.vertices_array()
    return X.max(axis=0) - X.min(axis=0)


def default_budget(dim: int) -> int:
    return DEFAULT_BUDGET_LOW_DIM if dim <= 4 else DEFAULT_BUDGET_HIGH_DIM


def mc_intrinsic_points(points: np.ndarray, j: int, budget: int,
                        rng: PortableRng) -> IntrinsicVolumeEstimate:
    """Random-projection estimate of V_j for a full-rank point cloud.

    ``points`` must be expressed in their own affine hull (n, k) with
    j <= k; the caller handles rank reduction and exact shortcuts.
    """
    pts = np.asarray(points, dtype=np.float64)
    k = pts.shape[1]
    if not 1 <= j <= k:
        raise ValueError("need 1 <= j <= intrinsic dimension")
    if j == k:
        v = hull_volume(pts)
        return IntrinsicVolumeEstimate(j, v, 0.0, "monte-carlo", budget)
    scale = projection_constant(k, j)
    if j == 1:
        dirs = rng.unit_vectors(budget, k)
        proj = pts @ dirs.T
        samples = proj.max(axis=0) - proj.min(axis=0)
    elif j == k - 1:
        areas, normals = hull_facets(pts)
        dirs = rng.unit_vectors(budget, k)
        samples = silhouette_volumes(areas, normals, dirs)
    else:
        samples = np.empty(budget)
        for i in range(budget):
            basis = rng.orthonormal_subspace(k, j)
            samples[i] = hull_volume(pts @ basis.T)
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(budget)) if budget > 1 else 0.0
    return IntrinsicVolumeEstimate(j, max(scale * mean, 0.0),
                                   1.96 * scale * se, "monte-carlo", budget)


def projection_samples(points: np.ndarray, j: int, m: int,
                       rng: PortableRng) -> list[ProjectionSample]:
    """A few explicit (basis, projected volume) draws, mainly for tests."""
    pts, rank = affine_coordinates(points)
    out = []
    for _ in range(m):
        basis = rng.orthonormal_subspace(rank, j)
        out.append(ProjectionSample(basis, hull_volume(pts @ basis.T)))
    return out


def intrinsic_volume_points(points: np.ndarray, j: int,
                            budget: int | None = None,
                            rng: PortableRng | None = None,
                            method: str = "auto") -> IntrinsicVolumeEstimate:
    """V_j of the convex hull of a point cloud in any ambient dimension."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) == 0:
        raise EmptyPolytopeError("no points")
    if j == 0:
        return IntrinsicVolumeEstimate(0, 1.0, 0.0, "exact-box", 0)
    coords, rank = affine_coordinates(pts)
    if j > rank:
        return IntrinsicVolumeEstimate(j, 0.0, 0.0, "exact-volume", 0)
    if method != "monte-carlo":
        if rank == 1:
            length = hull_volume(coords)
            if j == 1:
                return IntrinsicVolumeEstimate(1, length, 0.0, "exact-1d", 0)
        if rank == 2:
            cycle = ordered_polygon_2d(coords)
            area, perim = polygon_area_perimeter(cycle)
            value = 0.5 * perim if j == 1 else area
            return IntrinsicVolumeEstimate(j, value, 0.0, "exact-2d", 0)
        if j == rank:
            return IntrinsicVolumeEstimate(j, hull_volume(coords), 0.0,
                                           "exact-volume", 0)
    if method == "exact":
        raise GeometryError(f"no exact path for V_{j} of a rank-{rank} body")
    budget = budget if budget is not None else default_budget(rank)
    rng = rng if rng is not None else PortableRng(0)
    return mc_intrinsic_points(coords, j, budget, rng)


def intrinsic_volume(P: Polytope, j: int, budget: int | None = None,
                     rng: PortableRng | None = None,
                     method: str = "auto") -> IntrinsicVolumeEstimate:
    """V_j(P): exact for boxes / low dimension / j in {0, d}, else MC."""
    if not 0 <= j <= P.dim:
        raise ValueError("index out of range")
    X = P.vertices_array()
    if len(X) == 0:
        raise EmptyPolytopeError("intrinsic volume of an empty polytope")
    if j == 0:
        return IntrinsicVolumeEstimate(0, 1.0, 0.0, "exact-box", 0)
    if method != "monte-carlo" and _is_axis_aligned(P):
        sides = _box_sides(P)
        value = float(elementary_symmetric(sides)[j])
        return IntrinsicVolumeEstimate(j, value, 0.0, "exact-box", 0)
    return intrinsic_volume_points(X, j, budget=budget, rng=rng, method=method)


def intrinsic_profile(P: Polytope, budget: int | None = None,
                      rng: PortableRng | None = None) -> list[IntrinsicVolumeEstimate]:
    """Estimates for all indices 0..d."""
    return [intrinsic_volume(P, j, budget=budget, rng=rng)
            for j in range(P.dim + 1)]


def area_perimeter(P: Polytope | np.ndarray) -> tuple[float, float]:
    """Exact (area, perimeter) of a body whose affine hull is <= 2-dim.

    Segments return (0, twice the length); points return (0, 0).
    """
    pts = P.vertices_array() if isinstance(P, Polytope) else np.asarray(P)
    if len(pts) == 0:
        raise EmptyPolytopeError("no vertices")
    coords, rank = affine_coordinates(pts)
    if rank > 2:
        raise GeometryError("affine hull has dimension > 2")
    if rank == 0:
        return 0.0, 0.0
    if rank == 1:
        length = hull_volume(coords)
        return 0.0, 2.0 * length
    cycle = ordered_polygon_2d(coords)
    return polygon_area_perimeter(cycle)


# -- tube volume (Steiner) oracle -----------------------------------------


def _distances_to_hull_2d(query: np.ndarray, cycle: np.ndarray) -> np.ndarray:
    """Exact distances from (m, 2) points to a convex polygon (0 inside)."""
    m = len(query)
    if len(cycle) == 1:
        return np.linalg.norm(query - cycle[0], axis=1)
    a = cycle
    b = np.roll(cycle, -1, axis=0)
    ab = b - a                                         # (E, 2)
    denom = np.maximum((ab * ab).sum(axis=1), 1e-30)
    ap = query[:, None, :] - a[None, :, :]             # (m, E, 2)
    t = np.clip((ap * ab[None]).sum(axis=2) / denom, 0.0, 1.0)
    closest = a[None] + t[..., None] * ab[None]
    dist_edges = np.linalg.norm(query[:, None, :] - closest, axis=2).min(axis=1)
    if len(cycle) >= 3:
        cross = ab[None, :, 0] * ap[..., 1] - ab[None, :, 1] * ap[..., 0]
        inside = np.all(cross >= -1e-12, axis=1) | np.all(cross <= 1e-12, axis=1)
        dist_edges[inside] = 0.0
    return dist_edges


def _distances_to_hull_3d(query: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Exact distances from (m, 3) points to the hull of pts (0 inside)."""
    from scipy.spatial import ConvexHull
    hull = ConvexHull(pts)
    eq = hull.equations
    inside = np.all(query @ eq[:, :3].T + eq[:, 3] <= 1e-12, axis=1)
    dist = np.full(len(query), np.inf)
    tris = pts[hull.simplices]                        # (F, 3, 3)
    for tri in tris:
        dist = np.minimum(dist, _point_triangle_distance(query, tri))
    dist[inside] = 0.0
    return dist


def _point_triangle_distance(q: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Vectorized exact distance from points q (m,3) to one triangle."""
    a, bb, c = tri
    ab, ac = bb - a, c - a
    n = np.cross(ab, ac)
    nn = float(n @ n)
    if nn < 1e-30:
        # degenerate triangle: fall back to its edges
        d1 = _point_segment_distance(q, a, bb)
        d2 = _point_segment_distance(q, a, c)
        return np.minimum(d1, d2)
    ap = q - a
    # barycentric coordinates of the in-plane projection
    d00, d01, d11 = float(ab @ ab), float(ab @ ac), float(ac @ ac)
    d20 = ap @ ab
    d21 = ap @ ac
    denom = d00 * d11 - d01 * d01
    v = (d11 * d20 - d01 * d21) / denom
    w = (d00 * d21 - d01 * d20) / denom
    inside = (v >= 0) & (w >= 0) & (v + w <= 1)
    dist = np.empty(len(q))
    plane = np.abs(ap @ n) / math.sqrt(nn)
    dist[inside] = plane[inside]
    out = ~inside
    if np.any(out):
        qo = q[out]
        d = _point_segment_distance(qo, a, bb)
        d = np.minimum(d, _point_segment_distance(qo, bb, c))
        d = np.minimum(d, _point_segment_distance(qo, a, c))
        dist[out] = d
    return dist


def _point_segment_distance(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = max(float(ab @ ab), 1e-30)
    t = np.clip((q - a) @ ab / denom, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.linalg.norm(q - closest, axis=1)


def project_onto_hull(q: np.ndarray, points: np.ndarray,
                      penalty: float = 1e6) -> np.ndarray:
    """Projection of q onto conv(points) by nonnegative least squares.

    Reference implementation (quadratic minimization over hull weights)
    used to cross-check the exact facet distances.
    """
    from scipy.optimize import nnls
    V = np.asarray(points, dtype=np.float64)
    M = np.vstack([V.T, penalty * np.ones(len(V))])
    y = np.concatenate([q, [penalty]])
    lam, _ = nnls(M, y)
    s = lam.sum()
    if s <= 0:
        return V.mean(axis=0)
    return V.T @ (lam / s)


def distances_to_hull(query: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Exact distances to the hull for ambient dimension 1, 2 or 3."""
    pts = np.asarray(points, dtype=np.float64)
    d = pts.shape[1]
    if d == 1:
        lo, hi = pts.min(), pts.max()
        return np.maximum(np.maximum(lo - query[:, 0], query[:, 0] - hi), 0.0)
    if d == 2:
        return _distances_to_hull_2d(query, convex_hull_2d(pts))
    if d == 3:
        coords, rank = affine_coordinates(pts)
        if rank == 3:
            return _distances_to_hull_3d(query, pts)
        # flat body in 3-space: combine in-plane distance with plane offset
        center = pts.mean(axis=0)
        _, _, vt = np.linalg.svd(pts - center, full_matrices=True)
        off = (query - center) @ vt[rank:].T
        in_plane = (query - center) @ vt[:rank].T
        if rank == 2:
            planar = _distances_to_hull_2d(in_plane, convex_hull_2d(coords))
        elif rank == 1:
            seg = coords.ravel()
            planar = np.maximum(np.maximum(seg.min() - in_plane[:, 0],
                                           in_plane[:, 0] - seg.max()), 0.0)
        else:
            planar = np.zeros(len(query))
        return np.sqrt(planar ** 2 + (off ** 2).sum(axis=1))
    raise GeometryError("tube-volume sampling supports ambient dim <= 3")


def steiner_volume(P: Polytope | np.ndarray, eps: float,
                   rng: PortableRng | None = None,
                   n_samples: int = 40_000) -> tuple[float, float]:
    """(estimate, standard error) of Vol(P + eps * unit ball) by rejection.

    Samples the bounding box inflated by eps and tests distance to the
    body.  Test oracle for the tube-volume identity; not a hot path.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    pts = P.vertices_array() if isinstance(P, Polytope) else np.asarray(P, float)
    if len(pts) == 0:
        raise EmptyPolytopeError("no vertices")
    rng = rng if rng is not None else PortableRng(0)
    d = pts.shape[1]
    lo = pts.min(axis=0) - eps
    hi = pts.max(axis=0) + eps
    box_vol = float(np.prod(hi - lo))
    q = lo + rng.uniform(n_samples * d).reshape(n_samples, d) * (hi - lo)
    dist = distances_to_hull(q, pts)
    hits = dist <= eps
    p_hat = float(hits.mean())
    se = box_vol * math.sqrt(max(p_hat * (1 - p_hat), 0.0) / n_samples)
    return box_vol * p_hat, se


def steiner_prediction(estimates: list[IntrinsicVolumeEstimate],
                       eps: float) -> tuple[float, float]:
    """Tube volume predicted from V_0..V_d, with propagated half-width."""
    d = len(estimates) - 1
    value = 0.0
    hw = 0.0
    for j, est in enumerate(estimates):
        coef = unit_ball_volume(d - j) * eps ** (d - j)
        value += coef * est.value
        hw += coef * est.half_width
    return value, hw


def check_steiner(P: Polytope, eps: float, rng: PortableRng,
                  budget: int | None = None,
                  n_samples: int = 40_000) -> CheckResult:
    """Tube volume vs the intrinsic-volume expansion, within 3 joint SEs."""
    ests = [intrinsic_volume(P, j, budget=budget, rng=rng.spawn(j))
            for j in range(P.dim + 1)]
    predicted, pred_hw = steiner_prediction(ests, eps)
    measured, se = steiner_volume(P, eps, rng=rng.spawn(101), n_samples=n_samples)
    slack = 3.0 * se + pred_hw
    gap = abs(measured - predicted)
    return CheckResult(
        name="steiner",
        passed=bool(gap <= slack),
        margin=float(slack - gap),
        detail={"eps": eps, "predicted": predicted, "measured": measured,
                "mc_se": se, "prediction_hw": pred_hw},
    )


# -- inequality / identity oracles ---------------------------------------


def _normalized_potential(est: IntrinsicVolumeEstimate, i: int) -> tuple[float, float]:
    """(i! V_i)^(1/i) with a delta-method half-width."""
    base = math.factorial(i) * est.value
    if base <= 0:
        return 0.0, math.factorial(i) * est.half_width  # crude but safe
    val = base ** (1.0 / i)
    deriv = val / (i * est.value) if est.value > 0 else 0.0
    return val, deriv * est.half_width


def check_isoperimetric(P: Polytope, i: int, budget: int | None = None,
                        rng: PortableRng | None = None) -> CheckResult:
    """(i! V_i)^(1/i) >= ((i+1)! V_{i+1})^(1/(i+1)) within joint CI."""
    if not 1 <= i <= P.dim - 1:
        raise ValueError("need 1 <= i <= d-1")
    rng = rng if rng is not None else PortableRng(0)
    ei = intrinsic_volume(P, i, budget=budget, rng=rng.spawn(i))
    ej = intrinsic_volume(P, i + 1, budget=budget, rng=rng.spawn(i + 1))
    lhs, hw_l = _normalized_potential(ei, i)
    rhs, hw_r = _normalized_potential(ej, i + 1)
    slack = hw_l + hw_r
    return CheckResult(
        name="isoperimetric",
        passed=bool(lhs - rhs >= -slack),
        margin=float(lhs - rhs),
        detail={"i": i, "lhs": lhs, "rhs": rhs, "slack": slack},
    )


def cone_points(base_points: np.ndarray, apex_height: float) -> np.ndarray:
    """Vertices of the cone over a base, apex above the base centroid."""
    base = np.asarray(base_points, dtype=np.float64)
    k = base.shape[1]
    lifted = np.hstack([base, np.zeros((len(base), 1))])
    apex = np.concatenate([base.mean(axis=0), [apex_height]])
    return np.vstack([lifted, apex])


def prism_points(base_points: np.ndarray, height: float) -> np.ndarray:
    """Vertices of the orthogonal cylinder (prism) base x [0, height]."""
    base = np.asarray(base_points, dtype=np.float64)
    bottom = np.hstack([base, np.zeros((len(base), 1))])
    top = np.hstack([base, np.full((len(base), 1), height)])
    return np.vstack([bottom, top])


def check_cone_bound(base_points: np.ndarray, apex_height: float, j: int,
                     budget: int | None = None,
                     rng: PortableRng | None = None) -> CheckResult:
    """V_{j+1}(cone) >= apex_height * V_j(base) / (j+1) within joint CI."""
    if apex_height <= 0:
        raise ValueError("apex height must be positive")
    rng = rng if rng is not None else PortableRng(0)
    cone = cone_points(base_points, apex_height)
    lhs = intrinsic_volume_points(cone, j + 1, budget=budget, rng=rng.spawn(1))
    vbase = intrinsic_volume_points(base_points, j, budget=budget, rng=rng.spawn(2))
    rhs = apex_height * vbase.value / (j + 1)
    rhs_hw = apex_height * vbase.half_width / (j + 1)
    slack = lhs.half_width + rhs_hw + 1e-12   # roundoff at equality cases
    return CheckResult(
        name="cone",
        passed=bool(lhs.value - rhs >= -slack),
        margin=float(lhs.value - rhs),
        detail={"j": j, "lhs": lhs.value, "rhs": rhs, "slack": slack},
    )


def check_cylinder_identity(base_points: np.ndarray, height: float, j: int,
                            budget: int | None = None,
                            rng: PortableRng | None = None) -> CheckResult:
    """V_{j+1}(base x [0,h]) == V_{j+1}(base) + h V_j(base) within CI."""
    if height <= 0:
        raise ValueError("height must be positive")
    rng = rng if rng is not None else PortableRng(0)
    prism = prism_points(base_points, height)
    lhs = intrinsic_volume_points(prism, j + 1, budget=budget, rng=rng.spawn(1))
    v_hi = intrinsic_volume_points(base_points, j + 1, budget=budget, rng=rng.spawn(2)) \
        if j + 1 <= base_points.shape[1] + 1 else None
    v_hi_val = v_hi.value if v_hi is not None else 0.0
    v_hi_hw = v_hi.half_width if v_hi is not None else 0.0
    v_lo = intrinsic_volume_points(base_points, j, budget=budget, rng=rng.spawn(3))
    rhs = v_hi_val + height * v_lo.value
    slack = lhs.half_width + v_hi_hw + height * v_lo.half_width + 1e-9
    gap = abs(lhs.value - rhs)
    return CheckResult(
        name="cylinder",
        passed=bool(gap <= slack),
        margin=float(slack - gap),
        detail={"j": j, "lhs": lhs.value, "rhs": rhs, "slack": slack},
    )


def check_valuation_additivity(P: Polytope, u: np.ndarray, p: float, j: int,
                               budget: int | None = None,
                               rng: PortableRng | None = None) -> CheckResult:
    """V_j(S+) + V_j(S-) == V_j(S) + V_j(section) within joint CI."""
    from .geometry import Halfspace, clip, section_points
    rng = rng if rng is not None else PortableRng(0)
    minus = clip(P, Halfspace(u, p))
    plus = clip(P, Halfspace(-np.asarray(u), -p))
    sect = section_points(P, np.asarray(u, dtype=np.float64), p)
    if minus.is_empty or plus.is_empty or len(sect) == 0:
        return CheckResult("valuation", True, 0.0, {"degenerate": True})
    e_minus = intrinsic_volume(minus, j, budget=budget, rng=rng.spawn(1))
    e_plus = intrinsic_volume(plus, j, budget=budget, rng=rng.spawn(2))
    e_full = intrinsic_volume(P, j, budget=budget, rng=rng.spawn(3))
    e_sect = intrinsic_volume_points(sect, j, budget=budget, rng=rng.spawn(4))
    lhs = e_minus.value + e_plus.value
    rhs = e_full.value + e_sect.value
    slack = (e_minus.half_width + e_plus.half_width + e_full.half_width
             + e_sect.half_width + 1e-9)
    gap = abs(lhs - rhs)
    return CheckResult(
        name="valuation",
        passed=bool(gap <= slack),
        margin=float(slack - gap),
        detail={"j": j, "lhs": lhs, "rhs": rhs, "slack": slack},
    )
