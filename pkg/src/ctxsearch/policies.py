"""Guessing policies mapping (knowledge set, context) -> guess.

Shipped policies, by registry name:

* ``midpoint1d``  - 1-D bisection (midpoint of the current interval).
* ``kl1d``        - 1-D doubly-exponential pricing search (horizon-aware).
* ``sym2d``       - 2-D two-potential rule: midpoint cut when the set is
                    long in the context direction, exact equal-area cut
                    otherwise.
* ``price2d``     - 2-D bucketed pricing rule over normalized area and
                    perimeter with doubly-exponential bucket levels.
* ``symsearch``   - d-dimensional search that equalizes one intrinsic
                    volume per round, the index picked from a ladder of
                    normalized slice potentials.
* ``pricesearch`` - d-dimensional bucketed pricing variant that carves a
                    fixed amount of one intrinsic volume per round.
* ``widthhalf``   - always cuts the directional width in half.
* ``volhalf``     - always cuts the volume in half (exact bisection).

All estimator-backed policies reuse one fixed set of random projection
directions for every candidate cut inside a round (common random
numbers), which keeps the estimated side-volumes exactly monotone in the
cut position and the bisections well-posed.  Above ``EXACT_DIM_MAX``
dimensions the vertex machinery is unavailable and ``symsearch`` falls
back to cutting at the support-cloud centroid (a volume-halving-style
deep cut computed from LP support points); see the package docs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    EmptyPolytopeError,
    GeometryError,
    Polytope,
    extent,
    lp_support_point,
    ordered_polygon_2d,
    polygon_area_perimeter,
)
from .intrinsic import (
    intrinsic_volume_points,
    projection_constant,
)
from .rng import PortableRng

TAU_SPLIT = 0.02            # relative imbalance tolerance for equal splits
DROP_TOL_REL = 0.01         # relative tolerance for fixed-drop cuts
DEGENERATE_WIDTH = 1e-7     # below this the cut position no longer matters
BISECT_MAX_ITERS = 60
BUDGET_BISECT = 256         # direction budget inside bisections (CRN tier)
BUDGET_REPORT_LOW = 2000    # reported-estimate budget, dim <= 4
BUDGET_REPORT_HIGH = 8000   # dim 5..6
EXACT_DIM_MAX = 6           # exact vertex machinery up to here
SUPPORT_CLOUD_SIZE = 192    # LP support points per round in high dimension
ESCALATION_STEPS = 3


class EstimatorFailure(Exception):
    """Raised when confidence intervals cannot certify a selection."""


def constant_ladder(d: int) -> np.ndarray:
    """c_0..c_d with c_0 = 1 and c_i = c_{i-1} / (2i)."""
    c = np.ones(d + 1)
    for i in range(1, d + 1):
        c[i] = c[i - 1] / (2 * i)
    return c


def _ladder_value(v: float, hw: float, c_i: float, i: int) -> tuple[float, float]:
    """L = (v / c_i)^(1/i) with a delta-method half-width."""
    if v <= 0:
        return 0.0, ((hw / c_i) ** (1.0 / i) if hw > 0 else 0.0)
    L = (v / c_i) ** (1.0 / i)
    return L, L * hw / (i * v)


def _solve_increasing(f, a: float, b: float, tol_f: float,
                      max_iter: int = BISECT_MAX_ITERS) -> tuple[float, float]:
    """Root of an increasing f on [a, b] to |f| <= tol_f (Illinois method).

    Assumes f(a) <= 0 <= f(b); exact on linear pieces, so piecewise
    polynomial profiles converge in a handful of evaluations.
    """
    fa = f(a)
    if fa >= -tol_f:
        return a, fa
    fb = f(b)
    if fb <= tol_f:
        return b, fb
    p, fp = 0.5 * (a + b), None
    side = 0
    for _ in range(max_iter):
        p = b - fb * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
        if not a < p < b:
            p = 0.5 * (a + b)
        fp = f(p)
        if abs(fp) <= tol_f or (b - a) <= 1e-14 * max(abs(a), abs(b), 1.0):
            return p, fp
        if fp < 0:
            a, fa = p, fp
            if side == -1:
                fb *= 0.5
            side = -1
        else:
            b, fb = p, fp
            if side == 1:
                fa *= 0.5
            side = 1
    return p, fp


@dataclass(frozen=True)
class BucketLadder:
    """Doubly-exponential levels scale*exp(-alpha^k), k in Z.

    ``bucket(x)`` returns the k with x in (level(k+1), level(k)].  Values
    at or above every level (possible early in a game, when potentials
    start at their maxima) fall into a single clamped bucket ``k_min``.
    """

    scale: float
    alpha: float
    k_min: int = -60
    k_max: int = 400

    def level(self, k: int) -> float:
        k = min(k, self.k_max)
        return self.scale * math.exp(-self.alpha ** k)

    def bucket(self, x: float) -> int:
        if x <= 0:
            raise ValueError("bucket of a nonpositive value")
        y = math.log(self.scale / x) if x < self.scale else 0.0
        if y <= 0:
            return self.k_min
        k = int(math.floor(math.log(y) / math.log(self.alpha)))
        k = max(min(k, self.k_max), self.k_min)
        while k > self.k_min and self.level(k) < x:
            k -= 1
        while k < self.k_max and self.level(k + 1) >= x:
            k += 1
        return k


def pricing_ladder(d: int, beta: float | None = None) -> BucketLadder:
    """d-dimensional pricing levels d^2 exp(-alpha^k), alpha = 1 + beta/d."""
    b = 1.0 if beta is None else float(beta)
    return BucketLadder(scale=float(d * d), alpha=1.0 + b / d)


def pricing_ladder_2d() -> BucketLadder:
    """The planar pricing levels exp(-1.5^k)."""
    return BucketLadder(scale=1.0, alpha=1.5)


@dataclass
class PolicyDiagnostics:
    """Per-round internals: chosen index, ladder values, potentials."""

    chosen_j: int | None = None
    chosen_J: int | None = None
    w: float = 0.0
    L: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    k: list = field(default_factory=list)
    potential: float = 0.0
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "chosen_j": self.chosen_j,
            "chosen_J": self.chosen_J,
            "w": self.w,
            "L": list(self.L),
            "phi": list(self.phi),
            "k": list(self.k),
            "potential": self.potential,
        }
        out.update(self.extra)
        return out


# ---------------------------------------------------------------------
# one-dimensional policies
# ---------------------------------------------------------------------


class MidpointPolicy1D:
    """Guess the midpoint of the current interval."""

    name = "midpoint1d"
    last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        if state.dim != 1:
            raise GeometryError("midpoint1d needs a 1-D state")
        ext = extent(state, u)
        self.last_diagnostics = {"w": ext.width / 2.0}
        return 0.5 * (ext.lo + ext.hi)


class KleinbergLeightonPolicy1D:
    """1-D pricing guesses a + 2^(-2^k), k = floor(1 + log2 log2 (1/len)).

    Once the interval is no longer than 1/T it prices at the lower end,
    guaranteeing a sale with loss at most 1/T per round.
    """

    name = "kl1d"

    def __init__(self, T: int):
        if T < 1:
            raise ValueError("horizon must be positive")
        self.T = int(T)
        self.last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        if state.dim != 1:
            raise GeometryError("kl1d needs a 1-D state")
        ext = extent(state, u)
        a, delta = ext.lo, ext.width
        if delta <= 1.0 / self.T:
            self.last_diagnostics = {"w": delta / 2, "k": [], "phase": "floor"}
            return a
        k = kl_bucket_index(delta)
        p = a + 2.0 ** -(2.0 ** k)
        self.last_diagnostics = {"w": delta / 2, "k": [k], "phase": "search"}
        return p


def kl_bucket_index(delta: float) -> int:
    """floor(1 + log2 log2 (1/delta)), clamped to 0 for long intervals."""
    if delta >= 1.0:
        return 0
    inner = math.log2(1.0 / delta)
    if inner <= 0.0:
        return 0
    return max(0, int(math.floor(1.0 + math.log2(inner))))


# ---------------------------------------------------------------------
# exact planar machinery
# ---------------------------------------------------------------------


class SectionProfile2D:
    """Exact directional profile of a convex polygon.

    Precomputes, for a CCW vertex cycle and a unit direction, the sorted
    breakpoint levels together with chord lengths, swept areas and
    boundary arc lengths, all exact piecewise polynomials in the cut
    level.  Supports closed-form equal-area and perimeter-target cuts.
    """

    def __init__(self, cycle: np.ndarray, u: np.ndarray):
        self.cycle = np.asarray(cycle, dtype=np.float64)
        self.u = np.asarray(u, dtype=np.float64)
        self.dots = self.cycle @ self.u
        self.lo = float(self.dots.min())
        self.hi = float(self.dots.max())
        self.levels = np.unique(self.dots)
        self.chords = np.array([self._chord(p) for p in self.levels])
        # exact swept area below each level: chord is linear per segment
        gaps = np.diff(self.levels)
        trap = 0.5 * (self.chords[:-1] + self.chords[1:]) * gaps
        self.area_below_levels = np.concatenate([[0.0], np.cumsum(trap)])
        self.area = float(self.area_below_levels[-1])
        nxt = np.roll(self.cycle, -1, axis=0)
        self.edge_len = np.linalg.norm(nxt - self.cycle, axis=1)
        self.perimeter = float(self.edge_len.sum())
        self._edge_dots = np.stack([self.dots, np.roll(self.dots, -1)], axis=1)

    def _chord(self, p: float) -> float:
        """Length of the section segment at level p (0 at the extremes)."""
        pts = []
        n = len(self.cycle)
        for i in range(n):
            a, b = self.cycle[i], self.cycle[(i + 1) % n]
            da, db = self.dots[i], self.dots[(i + 1) % n]
            if (da - p) * (db - p) < 0:
                t = (p - da) / (db - da)
                pts.append(a + t * (b - a))
            elif abs(da - p) <= 1e-14:
                pts.append(a)
        if len(pts) < 2:
            return 0.0
        arr = np.array(pts)
        d2 = ((arr[:, None, :] - arr[None, :, :]) ** 2).sum(axis=2)
        return float(np.sqrt(d2.max()))

    def chord_at(self, p: float) -> float:
        p = min(max(p, self.lo), self.hi)
        i = np.searchsorted(self.levels, p, side="right") - 1
        i = min(max(i, 0), len(self.levels) - 2) if len(self.levels) > 1 else 0
        if len(self.levels) == 1:
            return 0.0
        p0, p1 = self.levels[i], self.levels[i + 1]
        if p1 <= p0:
            return float(self.chords[i])
        t = (p - p0) / (p1 - p0)
        return float((1 - t) * self.chords[i] + t * self.chords[i + 1])

    @property
    def h_max(self) -> float:
        return float(self.chords.max()) if len(self.chords) else 0.0

    def area_below(self, p: float) -> float:
        p = min(max(p, self.lo), self.hi)
        i = np.searchsorted(self.levels, p, side="right") - 1
        i = min(max(i, 0), len(self.levels) - 2) if len(self.levels) > 1 else 0
        if len(self.levels) == 1:
            return 0.0
        p0 = self.levels[i]
        h0 = self.chords[i]
        h = self.chord_at(p)
        return float(self.area_below_levels[i] + 0.5 * (h0 + h) * (p - p0))

    def solve_area_below(self, target: float) -> float:
        """Exact p with swept area below equal to target (clamped)."""
        target = min(max(target, 0.0), self.area)
        i = int(np.searchsorted(self.area_below_levels, target, side="right") - 1)
        i = min(max(i, 0), len(self.levels) - 2)
        p0, p1 = float(self.levels[i]), float(self.levels[i + 1])
        a0 = float(self.area_below_levels[i])
        h0, h1 = float(self.chords[i]), float(self.chords[i + 1])
        need = target - a0
        seg = p1 - p0
        if seg <= 0 or need <= 0:
            return p0
        slope = (h1 - h0) / seg
        # solve h0*x + slope*x^2/2 = need on [0, seg]
        if abs(slope) < 1e-14:
            x = need / h0 if h0 > 0 else seg
        else:
            disc = h0 * h0 + 2 * slope * need
            x = (-h0 + math.sqrt(max(disc, 0.0))) / slope
        return p0 + min(max(x, 0.0), seg)

    def arc_above(self, p: float) -> float:
        """Boundary length of the part of the cycle at level >= p."""
        da = self._edge_dots[:, 0]
        db = self._edge_dots[:, 1]
        top = np.maximum(da, db)
        bot = np.minimum(da, db)
        span = np.maximum(top - bot, 1e-300)
        frac = np.clip((top - p) / span, 0.0, 1.0)
        flat = top <= bot + 1e-15
        frac[flat] = (top[flat] >= p).astype(float)
        return float((self.edge_len * frac).sum())

    def upper_perimeter(self, p: float) -> float:
        return self.arc_above(p) + self.chord_at(p)

    def solve_upper_perimeter(self, target: float) -> float:
        """p with Perimeter(upper part) = target; exact per-segment solve."""
        if target >= self.perimeter:
            return self.lo
        if target <= 0:
            return self.hi
        lo, hi = self.lo, self.hi
        f_lo = self.upper_perimeter(lo) - target
        for i in range(len(self.levels) - 1):
            p1 = float(self.levels[i + 1])
            f1 = self.upper_perimeter(p1) - target
            if f1 <= 0.0:
                p0 = float(self.levels[i])
                f0 = self.upper_perimeter(p0) - target
                if f0 <= 0.0:
                    return p0
                # linear within the segment
                t = f0 / (f0 - f1)
                return p0 + t * (p1 - p0)
        return hi if f_lo > 0 else lo


def state_polygon(state: Polytope) -> np.ndarray:
    if state.dim != 2:
        raise GeometryError("planar policy needs a 2-D state")
    X = state.vertices_array()
    if len(X) == 0:
        raise EmptyPolytopeError("empty knowledge set")
    return ordered_polygon_2d(X)


class TwoPotentialPolicy2D:
    """Planar rule balancing perimeter and root-area progress.

    With half-width w and mid-level chord h: cut at the midpoint when
    w >= h (the perimeter shrinks by at least w), otherwise cut at the
    exact equal-area level (the root-area potential shrinks).
    """

    name = "sym2d"
    # potential normalizer for the root-area term
    C = (1.0 - math.sqrt(0.5)) / 2.0

    def __init__(self):
        self.last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        cycle = state_polygon(state)
        prof = SectionProfile2D(cycle, u)
        w = 0.5 * (prof.hi - prof.lo)
        p_mid = 0.5 * (prof.hi + prof.lo)
        h = prof.chord_at(p_mid)
        area, perim = polygon_area_perimeter(cycle)
        if w >= h:
            p = p_mid
            case = "midpoint"
        else:
            p = prof.solve_area_below(0.5 * area)
            case = "equal-area"
        self.last_diagnostics = {
            "w": w, "h": h, "case": case,
            "area": area, "perimeter": perim,
            "potential": perim + math.sqrt(area) / self.C,
        }
        return float(p)


class BucketedPricingPolicy2D:
    """Planar pricing with doubly-exponential buckets on A' and P.

    A' = 2 sqrt(pi * Area) is the normalized area (so the planar
    isoperimetric inequality gives A' <= P).  Depending on the bucket
    comparison the rule carves a fixed area from the keep side or shaves
    a fixed amount of perimeter; once the directional width drops below
    1/T it prices at the low end.
    """

    name = "price2d"

    def __init__(self, T: int):
        if T < 1:
            raise ValueError("horizon must be positive")
        self.T = int(T)
        self.ladder = pricing_ladder_2d()
        self.last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        cycle = state_polygon(state)
        prof = SectionProfile2D(cycle, u)
        w = prof.hi - prof.lo
        area, perim = polygon_area_perimeter(cycle)
        diag = {"w": w / 2, "area": area, "perimeter": perim}
        if w < 1.0 / self.T:
            diag["case"] = "floor"
            self.last_diagnostics = diag
            return prof.lo
        a_norm = 2.0 * math.sqrt(math.pi * max(area, 1e-300))
        k_area = self.ladder.bucket(a_norm)
        k_per = self.ladder.bucket(max(perim, 1e-300))
        diag["k"] = [k_area, k_per]
        h_max = prof.h_max
        if k_area == k_per or (k_area > k_per and w < h_max):
            target = self.ladder.level(k_area + 1) ** 2 / (4.0 * math.pi)
            p = prof.solve_area_below(min(target, area))
            diag["case"] = "area-carve"
        else:
            target_upper = perim - 0.5 * self.ladder.level(k_per + 1)
            p = prof.solve_upper_perimeter(target_upper)
            diag["case"] = "perimeter-shave"
        self.last_diagnostics = diag
        return float(p)


# ---------------------------------------------------------------------
# directional section estimator for d >= 2 (vertex-backed states)
# ---------------------------------------------------------------------


class SectionEstimator:
    """Per-round geometry for fast side-volume estimates along one cut.

    Precomputes vertex projections, edge crossings and ordered facet
    cycles of the current knowledge set, plus one common set of random
    directions.  For a candidate level p, side bodies are evaluated by
    clipping cached facet cycles: widths give the V_1 samples, the facet
    silhouette sum gives the V_{d-1} samples, and the divergence formula
    gives the exact volume.  All estimates for different p within the
    round share the same directions, so estimated side-volumes are
    monotone in p.
    """

    def __init__(self, state: Polytope, u: np.ndarray, rng: PortableRng,
                 budget_bisect: int = BUDGET_BISECT,
                 budget_report: int | None = None):
        if state.dim < 2:
            raise GeometryError("section estimator needs dim >= 2")
        self.state = state
        self.d = state.dim
        self.u = np.asarray(u, dtype=np.float64)
        self.X = state.vertices_array()
        if len(self.X) == 0:
            raise EmptyPolytopeError("empty knowledge set")
        self.dots = self.X @ self.u
        self.lo = float(self.dots.min())
        self.hi = float(self.dots.max())
        if budget_report is None:
            budget_report = (BUDGET_REPORT_LOW if self.d <= 4
                             else BUDGET_REPORT_HIGH)
        E = state.edges()
        sa, sb = self.dots[E[:, 0]], self.dots[E[:, 1]]
        keep = np.abs(sa - sb) > 1e-14
        self.E = E[keep]
        self.e_lo = np.minimum(sa[keep], sb[keep])
        self.e_hi = np.maximum(sa[keep], sb[keep])

        # common random directions, two tiers
        self.dirs_b = rng.unit_vectors(budget_bisect, self.d)
        self.dirs_r = rng.unit_vectors(budget_report, self.d)
        self.W_b = self.X @ self.dirs_b.T
        self.W_r = self.X @ self.dirs_r.T
        self._crn_seed = int(rng.raw(1)[0] >> np.uint64(1))

        if self.d <= 3:
            self._build_facets()
            # |facet normal . direction| tables (cut plane is the last row)
            N = np.vstack([self.f_normals, self.u]) if len(self.f_normals) \
                else self.u[None, :]
            self.absdot_b = np.abs(N @ self.dirs_b.T)
            self.absdot_r = np.abs(N @ self.dirs_r.T)
        self._section_cache: dict[float, np.ndarray] = {}
        self._probe_cache: dict[float, dict] = {}
        self._cross_cache: dict[float, tuple] = {}
        self._state_cache: dict[tuple, tuple[float, float]] = {}

    # -- facet preparation ------------------------------------------

    def _build_facets(self):
        d = self.d
        A, b = self.state.A, self.state.b
        tight = self.state.tight_matrix()
        cycles: list[np.ndarray] = []
        dots_c: list[np.ndarray] = []
        normals: list[np.ndarray] = []
        offsets: list[float] = []
        seen: list[tuple] = []
        for row in range(A.shape[0]):
            idx = np.flatnonzero(tight[:, row])
            if len(idx) < d:
                continue
            n, off = A[row], float(b[row])
            dup = False
            for n2, off2 in seen:
                if abs(off - off2) < 1e-12 and np.all(np.abs(n - n2) < 1e-12):
                    dup = True
                    break
            if dup:
                continue
            pts = self.X[idx]
            if d == 2:
                order = np.argsort(pts @ _perp_basis(n)[0])
            else:
                basis = _perp_basis(n)
                loc = (pts - pts.mean(axis=0)) @ basis.T
                order = np.argsort(np.arctan2(loc[:, 1], loc[:, 0]))
            cyc = pts[order]
            area = _facet_measure(cyc, n)
            if area < 1e-18:
                continue
            seen.append((n, off))
            cycles.append(cyc)
            dots_c.append(cyc @ self.u)
            normals.append(n)
            offsets.append(off)
        self.f_cycles = cycles
        self.f_dots = dots_c
        self.f_normals = np.array(normals) if normals else np.zeros((0, d))
        self.f_offsets = np.array(offsets)
        self.f_lo = np.array([dc.min() for dc in dots_c]) if dots_c else np.zeros(0)
        self.f_hi = np.array([dc.max() for dc in dots_c]) if dots_c else np.zeros(0)
        self.f_area_full = np.array([_facet_measure(c, n) for c, n
                                     in zip(cycles, self.f_normals)]) \
            if cycles else np.zeros(0)
        # plain-float copies for the fused clipping kernel
        self.f_cycles_py = [[tuple(q) for q in c] for c in cycles]
        self.f_dots_py = [[float(x) for x in dc] for dc in dots_c]
        self.f_normals_py = [tuple(n) for n in normals]
        self.plane_basis = _perp_basis(self.u)

    # -- side geometry at a cut level --------------------------------

    def _crossings(self, p: float) -> tuple[np.ndarray, np.ndarray]:
        """Edge-cut points at level p and the crossing edge index pairs."""
        hit = self._cross_cache.get(p)
        if hit is not None:
            return hit
        cross = (self.e_lo < p - 1e-13) & (self.e_hi > p + 1e-13)
        ei = self.E[cross]
        if len(ei) == 0:
            out = (np.empty((0, self.d)), np.empty((0, 2), dtype=np.int64))
        else:
            da = self.dots[ei[:, 0]]
            db = self.dots[ei[:, 1]]
            t = ((p - da) / (db - da))[:, None]
            pts = self.X[ei[:, 0]] + t * (self.X[ei[:, 1]] - self.X[ei[:, 0]])
            out = (pts, ei)
        if len(self._cross_cache) > 512:
            self._cross_cache.clear()
        self._cross_cache[p] = out
        return out

    def section_points(self, p: float) -> np.ndarray:
        hit = self._section_cache.get(p)
        if hit is not None:
            return hit
        on_plane = self.X[np.abs(self.dots - p) <= 1e-12]
        cuts, _ = self._crossings(p)
        pts = np.vstack([q for q in (on_plane, cuts) if len(q)]) \
            if len(on_plane) or len(cuts) else np.empty((0, self.d))
        if len(self._section_cache) > 512:
            self._section_cache.clear()
        self._section_cache[p] = pts
        return pts

    def _probe(self, p: float) -> dict:
        """One pass over the facets: clipped areas and volumes, both sides.

        Facet areas on the two sides are complementary, so only the
        lower-side clip is computed; the section term is shared.
        """
        hit = self._probe_cache.get(p)
        if hit is not None:
            return hit
        F = len(self.f_cycles)
        areas_lo = np.zeros(F + 1)
        for f in range(F):
            if self.f_lo[f] >= p - 1e-13:        # above or on the plane
                continue
            if self.f_hi[f] <= p + 1e-13:
                areas_lo[f] = self.f_area_full[f]
                continue
            if self.d == 3:
                areas_lo[f] = _clipped_area_3d(
                    self.f_cycles_py[f], self.f_dots_py[f], p,
                    self.f_normals_py[f])
            else:
                clipped = _clip_cycle(self.f_cycles[f], self.f_dots[f], p, -1)
                if len(clipped) >= 2:
                    areas_lo[f] = _facet_measure(clipped, self.f_normals[f])
        areas_hi = np.concatenate([self.f_area_full, [0.0]]) - areas_lo
        np.maximum(areas_hi, 0.0, out=areas_hi)
        # facets exactly on the plane belong to neither open side
        on_plane = (self.f_lo >= p - 1e-13) & (self.f_hi <= p + 1e-13)
        areas_hi[:F][on_plane] = 0.0
        sect = self._section_measure(p)
        areas_lo[F] = sect
        areas_hi[F] = sect
        vol_lo = float(max((areas_lo[:F] @ self.f_offsets + p * sect)
                           / self.d, 0.0))
        vol_hi = float(max((areas_hi[:F] @ self.f_offsets - p * sect)
                           / self.d, 0.0))
        out = {"areas_lo": areas_lo, "areas_hi": areas_hi,
               "vol_lo": vol_lo, "vol_hi": vol_hi}
        if len(self._probe_cache) > 512:
            self._probe_cache.clear()
        self._probe_cache[p] = out
        return out

    def _facet_areas(self, p: float, side: int) -> np.ndarray:
        probe = self._probe(p)
        return probe["areas_lo"] if side < 0 else probe["areas_hi"]

    def _section_measure(self, p: float) -> float:
        """(d-1)-measure of the section polytope at level p."""
        sect = self.section_points(p)
        if len(sect) < self.d:
            return 0.0
        loc = (sect - sect.mean(axis=0)) @ self.plane_basis.T
        if self.d == 2:
            return float(loc[:, 0].max() - loc[:, 0].min())
        if self.d == 3:
            cyc = loc[np.argsort(np.arctan2(loc[:, 1], loc[:, 0]))]
            return polygon_area_perimeter(cyc)[0]
        return _hull_volume_local(loc)

    def side_volume(self, p: float, side: int) -> float:
        """Exact volume of the side body via the divergence identity."""
        probe = self._probe(p)
        return probe["vol_lo"] if side < 0 else probe["vol_hi"]

    def side_points(self, p: float, side: int,
                    tier: str) -> tuple[np.ndarray, np.ndarray]:
        """(vertex rows kept, their direction projections) for one side."""
        W = self.W_b if tier == "bisect" else self.W_r
        if side < 0:
            mask = self.dots <= p + 1e-13
        else:
            mask = self.dots >= p - 1e-13
        cuts, ei = self._crossings(p)
        if len(ei):
            da = self.dots[ei[:, 0]]
            db = self.dots[ei[:, 1]]
            t = ((p - da) / (db - da))[:, None]
            Wc = W[ei[:, 0]] + t * (W[ei[:, 1]] - W[ei[:, 0]])
            pts = np.vstack([self.X[mask], cuts])
            proj = np.vstack([W[mask], Wc])
        else:
            pts = self.X[mask]
            proj = W[mask]
        return pts, proj

    # -- estimates ----------------------------------------------------

    def side_estimate(self, i: int, p: float, side: int,
                      tier: str = "bisect") -> tuple[float, float]:
        """(value, half-width) for V_i of one side at cut level p."""
        d = self.d
        degenerate = (side > 0 and p >= self.hi - 1e-13) or \
                     (side < 0 and p <= self.lo + 1e-13)
        if degenerate:
            # the side collapsed to the flat section: measure it directly
            if i == d:
                return 0.0, 0.0
            pts = self.section_points(min(max(p, self.lo), self.hi))
            if len(pts) == 0:
                return 0.0, 0.0
            est = intrinsic_volume_points(pts, i, budget=BUDGET_BISECT,
                                          rng=self._mid_rng(200 + i))
            return est.value, est.half_width
        if i == 1:
            _, proj = self.side_points(p, side, tier)
            if len(proj) == 0:
                return 0.0, 0.0
            samples = proj.max(axis=0) - proj.min(axis=0)
        elif d <= 3 and i == d:
            return self.side_volume(p, side), 0.0
        elif d <= 3 and i == d - 1:
            areas = self._facet_areas(p, side)
            table = self.absdot_b if tier == "bisect" else self.absdot_r
            samples = 0.5 * (areas @ table)
        else:
            # dim >= 4: generic hull estimator over the side point set
            # (same sub-stream for every p in the round, so estimates
            # stay monotone in the cut level)
            pts, _ = self.side_points(p, side, tier)
            if len(pts) == 0:
                return 0.0, 0.0
            est = intrinsic_volume_points(
                pts, i,
                budget=BUDGET_BISECT if tier == "bisect" else None,
                rng=self._mid_rng(i),
                method="monte-carlo" if i < d else "auto")
            return est.value, est.half_width
        scale = projection_constant(d, i)
        m = len(samples)
        mean = float(samples.mean())
        se = float(samples.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
        return max(scale * mean, 0.0), 1.96 * scale * se

    def _mid_rng(self, i: int) -> PortableRng:
        # stable per-round sub-stream (same directions for every p probed)
        return PortableRng((self._crn_seed * 1000003 + i) & (2**63 - 1))

    def state_estimate(self, i: int, tier: str = "report") -> tuple[float, float]:
        key = (i, tier)
        hit = self._state_cache.get(key)
        if hit is None:
            hit = self.side_estimate(i, self.hi + 1e-6, -1, tier)
            self._state_cache[key] = hit
        return hit

    # -- cut solvers ---------------------------------------------------

    def split_equal(self, i: int, warm: float | None = None) -> tuple[float, float]:
        """p where V_i of the two sides match within TAU_SPLIT relative.

        Returns (p, residual imbalance relative to V_i(state)).
        """
        v_state, _ = self.state_estimate(i, "bisect")
        if v_state <= 0:
            return 0.5 * (self.lo + self.hi), 0.0
        tol = TAU_SPLIT * v_state

        def imbalance(p):
            lo_v, _ = self.side_estimate(i, p, -1, "bisect")
            hi_v, _ = self.side_estimate(i, p, +1, "bisect")
            return lo_v - hi_v

        a, bnd = self.lo, self.hi
        if warm is not None and self.lo < warm < self.hi:
            span = 0.05 * (self.hi - self.lo)
            wa, wb = max(self.lo, warm - span), min(self.hi, warm + span)
            if imbalance(wa) <= 0 <= imbalance(wb):
                a, bnd = wa, wb
        p, residual = _solve_increasing(imbalance, a, bnd, tol)
        return p, residual / v_state

    def split_drop_upper(self, i: int, target: float) -> float | None:
        """p with V_i(state) - V_i(upper side) = target, or None if the
        total achievable drop never exceeds the target."""
        v_state, _ = self.state_estimate(i, "bisect")

        def excess(p):
            hi_v, _ = self.side_estimate(i, p, +1, "bisect")
            return (v_state - hi_v) - target

        if excess(self.hi - 1e-15) <= 0:
            return None
        tol = DROP_TOL_REL * target
        p, _ = _solve_increasing(excess, self.lo, self.hi, tol)
        return p

    def section_intrinsic(self, i: int, p: float,
                          budget: int | None = None) -> tuple[float, float]:
        """V_i of the section at level p (exact when the slice is planar)."""
        if i >= self.d:
            return 0.0, 0.0
        pts = self.section_points(p)
        if len(pts) == 0:
            return 0.0, 0.0
        est = intrinsic_volume_points(pts, i,
                                      budget=budget or BUDGET_BISECT,
                                      rng=self._mid_rng(100 + i))
        return est.value, est.half_width


def _perp_basis(n: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to n ((d-1, d))."""
    d = len(n)
    n = n / np.linalg.norm(n)
    proj = np.eye(d) - np.outer(n, n)
    u_mat, s, _ = np.linalg.svd(proj)
    return u_mat[:, : d - 1].T


def _facet_measure(cycle: np.ndarray, normal: np.ndarray) -> float:
    """(d-1)-measure of an ordered facet: polygon area in 3-D and above,
    segment length in 2-D."""
    k = cycle.shape[0]
    d = cycle.shape[1] if cycle.ndim == 2 else 0
    if d == 2:
        if k < 2:
            return 0.0
        span = cycle @ _perp_basis(normal)[0]
        return float(span.max() - span.min())
    if k < 3:
        return 0.0
    ref = cycle[0]
    v = cycle - ref
    cross = np.cross(v[:-1], v[1:])
    if cross.ndim == 1:
        return abs(0.5 * float(cross.sum()))
    total = cross.sum(axis=0)
    if d == 3:
        return abs(0.5 * float(total @ (normal / np.linalg.norm(normal))))
    return 0.5 * float(np.linalg.norm(total))


def _clipped_area_3d(cycle: list, dots: list, p: float, normal: tuple) -> float:
    """Area of an ordered 3-D facet polygon clipped to the low side of p.

    Fused Sutherland-Hodgman walk that accumulates the cross-product sum
    without materializing the clipped polygon.
    """
    k = len(cycle)
    cx = cy = cz = 0.0
    fx = fy = fz = 0.0
    px_ = py_ = pz_ = 0.0
    have_first = False

    def emit(qx, qy, qz):
        nonlocal cx, cy, cz, fx, fy, fz, px_, py_, pz_, have_first
        if not have_first:
            fx, fy, fz = qx, qy, qz
            have_first = True
        else:
            cx += py_ * qz - pz_ * qy
            cy += pz_ * qx - px_ * qz
            cz += px_ * qy - py_ * qx
        px_, py_, pz_ = qx, qy, qz

    for i in range(k):
        j = i + 1 if i + 1 < k else 0
        si = p - dots[i]
        sj = p - dots[j]
        ai = cycle[i]
        if si >= -1e-13:
            emit(ai[0], ai[1], ai[2])
            if sj < -1e-13 and si > 1e-13:
                t = si / (si - sj)
                aj = cycle[j]
                emit(ai[0] + t * (aj[0] - ai[0]),
                     ai[1] + t * (aj[1] - ai[1]),
                     ai[2] + t * (aj[2] - ai[2]))
        elif sj > 1e-13:
            t = si / (si - sj)
            aj = cycle[j]
            emit(ai[0] + t * (aj[0] - ai[0]),
                 ai[1] + t * (aj[1] - ai[1]),
                 ai[2] + t * (aj[2] - ai[2]))
    if not have_first:
        return 0.0
    cx += py_ * fz - pz_ * fy
    cy += pz_ * fx - px_ * fz
    cz += px_ * fy - py_ * fx
    return abs(0.5 * (cx * normal[0] + cy * normal[1] + cz * normal[2]))


def _clip_cycle(cycle: np.ndarray, dots: np.ndarray, p: float,
                side: int) -> np.ndarray:
    """Sutherland-Hodgman clip of an ordered cycle against a level set."""
    s = (dots - p) * side      # >= 0 means keep
    out = []
    k = len(cycle)
    for i in range(k):
        j = (i + 1) % k
        si, sj = s[i], s[j]
        if si >= -1e-13:
            out.append(cycle[i])
            if sj < -1e-13 and si > 1e-13:
                t = si / (si - sj)
                out.append(cycle[i] + t * (cycle[j] - cycle[i]))
        elif sj > 1e-13:
            t = si / (si - sj)
            out.append(cycle[i] + t * (cycle[j] - cycle[i]))
    return np.array(out) if out else np.empty((0, cycle.shape[1]))


def _hull_volume_local(pts: np.ndarray) -> float:
    from .intrinsic import hull_volume
    return hull_volume(pts)


def analytic_center(A: np.ndarray, b: np.ndarray,
                    warm: np.ndarray | None = None,
                    max_newton: int = 60, tol: float = 1e-9) -> np.ndarray:
    """Log-barrier analytic center of {x : A x <= b} by damped Newton.

    Assumes the feasible set is bounded with nonempty interior.  A warm
    start is used when strictly feasible; otherwise the Chebyshev center
    seeds the iteration.
    """
    d = A.shape[1]
    x = None
    if warm is not None:
        s = b - A @ warm
        if np.all(s > 1e-12):
            x = warm.astype(np.float64).copy()
    if x is None:
        x = _chebyshev_center(A, b)
        s = b - A @ x
        if np.any(s <= 0):
            raise GeometryError("no strictly feasible interior point found")
    for _ in range(max_newton):
        s = b - A @ x
        if np.any(s <= 0):
            break
        inv_s = 1.0 / s
        g = A.T @ inv_s
        H = (A * (inv_s ** 2)[:, None]).T @ A
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, g, rcond=None)[0]
        decrement = float(-g @ step)
        As = A @ step
        pos = As > 0
        t = 1.0
        if np.any(pos):
            t = min(1.0, 0.99 * float(np.min(s[pos] / As[pos])))
        if t <= 1e-14 or not np.isfinite(t):
            break
        x = x + t * step
        if decrement * t < tol:
            break
    return x


def _chebyshev_center(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Center of the largest inscribed ball, by LP."""
    from scipy.optimize import linprog
    d = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    A_ub = np.hstack([A, norms[:, None]])
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(0, None)],
                  method="highs")
    if res.status != 0 or res.x is None:
        raise GeometryError("Chebyshev-center LP failed")
    return np.asarray(res.x[:d], dtype=np.float64)


# ---------------------------------------------------------------------
# d-dimensional policies
# ---------------------------------------------------------------------


class SymmetricSearchPolicy:
    """Equalize one intrinsic volume per round, index picked by a ladder.

    For each i the policy finds the level p_i splitting V_i evenly, takes
    the section K_i there and forms L_i = (V_i(K_i)/c_i)^(1/i); with
    L_0 = infinity it plays p_j for the smallest j with L_j below the
    half-width.  In one dimension this is plain bisection.  Above
    ``EXACT_DIM_MAX`` dimensions the policy cuts at the support-cloud
    centroid instead (see module docs).
    """

    name = "symsearch"

    def __init__(self, seed: int = 0, budget_bisect: int = BUDGET_BISECT,
                 budget_report: int | None = None,
                 exact_dim_max: int = EXACT_DIM_MAX,
                 support_cloud: int = SUPPORT_CLOUD_SIZE):
        self.rng = PortableRng(seed)
        self.budget_bisect = budget_bisect
        self.budget_report = budget_report
        self.exact_dim_max = exact_dim_max
        self.support_cloud = support_cloud
        self._round = 0
        self._center_warm: np.ndarray | None = None
        self.last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        self._round += 1
        d = state.dim
        if d == 1:
            ext = extent(state, u)
            self.last_diagnostics = PolicyDiagnostics(
                chosen_j=1, w=ext.width / 2).as_dict()
            return 0.5 * (ext.lo + ext.hi)
        if d > self.exact_dim_max:
            return self._deep_point_cut(state, u)
        return self._ladder_cut(state, u)

    def _ladder_cut(self, state: Polytope, u: np.ndarray) -> float:
        d = state.dim
        ext = extent(state, u)
        if ext.width <= DEGENERATE_WIDTH:
            self.last_diagnostics = PolicyDiagnostics(
                chosen_j=d, w=ext.width / 2,
                extra={"mode": "degenerate"}).as_dict()
            return 0.5 * (ext.lo + ext.hi)
        rng = self.rng.spawn(self._round)
        se = SectionEstimator(state, u, rng, self.budget_bisect,
                              self.budget_report)
        w = 0.5 * (se.hi - se.lo)
        c = constant_ladder(d)
        p_list: list[float] = []
        L_list: list[float] = [math.inf]
        L_hw: list[float] = [0.0]
        residuals: list[float] = []
        warm = None
        for i in range(1, d + 1):
            p_i, resid = se.split_equal(i, warm=warm)
            warm = p_i
            p_list.append(p_i)
            residuals.append(resid)
            if i == d:
                L_list.append(0.0)
                L_hw.append(0.0)
                continue
            v_k, hw_k = se.section_intrinsic(i, p_i)
            L_i, hw_L = _ladder_value(v_k, hw_k, c[i], i)
            L_list.append(L_i)
            L_hw.append(hw_L)
        j = self._select_rung(se, w, L_list, L_hw, c, p_list)
        p = p_list[j - 1]
        # report-tier state estimates for diagnostics and audits
        v_state, hw_state = se.state_estimate(j, "report")
        v_next, hw_next = se.side_estimate(j, p, -1, "report")
        v_next_hi, hw_next_hi = se.side_estimate(j, p, +1, "report")
        phi_terms = []
        potential = 0.0
        pot_hw = 0.0
        for i in range(1, d + 1):
            vi, hwi = se.state_estimate(i, "report")
            phi_terms.append((vi, hwi))
            if vi > 0:
                potential += i * i * vi ** (1.0 / i)
                pot_hw += i * vi ** (1.0 / i - 1.0) * hwi
        diag = PolicyDiagnostics(
            chosen_j=j, w=w, L=L_list,
            phi=[v for v, _ in phi_terms],
            potential=potential,
            extra={
                "p_candidates": p_list,
                "split_residuals": residuals,
                "vj_state": v_state, "vj_state_hw": hw_state,
                "vj_low": v_next, "vj_low_hw": hw_next,
                "vj_high": v_next_hi, "vj_high_hw": hw_next_hi,
                "potential_hw": pot_hw,
                "phi_hw": [h for _, h in phi_terms],
                "mode": "ladder",
            },
        )
        self.last_diagnostics = diag.as_dict()
        return float(p)

    def _select_rung(self, se: SectionEstimator, w: float, L: list[float],
                     L_hw: list[float], c: np.ndarray,
                     p_list: list[float]) -> int:
        """Smallest j with L_j <= w, escalating budget on ambiguous CIs."""
        d = se.d
        budget = BUDGET_BISECT
        for attempt in range(ESCALATION_STEPS + 1):
            ambiguous = [i for i in range(1, d)
                         if L_hw[i] > 0 and abs(L[i] - w) <= L_hw[i]]
            if not ambiguous:
                break
            if attempt == ESCALATION_STEPS:
                raise EstimatorFailure(
                    f"cannot order ladder against half-width {w}: "
                    f"ambiguous indices {ambiguous}")
            budget *= 2
            for i in ambiguous:
                v_k, hw_k = se.section_intrinsic(i, p_list[i - 1], budget=budget)
                L[i], L_hw[i] = _ladder_value(v_k, hw_k, c[i], i)
        for j in range(1, d + 1):
            if L[j] <= w:
                return j
        return d

    def _deep_point_cut(self, state: Polytope, u: np.ndarray) -> float:
        """High-dimension fallback: cut through the analytic center.

        Without the vertex machinery the equal-split levels cannot be
        estimated, so the policy plays the top rung's volume-style cut
        through a certified deep point of the knowledge set (the
        log-barrier analytic center, the standard cutting-plane choice).
        """
        ext = extent(state, u)
        w = 0.5 * ext.width
        mode = "analytic-center"
        if ext.width <= DEGENERATE_WIDTH:
            p = 0.5 * (ext.lo + ext.hi)
            mode = "degenerate"
        else:
            try:
                center = analytic_center(state.A, state.b,
                                         warm=self._center_warm)
                self._center_warm = center
                p = float(center @ np.asarray(u, dtype=np.float64))
            except GeometryError:
                # set too thin for a strict interior: midpoint is as good
                p = 0.5 * (ext.lo + ext.hi)
                mode = "degenerate"
            margin = 1e-9 * max(ext.width, 1e-12)
            p = min(max(p, ext.lo + margin), ext.hi - margin)
        self.last_diagnostics = PolicyDiagnostics(
            chosen_j=state.dim, w=w,
            extra={"mode": mode},
        ).as_dict()
        return p


class PricingSearchPolicy:
    """Bucketed pricing: carve a fixed amount of one intrinsic volume.

    Tracks normalized potentials (i! V_i)^(1/i) in doubly-exponential
    buckets; per index the cut removes half the next bucket level's worth
    of V_i from the keep side (or sits at the top of the extent when that
    much is not available).  The played index is the largest index inside
    the selected bucket block.  Prices at the low end once the half-width
    drops below 1/T.
    """

    name = "pricesearch"

    def __init__(self, T: int, beta: float | None = None, seed: int = 0,
                 budget_bisect: int = BUDGET_BISECT,
                 budget_report: int | None = None):
        if T < 1:
            raise ValueError("horizon must be positive")
        self.T = int(T)
        self.beta = beta
        self.rng = PortableRng(seed)
        self.budget_bisect = budget_bisect
        self.budget_report = budget_report
        self._round = 0
        self.last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        self._round += 1
        d = state.dim
        if d == 1:
            return self._interval_cut(state, u)
        if d > EXACT_DIM_MAX:
            raise EstimatorFailure(
                "pricing search needs the exact vertex machinery "
                f"(dim {d} > {EXACT_DIM_MAX})")
        ext = extent(state, u)
        if ext.width <= DEGENERATE_WIDTH:
            self.last_diagnostics = PolicyDiagnostics(
                w=ext.width / 2, extra={"case": "floor",
                                        "mode": "degenerate"}).as_dict()
            return ext.lo
        rng = self.rng.spawn(self._round)
        se = SectionEstimator(state, u, rng, self.budget_bisect,
                              self.budget_report)
        w = 0.5 * (se.hi - se.lo)
        ladder = pricing_ladder(d, self.beta)
        c = constant_ladder(d)

        phi: list[float] = []
        phi_hw: list[float] = []
        k_raw: list[int] = []
        p_list: list[float] = []
        L_list: list[float] = [math.inf]
        v_state_list: list[float] = []
        for i in range(1, d + 1):
            vi, hwi = se.state_estimate(i, "report")
            v_state_list.append(vi)
            base = math.factorial(i) * max(vi, 1e-300)
            phi.append(base ** (1.0 / i))
            phi_hw.append((base ** (1.0 / i)) / (i * max(vi, 1e-300)) * hwi)
            k_raw.append(ladder.bucket(max(phi[-1], 1e-300)))
        # enforce the monotone bucket structure the block rule relies on
        k_mono: list[int] = []
        for i, kv in enumerate(k_raw):
            k_mono.append(kv if i == 0 else max(kv, k_mono[-1]))

        for i in range(1, d + 1):
            target = ladder.level(k_mono[i - 1] + 1) ** i / (2.0 * math.factorial(i))
            p_i = se.split_drop_upper(i, target)
            if p_i is None:
                p_i = se.hi
            p_list.append(p_i)
            if i == d:
                L_list.append(0.0)
                continue
            v_k, _ = se.section_intrinsic(i, p_i)
            L_list.append((v_k / c[i]) ** (1.0 / i) if v_k > 0 else 0.0)

        diag = PolicyDiagnostics(
            w=w, L=L_list, phi=phi, k=k_mono,
            extra={"p_candidates": p_list, "phi_hw": phi_hw,
                   "v_state": v_state_list, "k_raw": k_raw,
                   "ladder_alpha": ladder.alpha},
        )
        if w < 1.0 / self.T:
            diag.extra["case"] = "floor"
            self.last_diagnostics = diag.as_dict()
            return se.lo

        # block maxima of equal buckets: M(i) = max{j : k_j = k_i}
        M = [0] * (d + 1)
        for i in range(1, d + 1):
            m = i
            for jj in range(i + 1, d + 1):
                if k_mono[jj - 1] == k_mono[i - 1]:
                    m = jj
            M[i] = m
        chosen_j = d
        for j in range(1, d + 1):
            if L_list[j - 1] >= w >= L_list[M[j]]:
                chosen_j = j
                break
        J = M[chosen_j]
        p = p_list[J - 1]
        v_low, hw_low = se.side_estimate(J, p, -1, "report")
        diag.chosen_j = chosen_j
        diag.chosen_J = J
        diag.extra["case"] = "search"
        diag.extra["ell_kJ"] = ladder.level(k_mono[J - 1])
        diag.extra["ell_kJ1"] = ladder.level(k_mono[J - 1] + 1)
        diag.extra["vJ_low"] = v_low
        diag.extra["vJ_low_hw"] = hw_low
        self.last_diagnostics = diag.as_dict()
        return float(p)

    def _interval_cut(self, state: Polytope, u: np.ndarray) -> float:
        """1-D exact specialization: V_1 is the interval length."""
        ext = extent(state, u)
        lo, hi = ext.lo, ext.hi
        delta = hi - lo
        w = 0.5 * delta
        ladder = pricing_ladder(1, self.beta)
        k1 = ladder.bucket(max(delta, 1e-300))
        target = 0.5 * ladder.level(k1 + 1)
        p1 = lo + target if target < delta else hi
        diag = PolicyDiagnostics(w=w, L=[math.inf, 0.0], phi=[delta], k=[k1],
                                 extra={"p_candidates": [p1],
                                        "v_state": [delta]})
        if w < 1.0 / self.T:
            diag.extra["case"] = "floor"
            self.last_diagnostics = diag.as_dict()
            return lo
        diag.chosen_j = 1
        diag.chosen_J = 1
        diag.extra["case"] = "search"
        diag.extra["ell_kJ"] = ladder.level(k1)
        diag.extra["ell_kJ1"] = ladder.level(k1 + 1)
        diag.extra["vJ_low"] = min(target, delta)
        diag.extra["vJ_low_hw"] = 0.0
        self.last_diagnostics = diag.as_dict()
        return float(p1)


class WidthHalvingPolicy:
    """Always guesses the midpoint of the directional extent."""

    name = "widthhalf"

    def __init__(self):
        self.last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        ext = extent(state, u)
        self.last_diagnostics = {"w": ext.width / 2}
        return 0.5 * (ext.lo + ext.hi)


class VolumeHalvingPolicy:
    """Always splits the exact volume of the knowledge set in half."""

    name = "volhalf"

    def __init__(self, seed: int = 0):
        self.rng = PortableRng(seed)
        self._round = 0
        self.last_diagnostics: dict = {}

    def __call__(self, state: Polytope, u: np.ndarray) -> float:
        self._round += 1
        d = state.dim
        if d == 1:
            ext = extent(state, u)
            self.last_diagnostics = {"w": ext.width / 2}
            return 0.5 * (ext.lo + ext.hi)
        if d > EXACT_DIM_MAX:
            raise EstimatorFailure(
                f"volume halving needs exact volumes (dim {d} > {EXACT_DIM_MAX})")
        ext = extent(state, u)
        if ext.width <= DEGENERATE_WIDTH:
            self.last_diagnostics = {"w": ext.width / 2, "mode": "degenerate"}
            return 0.5 * (ext.lo + ext.hi)
        se = SectionEstimator(state, u, self.rng.spawn(self._round),
                              budget_bisect=8, budget_report=8)
        w = 0.5 * (se.hi - se.lo)
        p, resid = se.split_equal(d)
        self.last_diagnostics = {"w": w, "split_residual": resid,
                                 "volume": se.side_volume(se.hi + 1e-12, -1)}
        return float(p)


# ---------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------

POLICY_NAMES = ("midpoint1d", "kl1d", "sym2d", "price2d", "symsearch",
                "pricesearch", "widthhalf", "volhalf")

PRICING_POLICIES = {"kl1d", "price2d", "pricesearch"}
SYMMETRIC_POLICIES = {"midpoint1d", "sym2d", "symsearch", "widthhalf", "volhalf"}


def build_policy(name: str, T: int | None = None, beta: float | None = None,
                 seed: int = 0, **kwargs):
    if name == "midpoint1d":
        return MidpointPolicy1D()
    if name == "kl1d":
        if T is None:
            raise ValueError("kl1d needs a horizon T")
        return KleinbergLeightonPolicy1D(T)
    if name == "sym2d":
        return TwoPotentialPolicy2D()
    if name == "price2d":
        if T is None:
            raise ValueError("price2d needs a horizon T")
        return BucketedPricingPolicy2D(T)
    if name == "symsearch":
        return SymmetricSearchPolicy(seed=seed, **kwargs)
    if name == "pricesearch":
        if T is None:
            raise ValueError("pricesearch needs a horizon T")
        return PricingSearchPolicy(T, beta=beta, seed=seed, **kwargs)
    if name == "widthhalf":
        return WidthHalvingPolicy()
    if name == "volhalf":
        return VolumeHalvingPolicy(seed=seed)
    raise ValueError(f"unknown policy {name!r}")
