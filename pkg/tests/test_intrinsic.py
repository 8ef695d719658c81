"""Intrinsic volumes: exact paths, Monte Carlo accuracy, geometric oracles."""

import math

import numpy as np
import pytest

from ctxsearch.geometry import Halfspace, Polytope, clip
from ctxsearch.intrinsic import (
    affine_coordinates,
    area_perimeter,
    check_cone_bound,
    check_cylinder_identity,
    check_isoperimetric,
    check_steiner,
    check_valuation_additivity,
    cone_points,
    convex_hull_2d,
    distances_to_hull,
    elementary_symmetric,
    hull_volume,
    intrinsic_volume,
    intrinsic_volume_points,
    prism_points,
    project_onto_hull,
    projection_constant,
    projection_samples,
    steiner_prediction,
    steiner_volume,
    unit_ball_volume,
)
from ctxsearch.rng import PortableRng


def box(sides):
    """Axis box [0,s1] x ... via clips of the unit box, scaled by cuts."""
    d = len(sides)
    P = Polytope.unit_box(d)
    for i, s in enumerate(sides):
        e = np.zeros(d)
        e[i] = 1.0
        P = clip(P, Halfspace(e, float(s)))
    return P


def test_unit_ball_volumes():
    assert unit_ball_volume(0) == pytest.approx(1.0)
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_projection_constant_known_cases():
    # mean cube shadow area in 3-D is 3/2, and V_2 of the cube is 3
    assert projection_constant(3, 2) == pytest.approx(2.0)
    assert projection_constant(3, 1) == pytest.approx(2.0)
    assert projection_constant(2, 1) == pytest.approx(math.pi / 2.0)


def test_elementary_symmetric():
    assert elementary_symmetric(np.array([1.0, 2.0, 3.0])).tolist() == \
        [1.0, 6.0, 11.0, 6.0]


def test_unit_cube_binomials_exact():
    for d in (1, 2, 3, 4, 5, 6):
        P = Polytope.unit_box(d)
        for j in range(d + 1):
            est = intrinsic_volume(P, j)
            assert est.method in ("exact-box",)
            assert est.value == pytest.approx(math.comb(d, j), rel=1e-14)


def test_box_symmetric_polynomials():
    P = box([1.0, 2.0, 3.0])  # degenerate: unit box caps sides at 1
    # build a true [0,1]x[0,0.7]x[0,0.3] box instead
    P = box([1.0, 0.7, 0.3])
    sides = [1.0, 0.7, 0.3]
    e = elementary_symmetric(np.array(sides))
    for j in range(4):
        est = intrinsic_volume(P, j)
        assert est.method == "exact-box"
        assert est.value == pytest.approx(e[j], rel=1e-12)


def test_scaled_box_values():
    # [0,1] x [0,2] x [0,3] has V_1 = 6, V_2 = 11, V_3 = 6: check on the
    # point representation (the unit-box polytope cannot exceed 1)
    pts = np.array([[x, y, z] for x in (0, 1) for y in (0, 2) for z in (0, 3)],
                   dtype=float)
    rng = PortableRng(5)
    v3 = intrinsic_volume_points(pts, 3)
    assert v3.value == pytest.approx(6.0, rel=1e-12)
    v2 = intrinsic_volume_points(pts, 2, budget=6000, rng=rng)
    assert v2.value == pytest.approx(11.0, rel=0.03)
    v1 = intrinsic_volume_points(pts, 1, budget=6000, rng=rng)
    assert v1.value == pytest.approx(6.0, rel=0.03)


def test_segment_embedded_ambient_independence():
    seg = np.array([[0.1, 0.2, 0.3], [0.4, 0.6, 0.8]])
    L = float(np.linalg.norm(seg[1] - seg[0]))
    est = intrinsic_volume_points(seg, 1)
    assert est.method == "exact-1d"
    assert est.value == pytest.approx(L, rel=1e-12)
    for j in (2, 3):
        assert intrinsic_volume_points(seg, j).value == 0.0


def test_point_has_trivial_volumes():
    pt = np.array([[0.3, 0.4, 0.5]])
    assert intrinsic_volume_points(pt, 0).value == 1.0
    for j in (1, 2, 3):
        assert intrinsic_volume_points(pt, j).value == 0.0


def test_mc_cube_estimate_within_tolerance():
    P = Polytope.unit_box(3)
    est = intrinsic_volume(P, 1, budget=10_000, rng=PortableRng(3),
                           method="monte-carlo")
    assert est.method == "monte-carlo"
    assert abs(est.value - 3.0) < 0.1
    assert est.half_width < 0.1


def test_mc_standard_error_shrinks_with_budget():
    P = Polytope.unit_box(3)
    hw = []
    for budget in (500, 2000, 8000):
        est = intrinsic_volume(P, 1, budget=budget, rng=PortableRng(1),
                               method="monte-carlo")
        hw.append(est.half_width)
    assert hw[0] > hw[1] > hw[2]
    assert hw[0] / hw[2] == pytest.approx(math.sqrt(16), rel=0.4)


def test_mc_rigid_invariance():
    """A rotated copy estimates the same V_j within joint CIs."""
    P = clip(Polytope.unit_box(3), Halfspace(np.ones(3) / math.sqrt(3), 0.9))
    X = P.vertices_array()
    rng = PortableRng(17)
    basis = rng.orthonormal_subspace(3, 3)   # a random rotation (up to sign)
    Xr = X @ basis.T + np.array([0.1, -0.2, 0.3])
    for j in (1, 2):
        a = intrinsic_volume_points(X, j, budget=4000, rng=PortableRng(23))
        b = intrinsic_volume_points(Xr, j, budget=4000, rng=PortableRng(29))
        assert abs(a.value - b.value) <= 3 * (a.half_width + b.half_width) + 1e-6


def test_mc_monotone_under_inclusion():
    P = Polytope.unit_box(3)
    Q = clip(P, Halfspace(np.ones(3) / math.sqrt(3), 0.8))
    for j in (1, 2):
        big = intrinsic_volume(P, j, budget=4000, rng=PortableRng(31),
                               method="monte-carlo")
        small = intrinsic_volume(Q, j, budget=4000, rng=PortableRng(31),
                                 method="monte-carlo")
        assert small.value <= big.value + small.half_width + big.half_width


def test_homogeneity_on_boxes():
    for alpha in (0.5, 2.0):
        pts = np.array([[x, y, z] for x in (0, 1) for y in (0, 1)
                        for z in (0, 1)], dtype=float)
        scaled = alpha * pts
        for j in (1, 2, 3):
            a = intrinsic_volume_points(pts, j, budget=3000, rng=PortableRng(7))
            b = intrinsic_volume_points(scaled, j, budget=3000, rng=PortableRng(7))
            assert b.value == pytest.approx(alpha ** j * a.value, rel=0.05)


def test_projection_samples_orthonormal():
    pts = Polytope.unit_box(3).vertices_array()
    for s in projection_samples(pts, 2, 5, PortableRng(13)):
        B = s.subspace_basis
        assert np.allclose(B @ B.T, np.eye(2), atol=1e-10)
        assert s.projected_volume >= 0


def test_area_perimeter_unit_square():
    assert area_perimeter(Polytope.unit_box(2)) == (1.0, 4.0)


def test_area_perimeter_triangle():
    P = clip(Polytope.unit_box(2), Halfspace(np.array([1.0, 1.0]), 1.0))
    area, perim = area_perimeter(P)
    assert area == pytest.approx(0.5)
    assert perim == pytest.approx(2.0 + math.sqrt(2.0))


def test_area_perimeter_clipped_pentagon():
    P = clip(Polytope.unit_box(2), Halfspace(np.array([1.0, 1.0]), 1.5))
    area, perim = area_perimeter(P)
    assert area == pytest.approx(0.875)
    assert perim == pytest.approx(3.0 + math.sqrt(2.0) / 2.0)


def test_area_perimeter_degenerate_segment():
    seg = np.array([[0.0, 0.0], [0.0, 0.75]])
    area, perim = area_perimeter(seg)
    assert area == 0.0
    assert perim == pytest.approx(1.5)


def test_steiner_square_eps1():
    value, se = steiner_volume(Polytope.unit_box(2), 1.0, PortableRng(3),
                               n_samples=60_000)
    expected = 1.0 + 4.0 + math.pi
    assert value == pytest.approx(expected, abs=4 * se + 0.02)


def test_steiner_point_is_ball():
    pt = np.array([[0.5, 0.5]])
    value, se = steiner_volume(pt, 0.7, PortableRng(5), n_samples=60_000)
    assert value == pytest.approx(math.pi * 0.49, abs=4 * se + 0.01)


def test_steiner_cube_half_eps():
    value, se = steiner_volume(Polytope.unit_box(3), 0.5, PortableRng(7),
                               n_samples=80_000)
    expected = sum(unit_ball_volume(3 - j) * math.comb(3, j) * 0.5 ** (3 - j)
                   for j in range(4))
    assert value == pytest.approx(expected, abs=4 * se + 0.05)


def test_check_steiner_passes_on_clipped_cubes():
    rng = PortableRng(11)
    P = clip(Polytope.unit_box(3),
             Halfspace(np.ones(3) / math.sqrt(3.0), 1.2))
    for eps in (0.1, 0.5):
        res = check_steiner(P, eps, rng.spawn(int(eps * 10)), budget=3000,
                            n_samples=30_000)
        assert res.passed, res.detail


def test_distance_oracle_against_hull_projection():
    P = clip(Polytope.unit_box(3), Halfspace(np.ones(3) / math.sqrt(3), 1.0))
    pts = P.vertices_array()
    rng = PortableRng(19)
    q = rng.uniform(30).reshape(10, 3) * 2.0 - 0.5
    fast = distances_to_hull(q, pts)
    for i in range(len(q)):
        proj = project_onto_hull(q[i], pts)
        slow = float(np.linalg.norm(q[i] - proj))
        assert fast[i] == pytest.approx(slow, abs=1e-4)


def test_isoperimetric_unit_square_margin():
    res = check_isoperimetric(Polytope.unit_box(2), 1)
    assert res.passed
    assert res.margin == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-9)


def test_isoperimetric_trivial_on_segment():
    P = clip(Polytope.unit_box(2), Halfspace(np.array([0.0, 1.0]), 0.0))
    res = check_isoperimetric(P, 1)
    assert res.passed


def test_isoperimetric_random_clipped_cube():
    P = clip(Polytope.unit_box(3), Halfspace(np.ones(3) / math.sqrt(3), 1.0))
    for i in (1, 2):
        res = check_isoperimetric(P, i, budget=4000, rng=PortableRng(37))
        assert res.passed, res.detail


def test_cone_equality_cases():
    # triangle over a unit segment: V_2 = 1/2 = (1/1+1) * 1 * V_1
    seg = np.array([[0.0], [1.0]])
    res = check_cone_bound(seg, 1.0, 1)
    assert res.passed
    assert res.margin == pytest.approx(0.0, abs=1e-9)
    # pyramid over the unit square: V_3 = 1/3 exactly
    sq = Polytope.unit_box(2).vertices_array()
    res = check_cone_bound(sq, 1.0, 2)
    assert res.passed
    assert res.margin == pytest.approx(0.0, abs=1e-9)


def test_cone_strict_case_pyramid_surface():
    sq = Polytope.unit_box(2).vertices_array()
    res = check_cone_bound(sq, 1.0, 1, budget=4000, rng=PortableRng(41))
    assert res.passed
    assert res.detail["lhs"] >= res.detail["rhs"] - res.detail["slack"]
    assert res.detail["rhs"] == pytest.approx(1.0, rel=0.05)


def test_cylinder_identity_box():
    sq = Polytope.unit_box(2).vertices_array()
    res = check_cylinder_identity(sq, 2.0, 1, budget=4000, rng=PortableRng(43))
    assert res.passed
    assert res.detail["rhs"] == pytest.approx(1.0 + 2.0 * 2.0, rel=0.05)


def test_cylinder_identity_triangle_volume():
    tri = np.array([[0.0, 0], [1, 0], [0, 1]])
    res = check_cylinder_identity(tri, 1.0, 2, budget=2000, rng=PortableRng(47))
    assert res.passed
    assert res.detail["lhs"] == pytest.approx(0.5, rel=1e-9)


def test_rectangle_edge_sum_identity():
    seg = np.array([[0.0], [1.0]])
    res = check_cylinder_identity(seg, 0.5, 1, budget=2000, rng=PortableRng(53))
    # rectangle 1 x 0.5: V_2 = 0.5 = 0 + 0.5 * V_1(segment)
    assert res.passed


def test_valuation_additivity_cube_split():
    P = Polytope.unit_box(3)
    u = np.array([1.0, 0.0, 0.0])
    for j in (1, 2, 3):
        res = check_valuation_additivity(P, u, 0.3, j, budget=4000,
                                         rng=PortableRng(59))
        assert res.passed, (j, res.detail)


def test_hull_volume_simple_shapes():
    assert hull_volume(np.array([[0.0], [2.0]])) == 2.0
    sq = np.array([[0.0, 0], [1, 0], [1, 1], [0, 1]])
    assert hull_volume(sq) == pytest.approx(1.0)
    cube = Polytope.unit_box(3).vertices_array()
    assert hull_volume(cube) == pytest.approx(1.0)


def test_convex_hull_2d_drops_interior():
    pts = np.array([[0.0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.2, 0.7]])
    hull = convex_hull_2d(pts)
    assert len(hull) == 4


def test_affine_coordinates_rank():
    sq3 = np.array([[0, 0, 0.5], [1, 0, 0.5], [1, 1, 0.5], [0, 1, 0.5]],
                   dtype=float)
    coords, rank = affine_coordinates(sq3)
    assert rank == 2
    assert coords.shape == (4, 2)


def test_prism_and_cone_builders():
    sq = Polytope.unit_box(2).vertices_array()
    pr = prism_points(sq, 2.0)
    assert pr.shape == (8, 3)
    cn = cone_points(sq, 1.0)
    assert cn.shape == (5, 3)
    assert cn[-1].tolist() == [0.5, 0.5, 1.0]
