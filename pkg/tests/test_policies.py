"""Policies: ladder constants, planar profiles, split solvers, known guesses."""

import math

import numpy as np
import pytest

from ctxsearch.geometry import Halfspace, Polytope, clip, extent
from ctxsearch.intrinsic import intrinsic_volume, hull_volume
from ctxsearch.policies import (
    BucketLadder,
    KleinbergLeightonPolicy1D,
    MidpointPolicy1D,
    SectionEstimator,
    SectionProfile2D,
    TwoPotentialPolicy2D,
    BucketedPricingPolicy2D,
    VolumeHalvingPolicy,
    WidthHalvingPolicy,
    build_policy,
    constant_ladder,
    kl_bucket_index,
    pricing_ladder,
    pricing_ladder_2d,
)
from ctxsearch.rng import PortableRng
from ctxsearch.search import LossSpec, play_round


def unit_square():
    return Polytope.unit_box(2)


def test_constant_ladder_recurrence():
    c = constant_ladder(5)
    assert c[0] == 1.0
    for i in range(1, 6):
        assert c[i] / c[i - 1] == pytest.approx(1.0 / (2 * i), rel=1e-15)
    assert c[2] == pytest.approx(1.0 / 8.0)     # 1/(2^2 * 2!)
    assert c[3] == pytest.approx(1.0 / 48.0)    # 1/(2^3 * 3!)


def test_bucket_ladder_levels_decrease():
    lad = pricing_ladder(3)
    assert lad.alpha == pytest.approx(4.0 / 3.0)
    levels = [lad.level(k) for k in range(0, 8)]
    assert all(a > b for a, b in zip(levels, levels[1:]))


def test_bucket_membership():
    lad = pricing_ladder_2d()
    for k in range(0, 6):
        hi, lo = lad.level(k), lad.level(k + 1)
        x = 0.5 * (hi + lo)
        assert lad.bucket(x) == k
        assert lad.bucket(hi) == k            # closed on the high end
        assert lad.bucket(lo) == k + 1        # open on the low end
    # values at or above the scale share the clamped overflow bucket
    assert lad.bucket(4.0) == lad.k_min
    assert lad.bucket(1.0) == lad.k_min
    # values below the scale always have a finite (possibly negative) bucket
    k99 = lad.bucket(0.99)
    assert lad.level(k99 + 1) < 0.99 <= lad.level(k99)


def test_kl_bucket_index_formula():
    # floor(1 + log2 log2 (1/delta))
    assert kl_bucket_index(0.25) == 2
    assert kl_bucket_index(0.5) == 1
    assert kl_bucket_index(2.0 ** -16) == 5


def test_kl1d_guess_values():
    policy = KleinbergLeightonPolicy1D(T=10**6)
    state = Polytope.unit_box(1)
    state = clip(state, Halfspace(np.array([-1.0]), -0.2))   # x >= 0.2
    state = clip(state, Halfspace(np.array([1.0]), 0.45))    # x <= 0.45
    u = np.array([1.0])
    # interval [0.2, 0.45]: length 0.25, bucket 2, guess 0.2 + 2^-4
    assert policy(state, u) == pytest.approx(0.2 + 2.0 ** -4)

    half = clip(Polytope.unit_box(1), Halfspace(np.array([1.0]), 0.5))
    assert KleinbergLeightonPolicy1D(T=10**6)(half, u) == pytest.approx(0.25)


def test_kl1d_floor_prices_low_end():
    policy = KleinbergLeightonPolicy1D(T=100)
    state = clip(Polytope.unit_box(1), Halfspace(np.array([1.0]), 0.005))
    state = clip(state, Halfspace(np.array([-1.0]), 0.0))
    assert policy(state, np.array([1.0])) == pytest.approx(0.0)


def test_midpoint_1d():
    u = np.array([1.0])
    assert MidpointPolicy1D()(Polytope.unit_box(1), u) == 0.5
    quarter = clip(Polytope.unit_box(1), Halfspace(np.array([1.0]), 0.75))
    quarter = clip(quarter, Halfspace(np.array([-1.0]), -0.25))
    assert MidpointPolicy1D()(quarter, u) == pytest.approx(0.5)


def test_midpoint_width_halves():
    state = Polytope.unit_box(1)
    v = np.array([0.3791])
    u = np.array([1.0])
    policy = MidpointPolicy1D()
    for t in range(1, 11):
        state, _ = play_round(state, v, u, t, policy, LossSpec("symmetric"))
    assert extent(state, u).width == pytest.approx(2.0 ** -10)


# -- planar profile machinery ------------------------------------------


def test_profile_square_axis():
    cycle = np.array([[0.0, 0], [1, 0], [1, 1], [0, 1]])
    prof = SectionProfile2D(cycle, np.array([1.0, 0.0]))
    assert prof.area == pytest.approx(1.0)
    assert prof.perimeter == pytest.approx(4.0)
    assert prof.chord_at(0.5) == pytest.approx(1.0)
    assert prof.h_max == pytest.approx(1.0)
    assert prof.area_below(0.3) == pytest.approx(0.3)
    assert prof.solve_area_below(0.5) == pytest.approx(0.5)
    # upper perimeter at p: two sides of length 1-p, the right edge, chord
    assert prof.upper_perimeter(0.25) == pytest.approx(2 * 0.75 + 1 + 1)
    p = prof.solve_upper_perimeter(2.0)
    assert prof.upper_perimeter(p) == pytest.approx(2.0, abs=1e-9)


def test_profile_triangle_diagonal():
    cycle = np.array([[0.0, 0], [1, 0], [0, 1]])
    u = np.array([1.0, 1.0]) / math.sqrt(2)
    prof = SectionProfile2D(cycle, u)
    assert prof.lo == pytest.approx(0.0)
    assert prof.hi == pytest.approx(1.0 / math.sqrt(2))
    assert prof.area == pytest.approx(0.5)
    p = prof.solve_area_below(0.25)
    assert prof.area_below(p) == pytest.approx(0.25, abs=1e-12)


def test_sym2d_square_symmetry():
    policy = TwoPotentialPolicy2D()
    assert policy(unit_square(), np.array([1.0, 0.0])) == pytest.approx(0.5)
    diag = policy.last_diagnostics
    assert diag["case"] in ("midpoint", "equal-area")


def test_sym2d_thin_slab_uses_midpoint():
    slab = clip(unit_square(), Halfspace(np.array([0.0, 1.0]), 0.1))
    policy = TwoPotentialPolicy2D()
    p = policy(slab, np.array([1.0, 0.0]))
    assert p == pytest.approx(0.5)
    assert policy.last_diagnostics["case"] == "midpoint"
    assert policy.last_diagnostics["w"] >= policy.last_diagnostics["h"]


def test_sym2d_tall_set_uses_equal_area():
    # long orthogonal to the context: must split area instead
    tri = clip(unit_square(), Halfspace(np.array([1.0, 0.0]), 0.2))
    policy = TwoPotentialPolicy2D()
    p = policy(tri, np.array([1.0, 0.0]))
    assert policy.last_diagnostics["case"] == "equal-area"
    prof = SectionProfile2D(
        np.array([[0, 0], [0.2, 0], [0.2, 1], [0, 1.0]]), np.array([1.0, 0.0]))
    assert prof.area_below(p) == pytest.approx(0.1, abs=1e-9)


def test_price2d_floor_case():
    policy = BucketedPricingPolicy2D(T=10)
    thin = clip(unit_square(), Halfspace(np.array([1.0, 0.0]), 0.05))
    p = policy(thin, np.array([1.0, 0.0]))
    assert p == pytest.approx(0.0)
    assert policy.last_diagnostics["case"] == "floor"


def test_price2d_runs_all_branches():
    rng = PortableRng(1)
    policy = BucketedPricingPolicy2D(T=1000)
    state = unit_square()
    v = np.array([0.31, 0.62])
    cases = set()
    for t in range(1, 200):
        raw = np.abs(rng.unit_vector(2))
        u = raw / np.linalg.norm(raw)
        state, rec = play_round(state, v, u, t, policy, LossSpec("pricing"))
        cases.add(policy.last_diagnostics["case"])
        assert rec.loss >= 0.0
        assert state.contains(v, 1e-7)
    assert "area-carve" in cases or "perimeter-shave" in cases


# -- the directional section estimator ----------------------------------


def clipped_cube(seed=0, cuts=2):
    rng = PortableRng(seed)
    P = Polytope.unit_box(3)
    for _ in range(cuts):
        u = rng.unit_vector(3)
        e = extent(P, u)
        Q = clip(P, Halfspace(u, e.lo + 0.6 * e.width))
        if not Q.is_empty and len(Q.vertices_array()) >= 4:
            P = Q
    return P


def test_section_estimator_exact_volume_matches_hull():
    P = clipped_cube(3)
    u = PortableRng(9).unit_vector(3)
    se = SectionEstimator(P, u, PortableRng(5))
    for frac in (0.25, 0.5, 0.75):
        p = se.lo + frac * (se.hi - se.lo)
        lower = clip(P, Halfspace(u, p))
        vol = hull_volume(lower.vertices_array())
        assert se.side_volume(p, -1) == pytest.approx(vol, rel=1e-9, abs=1e-12)
        total = hull_volume(P.vertices_array())
        assert se.side_volume(p, +1) == pytest.approx(total - vol,
                                                      rel=1e-9, abs=1e-12)


def test_section_estimator_agrees_with_generic_estimator():
    """Fast facet-based side estimates vs the standalone hull estimator."""
    P = clipped_cube(7)
    u = PortableRng(11).unit_vector(3)
    se = SectionEstimator(P, u, PortableRng(13), budget_bisect=2000)
    p = se.lo + 0.4 * (se.hi - se.lo)
    lower = clip(P, Halfspace(u, p))
    for j in (1, 2):
        fast, fast_hw = se.side_estimate(j, p, -1, "bisect")
        ref = intrinsic_volume(lower, j, budget=4000, rng=PortableRng(17),
                               method="monte-carlo")
        assert abs(fast - ref.value) <= 3 * (fast_hw + ref.half_width) + 1e-9, \
            (j, fast, ref.value)


def test_section_estimator_monotone_in_level():
    P = clipped_cube(19)
    u = PortableRng(23).unit_vector(3)
    se = SectionEstimator(P, u, PortableRng(29))
    levels = np.linspace(se.lo + 1e-6, se.hi - 1e-6, 9)
    for j in (1, 2, 3):
        vals = [se.side_estimate(j, p, -1, "bisect")[0] for p in levels]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:])), (j, vals)


def test_split_equal_balances_volume():
    P = clipped_cube(31)
    u = PortableRng(37).unit_vector(3)
    se = SectionEstimator(P, u, PortableRng(41))
    p, resid = se.split_equal(3)
    lo_v = se.side_volume(p, -1)
    hi_v = se.side_volume(p, +1)
    assert abs(lo_v - hi_v) <= 0.021 * (lo_v + hi_v)
    assert abs(resid) <= 0.02 + 1e-12


def test_split_drop_matches_target():
    P = clipped_cube(43)
    u = PortableRng(47).unit_vector(3)
    se = SectionEstimator(P, u, PortableRng(53))
    total = se.side_volume(se.hi + 1e-9, -1)
    target = 0.3 * total
    p = se.split_drop_upper(3, target)
    drop = total - se.side_volume(p, +1)
    assert drop == pytest.approx(target, rel=0.011)


def test_split_drop_unachievable_returns_none():
    P = Polytope.unit_box(3)
    u = np.array([1.0, 0.0, 0.0])
    se = SectionEstimator(P, u, PortableRng(3))
    assert se.split_drop_upper(3, 5.0) is None


# -- d-dimensional policies ---------------------------------------------


def test_symsearch_reduces_to_midpoint_1d():
    policy = build_policy("symsearch", seed=0)
    state = Polytope.unit_box(1)
    assert policy(state, np.array([1.0])) == pytest.approx(0.5)


def test_symsearch_square_symmetry():
    policy = build_policy("symsearch", seed=0)
    p = policy(unit_square(), np.array([1.0, 0.0]))
    assert p == pytest.approx(0.5, abs=0.02)


def test_symsearch_cube_axis():
    policy = build_policy("symsearch", seed=0)
    p = policy(Polytope.unit_box(3), np.array([1.0, 0.0, 0.0]))
    assert p == pytest.approx(0.5, abs=0.02)
    diag = policy.last_diagnostics
    assert diag["chosen_j"] in (1, 2, 3)
    assert diag["w"] == pytest.approx(0.5)
    assert math.isinf(diag["L"][0])


def test_symsearch_cone_volume_bound_on_game():
    """The chosen index always holds at least c_{j-1} w^j / j of V_j."""
    from ctxsearch.policies import constant_ladder
    from ctxsearch.adversaries import InstanceSpec, generate
    spec = InstanceSpec("uniform-random-contexts", d=3, T=60, seed=5)
    v, ctx = generate(spec)
    policy = build_policy("symsearch", seed=1)
    state = Polytope.unit_box(3)
    c = constant_ladder(3)
    for t in range(1, 61):
        state, rec = play_round(state, v, ctx[t - 1], t, policy,
                                LossSpec("symmetric"))
        diag = rec.policy_diagnostics
        if diag.get("mode") != "ladder":
            continue
        j = diag["chosen_j"]
        w = diag["w"]
        lower = c[j - 1] * w ** j / j
        assert diag["vj_state"] + diag["vj_state_hw"] >= lower - 1e-9, (t, diag)


def test_pricesearch_floor_below_horizon():
    policy = build_policy("pricesearch", T=10, seed=0)
    thin = clip(Polytope.unit_box(3), Halfspace(np.array([1.0, 0, 0]), 0.04))
    u = np.array([1.0, 0.0, 0.0])
    p = policy(thin, u)
    assert p == pytest.approx(0.0)
    assert policy.last_diagnostics["extra" if False else "case"] == "floor" or \
        policy.last_diagnostics.get("case") == "floor"


def test_pricesearch_1d_matches_ladder():
    policy = build_policy("pricesearch", T=10**6, seed=0)
    state = Polytope.unit_box(1)
    u = np.array([1.0])
    p = policy(state, u)
    lad = pricing_ladder(1)
    k = lad.bucket(1.0)
    assert p == pytest.approx(min(0.5 * lad.level(k + 1), 1.0))
    assert policy.last_diagnostics["chosen_J"] == 1


def test_pricesearch_phi_ladder_monotone_on_game():
    from ctxsearch.adversaries import InstanceSpec, generate
    rng = PortableRng(2)
    T = 80
    ctx = np.abs(rng.unit_vectors(T, 3))
    ctx = ctx / np.linalg.norm(ctx, axis=1)[:, None]
    spec = InstanceSpec("fixed", d=3, T=T, seed=2, v=(0.37, 0.81, 0.22),
                        contexts=tuple(map(tuple, ctx)))
    v, cc = generate(spec)
    policy = build_policy("pricesearch", T=T, seed=0)
    state = Polytope.unit_box(3)
    for t in range(1, T + 1):
        state, rec = play_round(state, v, cc[t - 1], t, policy,
                                LossSpec("pricing"))
        diag = rec.policy_diagnostics
        phi = diag.get("phi") or []
        hw = diag.get("phi_hw") or [0.0] * len(phi)
        for i in range(len(phi) - 1):
            assert phi[i + 1] <= phi[i] + hw[i] + hw[i + 1] + 1e-9, (t, phi)


def test_widthhalf_diagonal():
    policy = WidthHalvingPolicy()
    u = np.array([1.0, 1.0]) / math.sqrt(2)
    assert policy(unit_square(), u) == pytest.approx(math.sqrt(2) / 2)


def test_volhalf_square_axis():
    policy = VolumeHalvingPolicy(seed=0)
    assert policy(unit_square(), np.array([1.0, 0.0])) == pytest.approx(0.5, abs=1e-6)


def test_volhalf_halves_volume_on_game():
    from ctxsearch.adversaries import InstanceSpec, generate
    spec = InstanceSpec("uniform-random-contexts", d=3, T=30, seed=9)
    v, ctx = generate(spec)
    policy = build_policy("volhalf", seed=0)
    state = Polytope.unit_box(3)
    prev_vol = 1.0
    for t in range(1, 31):
        new_state, rec = play_round(state, v, ctx[t - 1], t, policy,
                                    LossSpec("symmetric"))
        vol = hull_volume(new_state.vertices_array())
        if rec.width > 1e-6:
            assert vol <= 0.55 * prev_vol + 1e-12
        state, prev_vol = new_state, vol


def test_policy_registry_rejects_unknown():
    with pytest.raises(ValueError):
        build_policy("magic")
    with pytest.raises(ValueError):
        build_policy("kl1d")   # missing horizon
