"""Instance generators: shapes, determinism, hard-instance structure."""

import numpy as np
import pytest

from ctxsearch.adversaries import (
    BadDimensionError,
    InstanceSpec,
    generate,
    instance_to_json_dict,
    subset_overlap_fraction,
)


def test_coordinate_cycling_layout():
    spec = InstanceSpec("coordinate-cycling", d=2, T=4, seed=0)
    _, ctx = generate(spec)
    expected = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=float)
    assert np.array_equal(ctx, expected)


def test_uniform_contexts_unit_norm_and_interior_v():
    spec = InstanceSpec("uniform-random-contexts", d=4, T=200, seed=3)
    v, ctx = generate(spec)
    assert np.allclose(np.linalg.norm(ctx, axis=1), 1.0, atol=1e-12)
    assert np.all(v >= 1e-6) and np.all(v <= 1 - 1e-6)


def test_generation_is_deterministic():
    spec = InstanceSpec("uniform-random-contexts", d=3, T=50, seed=11)
    v1, c1 = generate(spec)
    v2, c2 = generate(spec)
    assert np.array_equal(v1, v2)
    assert np.array_equal(c1, c2)


def test_subset_instance_support_pattern():
    spec = InstanceSpec("subset-instance", d=8, T=64, seed=5)
    v, ctx = generate(spec)
    assert np.array_equal(v, np.zeros(8))
    for row in ctx:
        support = np.flatnonzero(row)
        assert len(support) == 2            # d/4 active coordinates
        assert np.allclose(row[support], 1.0 / np.sqrt(2.0))
    assert np.allclose(np.linalg.norm(ctx, axis=1), 1.0, atol=1e-12)


def test_subset_instance_dimension_guard():
    with pytest.raises(BadDimensionError):
        InstanceSpec("subset-instance", d=12, T=10, seed=0)


def test_subset_overlap_statistic():
    spec = InstanceSpec("subset-instance", d=16, T=200, seed=7)
    frac = subset_overlap_fraction(spec, limit=200)
    assert frac > 0.95


def test_fixed_instance_roundtrip():
    ctx = ((1.0, 0.0), (0.0, 1.0))
    spec = InstanceSpec("fixed", d=2, T=2, seed=0, v=(0.25, 0.75),
                        contexts=ctx)
    v, c = generate(spec)
    assert v.tolist() == [0.25, 0.75]
    assert c.shape == (2, 2)


def test_fixed_instance_needs_v_and_contexts():
    with pytest.raises(ValueError):
        InstanceSpec("fixed", d=2, T=2, seed=0)


def test_v_box_validation():
    with pytest.raises(ValueError):
        InstanceSpec("uniform-random-contexts", d=2, T=2, seed=0, v=(1.5, 0.0))


def test_json_export_replayable():
    spec = InstanceSpec("subset-instance", d=8, T=5, seed=1)
    payload = instance_to_json_dict(spec)
    assert payload["kind"] == "subset-instance"
    assert len(payload["contexts"]) == 5
    v, ctx = generate(spec)
    assert payload["v"] == v.tolist()
    assert payload["contexts"] == ctx.tolist()
