import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from conftest import brute_force_aggregate
from seedgrow.aggregate import aggregate_dump, aggregate_scale, normalize_map
from seedgrow.dump import RawAttentionMap
from seedgrow.errors import DegenerateMapError, InputError
from seedgrow.synth import clean_spec, make_synthetic_dump


def raw(data, kind="self", scale=16, layer=1, t=1):
    return RawAttentionMap(kind, scale, layer, t, np.asarray(data, dtype=np.float32))


def sa_of(maps):
    """Lift small 2-D grids into (s, s, s, s)-agnostic raw maps at scale 16."""
    out = []
    for i, m in enumerate(maps):
        m = np.asarray(m, dtype=np.float64)
        tile = np.zeros((16, 16, 16, 16), dtype=np.float32)
        tile[:m.shape[0], :m.shape[1], 0, 0] = m
        out.append(raw(tile, layer=1 + i % 16, t=1 + i // 16))
    return out


def test_normalize_divides_by_max():
    out = normalize_map(np.array([[0.2, 0.4]]))
    np.testing.assert_allclose(out, [[0.5, 1.0]])
    assert out.max() == 1.0


def test_normalize_constant_gives_ones():
    out = normalize_map(np.full((2, 2), 0.37))
    np.testing.assert_array_equal(out, np.ones((2, 2)))


def test_normalize_zero_map_rejected():
    with pytest.raises(DegenerateMapError):
        normalize_map(np.zeros((1, 2)))


def test_aggregate_single_map_is_normalized_self():
    m = raw(np.random.default_rng(0).uniform(0.1, 1.0, size=(16, 16, 16, 16)))
    out = aggregate_scale([m], 16)
    np.testing.assert_allclose(out, normalize_map(m.data), rtol=0, atol=1e-7)


def test_aggregate_two_maps_hand_computed():
    # grids [[0, 1]] and [[1, 1]]: normalized then averaged -> [[0.5, 1.0]]
    maps = sa_of([np.array([[0.0, 1.0]]), np.array([[1.0, 1.0]])])
    out = aggregate_scale(maps, 16)
    np.testing.assert_allclose(out[0, :2, 0, 0], [0.5, 1.0], atol=1e-7)


def test_aggregate_replication_invariant():
    rng = np.random.default_rng(1)
    m = raw(rng.uniform(0.1, 1.0, size=(16, 16, 16, 16)))
    one = aggregate_scale([m], 16)
    four = aggregate_scale([raw(m.data, layer=k + 1) for k in range(4)], 16)
    np.testing.assert_allclose(one, four, atol=1e-7)


def test_aggregate_mixed_inputs_rejected():
    a = raw(np.ones((16, 16, 16, 16)))
    b = raw(np.ones((32, 32, 32, 32)), scale=32)
    with pytest.raises(InputError):
        aggregate_scale([a, b], 16)
    c = raw(np.ones((16, 16, 8)), kind="cross")
    with pytest.raises(InputError):
        aggregate_scale([a, c], 16)
    with pytest.raises(InputError):
        aggregate_scale([], 16)


@settings(max_examples=30, deadline=None)
@given(hnp.arrays(np.float64, (3, 4, 4),
                  elements=st.floats(0.0, 1.0, allow_nan=False)),
       st.permutations(range(3)),
       st.floats(0.01, 100.0))
def test_aggregate_properties(stack, order, gain):
    stack = stack + 0.01  # keep every map non-degenerate
    maps = []
    for i in range(3):
        tile = np.zeros((16, 16, 16, 16), dtype=np.float64)
        tile[:4, :4, 0, 0] = stack[i]
        maps.append(raw(tile, layer=i + 1))
    base = aggregate_scale(maps, 16)
    assert base.min() >= 0.0 and base.max() <= 1.0 + 1e-7

    permuted = aggregate_scale([maps[i] for i in order], 16)
    np.testing.assert_allclose(base, permuted, atol=1e-6)

    scaled = [raw(maps[0].data * gain, layer=1)] + maps[1:]
    np.testing.assert_allclose(base, aggregate_scale(scaled, 16), atol=1e-6)


def test_matches_brute_force_on_full_dump(tmp_path):
    dump, _ = make_synthetic_dump(tmp_path, clean_spec(rng_seed=3),
                                  mode="full", layers=4, timesteps=4)
    for kind in ("self", "cross"):
        group = [m for m in dump.raw if m.kind == kind]
        assert len(group) == 16
        expected = brute_force_aggregate([m.data for m in group])
        got = aggregate_scale(group, 16)
        np.testing.assert_allclose(got, expected, atol=1e-6)


def test_aggregate_dump_fills_axes(tmp_path):
    dump, _ = make_synthetic_dump(tmp_path, clean_spec(rng_seed=4),
                                  mode="full", layers=2, timesteps=2)
    aggregate_dump(dump)
    assert 16 in dump.aggregated
    agg = dump.aggregated[16]
    assert agg.ca.shape == (16, 16, 8)
    assert agg.sa.shape == (16, 16, 16, 16)


def test_per_token_normalization_switch():
    rng = np.random.default_rng(2)
    data = rng.uniform(0.1, 1.0, size=(16, 16, 8))
    m = raw(data, kind="cross")
    global_out = aggregate_scale([m], 16)
    per_token = aggregate_scale([m], 16, per_token=True)
    np.testing.assert_allclose(global_out, data / data.max(), atol=1e-7)
    np.testing.assert_allclose(per_token,
                               data / data.max(axis=(0, 1), keepdims=True),
                               atol=1e-7)
