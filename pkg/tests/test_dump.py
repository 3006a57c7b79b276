import json
from pathlib import Path

import numpy as np
import pytest

from seedgrow.dump import (AggregatedAttention, Manifest, RawAttentionMap,
                           load_dump, write_aggregated_dump, write_full_dump)
from seedgrow.errors import DumpError


def small_agg(scale, token_count=8, seed=0):
    rng = np.random.default_rng(seed + scale)
    ca = rng.uniform(size=(scale, scale, token_count)).astype(np.float32)
    sa = rng.uniform(size=(scale, scale, scale, scale)).astype(np.float32)
    return AggregatedAttention(scale, ca, sa)


def manifest(**overrides):
    fields = dict(prompt="a photo of a cat", class_token_indices=[5],
                  timestep_count=50, mode="aggregated", scales=[], tensors=[],
                  class_label="cat")
    fields.update(overrides)
    return Manifest(**fields)


def write_minimal(root, scales=(16, 32, 64)):
    maps = {s: small_agg(s) for s in scales}
    return write_aggregated_dump(root, manifest(), maps)


def test_minimal_aggregated_roundtrip(tmp_path):
    write_minimal(tmp_path)
    dump = load_dump(tmp_path)
    assert sorted(dump.aggregated) == [16, 32, 64]
    ca_count = sum(1 for t in dump.manifest.tensors if t["kind"] == "cross")
    sa_count = sum(1 for t in dump.manifest.tensors if t["kind"] == "self")
    assert ca_count == 3 and sa_count == 3
    assert dump.ca(16).shape == (16, 16, 8)
    assert dump.sa(32).shape == (32, 32, 32, 32)


def test_missing_tensor_file(tmp_path):
    write_minimal(tmp_path)
    (tmp_path / "tensors" / "ca_s16.atnb").unlink()
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_full_mode_counts(tmp_path):
    rng = np.random.default_rng(3)
    raws = []
    for layer in (1, 2):
        for t in (1, 2):
            raws.append(RawAttentionMap(
                "cross", 16, layer, t,
                rng.uniform(size=(16, 16, 8)).astype(np.float32)))
            raws.append(RawAttentionMap(
                "self", 16, layer, t,
                rng.uniform(size=(16, 16, 16, 16)).astype(np.float32)))
    write_full_dump(tmp_path, manifest(mode="full", timestep_count=2,
                                       scales=[16]), raws)
    dump = load_dump(tmp_path)
    assert sum(1 for m in dump.raw if m.kind == "cross") == 4
    assert sum(1 for m in dump.raw if m.kind == "self") == 4


def test_token_indices_out_of_range(tmp_path):
    maps = {16: small_agg(16, token_count=4)}
    write_aggregated_dump(tmp_path, manifest(class_token_indices=[9]), maps)
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_empty_token_indices(tmp_path):
    write_aggregated_dump(tmp_path, manifest(class_token_indices=[]),
                          {16: small_agg(16)})
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_shape_mismatch_with_manifest(tmp_path):
    write_minimal(tmp_path, scales=(16,))
    payload = json.loads((tmp_path / "manifest.json").read_text())
    payload["tensors"][0]["shape"] = [16, 16, 9]
    (tmp_path / "manifest.json").write_text(json.dumps(payload))
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_entry_order_is_irrelevant(tmp_path):
    write_minimal(tmp_path)
    before = load_dump(tmp_path)
    payload = json.loads((tmp_path / "manifest.json").read_text())
    payload["tensors"] = payload["tensors"][::-1]
    (tmp_path / "manifest.json").write_text(json.dumps(payload))
    after = load_dump(tmp_path)
    for s in (16, 32, 64):
        np.testing.assert_array_equal(before.ca(s), after.ca(s))
        np.testing.assert_array_equal(before.sa(s), after.sa(s))


def test_unknown_keys_ignored(tmp_path):
    write_minimal(tmp_path, scales=(16,))
    payload = json.loads((tmp_path / "manifest.json").read_text())
    payload["future_feature"] = {"nested": True}
    (tmp_path / "manifest.json").write_text(json.dumps(payload))
    dump = load_dump(tmp_path)
    assert dump.manifest.extras["future_feature"] == {"nested": True}


def test_missing_required_key(tmp_path):
    write_minimal(tmp_path, scales=(16,))
    payload = json.loads((tmp_path / "manifest.json").read_text())
    del payload["prompt"]
    (tmp_path / "manifest.json").write_text(json.dumps(payload))
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_values_outside_unit_interval_rejected(tmp_path):
    agg = small_agg(16)
    agg.sa[0, 0, 0, 0] = 1.5
    write_aggregated_dump(tmp_path, manifest(), {16: agg})
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_duplicate_scale_rejected(tmp_path):
    write_minimal(tmp_path, scales=(16,))
    payload = json.loads((tmp_path / "manifest.json").read_text())
    payload["tensors"].append(dict(payload["tensors"][0]))
    (tmp_path / "manifest.json").write_text(json.dumps(payload))
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_invalid_scale_rejected(tmp_path):
    write_minimal(tmp_path, scales=(16,))
    payload = json.loads((tmp_path / "manifest.json").read_text())
    payload["scales"] = [16, 24]
    (tmp_path / "manifest.json").write_text(json.dumps(payload))
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_full_mode_layer_range(tmp_path):
    raw = [RawAttentionMap("self", 16, 17, 1,
                           np.ones((16, 16, 16, 16), dtype=np.float32))]
    write_full_dump(tmp_path, manifest(mode="full", timestep_count=1,
                                       scales=[16]), raw)
    with pytest.raises(DumpError):
        load_dump(tmp_path)


def test_manifest_matches_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    write_minimal(tmp_path)
    schema = json.loads(
        (Path(__file__).parent.parent / "src" / "seedgrow" / "schemas"
         / "manifest.schema.json").read_text())
    payload = json.loads((tmp_path / "manifest.json").read_text())
    jsonschema.validate(payload, schema)
