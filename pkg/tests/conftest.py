import numpy as np
import pytest

from seedgrow.synth import (background_leak_spec, clean_spec, concentrated_spec,
                            make_synthetic_dump)


def reference_upsample(src, out_side):
    """Independent bilinear oracle: scipy map_coordinates, half-pixel centers."""
    from scipy.ndimage import map_coordinates

    src = np.asarray(src, dtype=np.float64)
    n = src.shape[0]
    x = (np.arange(out_side) + 0.5) * (n / out_side) - 0.5
    x = np.clip(x, 0.0, n - 1.0)
    rows, cols = np.meshgrid(x, x, indexing="ij")
    return map_coordinates(src, [rows, cols], order=1, mode="nearest")


def brute_force_aggregate(maps):
    """Direct evaluation of the aggregation formula: mean of map / max(map)."""
    acc = np.zeros(np.asarray(maps[0]).shape, dtype=np.float64)
    for m in maps:
        m = np.asarray(m, dtype=np.float64)
        acc += m / m.max()
    return acc / len(maps)


@pytest.fixture(scope="session")
def clean_disk(tmp_path_factory):
    out = tmp_path_factory.mktemp("dump_clean_disk")
    return make_synthetic_dump(out, clean_spec("disk", rng_seed=11))


@pytest.fixture(scope="session")
def clean_rectangle(tmp_path_factory):
    out = tmp_path_factory.mktemp("dump_clean_rect")
    return make_synthetic_dump(out, clean_spec("rectangle", rng_seed=12))


@pytest.fixture(scope="session")
def concentrated(tmp_path_factory):
    out = tmp_path_factory.mktemp("dump_concentrated")
    return make_synthetic_dump(out, concentrated_spec(rng_seed=13))


@pytest.fixture(scope="session")
def background_leak(tmp_path_factory):
    out = tmp_path_factory.mktemp("dump_leak")
    return make_synthetic_dump(out, background_leak_spec(rng_seed=14))
