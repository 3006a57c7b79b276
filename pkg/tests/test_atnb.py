import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedgrow.atnb import read_tensor, write_tensor
from seedgrow.errors import EncodingError, FormatError, IoError


def header_bytes(shape):
    return (b"ATNB" + struct.pack("<H", 1) + bytes([0, 0])
            + struct.pack("<I", len(shape))
            + struct.pack(f"<{len(shape)}Q", *shape))


def test_zero_singleton_layout(tmp_path):
    path = tmp_path / "t.atnb"
    write_tensor(np.zeros((1, 1), dtype=np.float32), path)
    raw = path.read_bytes()
    head = header_bytes((1, 1))
    assert raw[:len(head)] == head
    assert raw[len(head):] == b"\x00\x00\x00\x00"  # 0.0 encodes as all-zero bytes


def test_2x2_layout(tmp_path):
    path = tmp_path / "t.atnb"
    write_tensor(np.arange(4, dtype=np.float32).reshape(2, 2), path)
    raw = path.read_bytes()
    ndim, = struct.unpack_from("<I", raw, 8)
    dims = struct.unpack_from("<2Q", raw, 12)
    assert ndim == 2 and dims == (2, 2)
    assert len(raw) - (12 + 16) == 16  # 4 floats


def test_roundtrip_half(tmp_path):
    path = tmp_path / "t.atnb"
    write_tensor(np.array([0.5], dtype=np.float32), path)
    out = read_tensor(path)
    assert out.shape == (1,) and out[0] == 0.5


def test_write_is_deterministic(tmp_path):
    rng = np.random.default_rng(5)
    data = rng.uniform(size=(3, 4, 5)).astype(np.float32)
    write_tensor(data, tmp_path / "a.atnb")
    write_tensor(data, tmp_path / "b.atnb")
    assert (tmp_path / "a.atnb").read_bytes() == (tmp_path / "b.atnb").read_bytes()


def test_roundtrip_64_to_the_4_bit_exact(tmp_path):
    rng = np.random.default_rng(1234)
    data = rng.standard_normal((64, 64, 64, 64), dtype=np.float32)
    path = tmp_path / "big.atnb"
    write_tensor(data, path)
    write_tensor(data, tmp_path / "big2.atnb")
    assert path.read_bytes() == (tmp_path / "big2.atnb").read_bytes()
    out = read_tensor(path)
    assert out.dtype == np.float32
    assert out.tobytes() == data.tobytes()


def test_bad_magic(tmp_path):
    path = tmp_path / "t.atnb"
    write_tensor(np.ones(2, dtype=np.float32), path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        read_tensor(path)


def test_bad_version_and_dtype(tmp_path):
    path = tmp_path / "t.atnb"
    write_tensor(np.ones(2, dtype=np.float32), path)
    raw = bytearray(path.read_bytes())
    raw[4] = 9
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        read_tensor(path)
    raw[4] = 1
    raw[6] = 7
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        read_tensor(path)


def test_truncated_payload(tmp_path):
    path = tmp_path / "t.atnb"
    head = header_bytes((2, 2))
    path.write_bytes(head + b"\x00" * 12)  # 12 bytes, 16 expected
    with pytest.raises(FormatError):
        read_tensor(path)


def test_truncated_header(tmp_path):
    path = tmp_path / "t.atnb"
    path.write_bytes(b"ATNB\x01\x00")
    with pytest.raises(FormatError):
        read_tensor(path)


def test_trailing_garbage_rejected(tmp_path):
    path = tmp_path / "t.atnb"
    write_tensor(np.ones((2, 2), dtype=np.float32), path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(FormatError):
        read_tensor(path)


def test_non_finite_rejected(tmp_path):
    with pytest.raises(EncodingError):
        write_tensor(np.array([np.nan]), tmp_path / "t.atnb")
    with pytest.raises(EncodingError):
        write_tensor(np.array([np.inf]), tmp_path / "t.atnb")


def test_rank_limits(tmp_path):
    with pytest.raises(EncodingError):
        write_tensor(np.float32(1.0).reshape(()), tmp_path / "t.atnb")
    with pytest.raises(EncodingError):
        write_tensor(np.ones((1, 1, 1, 1, 1)), tmp_path / "t.atnb")


def test_unwritable_destination(tmp_path):
    with pytest.raises(IoError):
        write_tensor(np.ones(2), tmp_path / "missing" / "deep" / "t.atnb")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=4),
       st.integers(min_value=0, max_value=2**32 - 1))
def test_roundtrip_property(tmp_path_factory, shape, seed):
    rng = np.random.default_rng(seed)
    data = rng.uniform(-10, 10, size=shape).astype(np.float32)
    path = tmp_path_factory.mktemp("rt") / "t.atnb"
    write_tensor(data, path)
    out = read_tensor(path)
    assert out.shape == tuple(shape)
    assert out.tobytes() == data.tobytes()
