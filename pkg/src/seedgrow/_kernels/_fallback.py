"""Pure-numpy implementations of the hot kernels.

Semantics must match ``_native`` within 1e-6; both accumulate in float64.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _source_coords(out_side: int, src_side: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Half-pixel-center source coordinates, split into (floor, floor+1, frac)."""
    x = (np.arange(out_side, dtype=np.float64) + 0.5) * (src_side / out_side) - 0.5
    lo = np.floor(x).astype(np.intp)
    frac = x - lo
    # clamp to edges
    frac[lo < 0] = 0.0
    lo = np.clip(lo, 0, src_side - 1)
    hi = np.minimum(lo + 1, src_side - 1)
    frac[lo == hi] = 0.0
    return lo, hi, frac


def upsample_bilinear_2d(src: np.ndarray, out_side: int) -> np.ndarray:
    """Bilinear resample of a square 2-D map to ``out_side`` per axis.

    Half-pixel centers with edge clamping; each output pixel is clipped to
    the min/max of its four source taps, so values never leave the input
    range and constant inputs reproduce exactly.
    """
    src = np.ascontiguousarray(src, dtype=np.float64)
    n = src.shape[0]
    r_lo, r_hi, fy = _source_coords(out_side, n)
    c_lo, c_hi, fx = _source_coords(out_side, n)

    a = src[np.ix_(r_lo, c_lo)]
    b = src[np.ix_(r_lo, c_hi)]
    c = src[np.ix_(r_hi, c_lo)]
    d = src[np.ix_(r_hi, c_hi)]

    fx = fx[None, :]
    fy = fy[:, None]
    top = a + fx * (b - a)
    bot = c + fx * (d - c)
    out = top + fy * (bot - top)

    lo = np.minimum(np.minimum(a, b), np.minimum(c, d))
    hi = np.maximum(np.maximum(a, b), np.maximum(c, d))
    return np.clip(out, lo, hi)


def seed_slice_mean(sa: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Mean of ``sa[i, j, :, :]`` over the seed coordinates, in float64."""
    s = sa.shape[0]
    flat = sa.reshape(s * s, s * s)
    idx = rows.astype(np.intp) * s + cols.astype(np.intp)
    acc = np.zeros(s * s, dtype=np.float64)
    for start in range(0, len(idx), 512):
        chunk = flat[idx[start:start + 512]].astype(np.float64, copy=False)
        acc += chunk.sum(axis=0)
    return (acc / len(idx)).reshape(s, s)


def weighted_slice_mean(sa: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted mean of SA slices: sum_ij w[i,j] * sa[i,j,:,:] / sum w."""
    s = sa.shape[0]
    w = np.ascontiguousarray(weights, dtype=np.float64).reshape(s * s)
    total = w.sum()
    if total <= 0:  # no signal: degrade to the unweighted mean
        w = np.ones(s * s, dtype=np.float64)
        total = float(s * s)
    flat = sa.reshape(s * s, s * s)
    acc = np.zeros(s * s, dtype=np.float64)
    for start in range(0, s * s, 512):
        chunk = flat[start:start + 512].astype(np.float64, copy=False)
        acc += w[start:start + 512] @ chunk
    return (acc / total).reshape(s, s)
