"""Seed extraction: thresholding a 2-D map into grid coordinates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dump import AggregatedAttention
from .errors import InputError
from .masks import SoftMask


@dataclass(frozen=True)
class SeedSet:
    """Non-empty set of (row, col) coordinates inside a scale x scale grid."""

    scale: int
    coords: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not self.coords:
            raise InputError("seed set is empty")
        for i, j in self.coords:
            if not (0 <= i < self.scale and 0 <= j < self.scale):
                raise InputError(f"seed ({i}, {j}) outside [0, {self.scale})^2")

    def __len__(self) -> int:
        return len(self.coords)

    def sorted(self) -> list[tuple[int, int]]:
        return sorted(self.coords)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column index vectors in deterministic (row, col) order."""
        pairs = self.sorted()
        rows = np.array([p[0] for p in pairs], dtype=np.intp)
        cols = np.array([p[1] for p in pairs], dtype=np.intp)
        return rows, cols


def class_channel(agg: AggregatedAttention, token_indices: list[int],
                  renormalize: bool = True) -> SoftMask:
    """Mean of the selected CA token channels, optionally max-renormalized.

    Multi-token class names average their sub-token channels. With
    ``renormalize`` the peak is rescaled to 1 so thresholds are scale-free;
    the raw channel is kept for the CA-only baseline.
    """
    token_count = agg.ca.shape[2]
    bad = [i for i in token_indices if not 0 <= i < token_count]
    if bad:
        raise InputError(f"token indices {bad} outside [0, {token_count})")
    if not token_indices:
        raise InputError("token index list is empty")
    chan = agg.ca[:, :, list(token_indices)].astype(np.float64).mean(axis=2)
    if renormalize:
        peak = chan.max()
        if peak > 0.0:
            chan = chan / peak
    return SoftMask(chan)


def extract_seeds(mask: SoftMask, alpha: float) -> SeedSet:
    """Coordinates where the mask is >= alpha.

    A map entirely below alpha degrades to its argmax (ties broken by the
    smallest (row, col) lexicographically) so downstream expansion always
    has at least one seed.
    """
    data = mask.data
    hits = np.argwhere(data >= alpha)
    if len(hits) == 0:
        flat = int(np.argmax(data))  # first occurrence = lexicographic min
        hits = [(flat // data.shape[1], flat % data.shape[1])]
    coords = frozenset((int(i), int(j)) for i, j in hits)
    return SeedSet(scale=mask.scale, coords=coords)
