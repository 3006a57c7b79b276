"""Soft and final mask containers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import FULL_RESOLUTION
from .errors import InputError


@dataclass(frozen=True)
class SoftMask:
    """Square 2-D map with entries in [0, 1] at one grid scale (or 512)."""

    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"soft mask must be square 2-D, got shape {d.shape}")
        if not np.isfinite(d).all():
            raise InputError("soft mask has non-finite entries")
        if d.min() < 0.0 or d.max() > 1.0:
            raise InputError("soft mask entries leave [0, 1]")

    @property
    def scale(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class FinalMask:
    """Full-resolution result: thresholded soft mask plus its binarization.

    ``soft`` entries are 0 or >= beta; ``binary`` is 1 exactly where
    ``soft`` is positive.
    """

    soft: np.ndarray
    binary: np.ndarray
    class_label: str = ""

    def __post_init__(self):
        if self.soft.shape != (FULL_RESOLUTION, FULL_RESOLUTION):
            raise InputError(f"final mask must be {FULL_RESOLUTION}^2, "
                             f"got {self.soft.shape}")
        if self.binary.shape != self.soft.shape:
            raise InputError("binary/soft shape mismatch")
