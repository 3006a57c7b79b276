"""Background-mask refinement and final mask production.

The expanded object mask is inverted to seed the background, the background
is expanded through the same SA machinery, and the object mask is damped by
the background's complement. The refined map is then upsampled to full
resolution and binarized.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .config import FULL_RESOLUTION
from .errors import InputError
from .masks import FinalMask, SoftMask
from .seeding import extract_seeds
from .expansion import expand_region


def invert_mask(mask: SoftMask) -> SoftMask:
    """Elementwise 1 - mask."""
    return SoftMask(1.0 - mask.data)


def background_mask(sa: np.ndarray, expanded: SoftMask, alpha: float,
                    renormalize: bool = True) -> SoftMask:
    """Seed the inverted object mask and expand the background through SA."""
    side = sa.shape[0]
    if expanded.scale != side:
        raise InputError(
            f"expanded mask at scale {expanded.scale}, SA at scale {side}")
    bg_seeds = extract_seeds(invert_mask(expanded), alpha)
    return expand_region(sa, bg_seeds, renormalize=renormalize)


def refine_with_background(object_mask: SoftMask, bg_mask: SoftMask) -> SoftMask:
    """Damp background regions: (1 - bg) * object, elementwise."""
    if object_mask.scale != bg_mask.scale:
        raise InputError(
            f"scale mismatch: object {object_mask.scale}, "
            f"background {bg_mask.scale}")
    return SoftMask((1.0 - bg_mask.data) * object_mask.data)


def finalize(refined: SoftMask, beta: float, class_label: str = "") -> FinalMask:
    """Upsample to full resolution and zero everything below beta.

    Values >= beta survive unchanged (boundary included); the binary mask is
    the support of the thresholded soft mask.
    """
    if refined.scale < FULL_RESOLUTION:
        full = _kernels.upsample_bilinear_2d(refined.data, FULL_RESOLUTION)
    elif refined.scale == FULL_RESOLUTION:
        full = np.asarray(refined.data, dtype=np.float64)
    else:
        raise InputError(f"mask scale {refined.scale} exceeds {FULL_RESOLUTION}")
    keep = full >= beta
    soft = np.where(keep, full, 0.0)
    binary = keep.astype(np.uint8)
    return FinalMask(soft=soft, binary=binary, class_label=class_label)
