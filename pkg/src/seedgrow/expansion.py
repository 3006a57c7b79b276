"""Region expansion: spread seed attention through self-attention slices.

One iteration averages the SA affinity fields of all seeds, the mask is
bilinearly upsampled to the next scale, and new seeds are thresholded from
it. At the last schedule scale only the expansion runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import PipelineConfig
from .dump import AttentionDump
from .errors import InputError
from .masks import SoftMask
from .seeding import SeedSet, class_channel, extract_seeds


@dataclass
class Trace:
    """Collects intermediate masks and seed sets when tracing is enabled."""

    masks: list[tuple[str, SoftMask]] = field(default_factory=list)
    seeds: list[tuple[str, SeedSet]] = field(default_factory=list)

    def add_mask(self, name: str, mask: SoftMask) -> None:
        self.masks.append((name, mask))

    def add_seeds(self, name: str, seeds: SeedSet) -> None:
        self.seeds.append((name, seeds))


def expand_region(sa: np.ndarray, seeds: SeedSet,
                  renormalize: bool = True) -> SoftMask:
    """Mean of the seeds' SA slices, rescaled so the peak is 1.

    Raw SA rows are softmax outputs averaged over many maps, so their
    absolute magnitude is tiny; renormalization keeps a fixed threshold
    usable across scales. Pass ``renormalize=False`` for the raw mean.
    """
    side = sa.shape[0]
    if sa.shape != (side, side, side, side):
        raise InputError(f"SA tensor has shape {sa.shape}, expected 4-D square")
    if seeds.scale != side:
        raise InputError(f"seeds at scale {seeds.scale}, SA at scale {side}")
    rows, cols = seeds.arrays()
    out = _kernels.seed_slice_mean(sa, rows, cols)
    if renormalize:
        peak = out.max()
        if peak > 0.0:
            out = out / peak
    return SoftMask(np.clip(out, 0.0, 1.0))


def upsample_bilinear(mask: SoftMask, target: int) -> SoftMask:
    """Bilinear upsample with half-pixel centers and edge clamping."""
    if target <= mask.scale:
        raise InputError(f"target {target} must exceed source scale {mask.scale}")
    return SoftMask(_kernels.upsample_bilinear_2d(mask.data, target))


def iterative_expand(dump: AttentionDump, initial_seeds: SeedSet,
                     config: PipelineConfig,
                     trace: Trace | None = None) -> SoftMask:
    """Run the expand / upsample / re-seed loop over the scale schedule.

    Returns the expansion at the last schedule scale; no upsampling or
    re-seeding happens there.
    """
    schedule = config.scale_schedule
    if initial_seeds.scale != schedule[0]:
        raise InputError(
            f"initial seeds at scale {initial_seeds.scale}, "
            f"schedule starts at {schedule[0]}")
    seeds = initial_seeds
    if trace is not None:
        trace.add_seeds(f"seeds_s{seeds.scale}", seeds)
    mask: SoftMask | None = None
    for step, scale in enumerate(schedule):
        sa = dump.sa(scale)
        mask = expand_region(sa, seeds, renormalize=config.renormalize_expansion)
        if trace is not None:
            trace.add_mask(f"expanded_s{scale}", mask)
        if step == len(schedule) - 1:
            break
        nxt = schedule[step + 1]
        upsampled = upsample_bilinear(mask, nxt)
        if trace is not None:
            trace.add_mask(f"upsampled_s{nxt}", upsampled)
        if config.reseed_from_ca:
            chan = class_channel(dump.attention(nxt),
                                 dump.manifest.class_token_indices)
            seeds = extract_seeds(chan, config.alpha)
        else:
            seeds = extract_seeds(upsampled, config.alpha)
        if trace is not None:
            trace.add_seeds(f"seeds_s{nxt}", seeds)
    assert mask is not None
    return mask
