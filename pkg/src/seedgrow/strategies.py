"""The three mask-generation strategies compared by the ablation suite.

* ``caa``      thresholds the aggregated cross-attention channel directly.
* ``ca_sa``    propagates the CA channel once through the scale-32 SA map.
* ``seediff``  runs the full seeded pipeline: seeds, iterative expansion,
               background refinement, binarization.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .config import PipelineConfig
from .dump import AttentionDump
from .expansion import Trace, iterative_expand, upsample_bilinear
from .masks import FinalMask, SoftMask
from .refine import background_mask, finalize, refine_with_background
from .seeding import class_channel, extract_seeds

CA_SA_SA_SCALE = 32


def run_caa(dump: AttentionDump, config: PipelineConfig) -> FinalMask:
    """Cross-attention aggregation baseline: raw channel, upsample, binarize.

    The channel is deliberately not max-renormalized; this path is a direct
    thresholding of the aggregated CA values.
    """
    agg = dump.attention(config.ca_seed_scale)
    chan = class_channel(agg, dump.manifest.class_token_indices,
                         renormalize=False)
    return finalize(chan, config.beta, dump.manifest.class_label)


def run_ca_sa(dump: AttentionDump, config: PipelineConfig) -> FinalMask:
    """CA-weighted single pass through the scale-32 SA map.

    The CA channel acts as a weight field over SA slices; the weighted mean
    reduces to elementwise multiplication when SA is the identity.
    """
    agg = dump.attention(config.ca_seed_scale)
    chan = class_channel(agg, dump.manifest.class_token_indices)
    if chan.scale < CA_SA_SA_SCALE:
        chan = upsample_bilinear(chan, CA_SA_SA_SCALE)
    sa = dump.sa(CA_SA_SA_SCALE)
    out = _kernels.weighted_slice_mean(sa, chan.data)
    peak = out.max()
    if peak > 0.0:
        out = out / peak
    mask = SoftMask(np.clip(out, 0.0, 1.0))
    return finalize(mask, config.beta, dump.manifest.class_label)


def run_seediff(dump: AttentionDump, config: PipelineConfig,
                trace: Trace | None = None) -> FinalMask:
    """Full pipeline: seeds, iterative expansion, background refinement."""
    agg = dump.attention(config.ca_seed_scale)
    chan = class_channel(agg, dump.manifest.class_token_indices)
    seeds = extract_seeds(chan, config.alpha)
    expanded = iterative_expand(dump, seeds, config, trace=trace)
    if config.background:
        final_scale = config.scale_schedule[-1]
        bg = background_mask(dump.sa(final_scale), expanded,
                             config.background_alpha,
                             renormalize=config.renormalize_expansion)
        refined = refine_with_background(expanded, bg)
        if trace is not None:
            trace.add_mask(f"background_s{final_scale}", bg)
            trace.add_mask(f"refined_s{final_scale}", refined)
    else:
        refined = expanded
    return finalize(refined, config.beta, dump.manifest.class_label)


def run_strategy(dump: AttentionDump, config: PipelineConfig,
                 trace: Trace | None = None) -> FinalMask:
    if config.strategy == "caa":
        return run_caa(dump, config)
    if config.strategy == "ca_sa":
        return run_ca_sa(dump, config)
    return run_seediff(dump, config, trace=trace)
