"""seedgrow: per-class segmentation masks from diffusion attention dumps.

The pipeline thresholds an aggregated cross-attention channel into seeds,
iteratively expands them through multi-scale self-attention maps, refines
the result with an expanded background mask, and binarizes at full
resolution. Ships with a synthetic fixture generator, an IoU evaluator,
and a batch CLI.
"""

from ._kernels import BACKEND
from .aggregate import aggregate_dump, aggregate_scale, normalize_map
from .atnb import read_tensor, write_tensor
from .config import PipelineConfig
from .dump import (AggregatedAttention, AttentionDump, Manifest,
                   RawAttentionMap, load_dump)
from .errors import (DegenerateMapError, DumpError, EncodingError, FormatError,
                     InputError, IoError, SeedgrowError)
from .expansion import Trace, expand_region, iterative_expand, upsample_bilinear
from .masks import FinalMask, SoftMask
from .metrics import EvalReport, evaluate, iou
from .refine import (background_mask, finalize, invert_mask,
                     refine_with_background)
from .seeding import SeedSet, class_channel, extract_seeds
from .strategies import run_ca_sa, run_caa, run_seediff, run_strategy

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AggregatedAttention", "AttentionDump", "Manifest", "RawAttentionMap",
    "PipelineConfig", "SeedSet", "SoftMask", "FinalMask", "Trace",
    "EvalReport",
    "SeedgrowError", "EncodingError", "IoError", "FormatError", "DumpError",
    "DegenerateMapError", "InputError",
    "read_tensor", "write_tensor", "load_dump",
    "normalize_map", "aggregate_scale", "aggregate_dump",
    "class_channel", "extract_seeds",
    "expand_region", "upsample_bilinear", "iterative_expand",
    "invert_mask", "background_mask", "refine_with_background", "finalize",
    "run_caa", "run_ca_sa", "run_seediff", "run_strategy",
    "iou", "evaluate",
]
