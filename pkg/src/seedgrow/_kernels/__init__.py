"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy fallback
is used otherwise. ``SEEDGROW_BACKEND=python`` forces the fallback,
``SEEDGROW_BACKEND=native`` demands the extension (ImportError if absent).
Both backends agree within 1e-6 on all kernels; results are deterministic
within a backend.
"""

import os

_requested = os.environ.get("SEEDGROW_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _fallback as impl
elif _requested == "native":
    from . import _native as impl  # type: ignore[no-redef]
else:
    try:
        from . import _native as impl  # type: ignore[no-redef]
    except ImportError:
        from . import _fallback as impl

BACKEND = impl.BACKEND
upsample_bilinear_2d = impl.upsample_bilinear_2d
seed_slice_mean = impl.seed_slice_mean
weighted_slice_mean = impl.weighted_slice_mean
