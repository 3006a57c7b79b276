"""Resolution-grouped aggregation of raw attention maps.

Each map is divided by its global maximum, then the normalized maps of one
(kind, scale) group are averaged uniformly over all layers and timesteps.
Accumulation runs in float64; the result is cast to float32.
"""

from __future__ import annotations

import numpy as np

from .dump import AggregatedAttention, AttentionDump, RawAttentionMap, check_scale
from .errors import DegenerateMapError, InputError


def normalize_map(map_data: np.ndarray | RawAttentionMap,
                  per_token: bool = False) -> np.ndarray:
    """Divide a map by its maximum so the peak value is exactly 1.

    ``per_token`` switches a cross-attention map to per-channel maxima over
    its token axis (all-zero channels stay zero); the default is the global
    maximum over all axes.
    """
    data = map_data.data if isinstance(map_data, RawAttentionMap) else map_data
    data = np.asarray(data, dtype=np.float64)
    if per_token and data.ndim == 3:
        peaks = data.max(axis=(0, 1))
        if peaks.max() <= 0.0:
            raise DegenerateMapError("attention map is identically zero")
        safe = np.where(peaks > 0.0, peaks, 1.0)
        return data / safe
    peak = data.max()
    if peak <= 0.0:
        raise DegenerateMapError("attention map is identically zero")
    return data / peak


def aggregate_scale(maps: list[RawAttentionMap], scale: int,
                    per_token: bool = False) -> np.ndarray:
    """Uniform mean of the max-normalized maps of one (kind, scale) group."""
    check_scale(scale)
    if not maps:
        raise InputError("no maps to aggregate")
    kind = maps[0].kind
    for m in maps:
        if m.scale != scale:
            raise InputError(f"map at scale {m.scale} in a scale-{scale} group")
        if m.kind != kind:
            raise InputError(f"mixed kinds {kind!r} and {m.kind!r} in one group")
    acc = np.zeros(maps[0].data.shape, dtype=np.float64)
    for m in maps:
        acc += normalize_map(m.data, per_token=per_token)
    return (acc / len(maps)).astype(np.float32)


def aggregate_dump(dump: AttentionDump, per_token: bool = False) -> AttentionDump:
    """Aggregate a full-mode dump in place, filling ``dump.aggregated``."""
    if dump.manifest.mode == "aggregated":
        return dump
    groups: dict[tuple[str, int], list[RawAttentionMap]] = {}
    for m in dump.raw:
        groups.setdefault((m.kind, m.scale), []).append(m)
    scales = sorted({s for _, s in groups})
    for s in scales:
        if ("cross", s) not in groups or ("self", s) not in groups:
            continue
        ca = aggregate_scale(groups[("cross", s)], s, per_token=per_token)
        sa = aggregate_scale(groups[("self", s)], s)
        dump.aggregated[s] = AggregatedAttention(s, ca, sa).validate()
    return dump
