"""Synthetic attention dumps with constructed ground truth.

Fixtures are built from region-labelled grids at the finest scale: object
parts, background, and an optional background-like distractor patch. Each
scale's SA map is a row-softmaxed block-affinity matrix over region
memberships (block averages of the fine labels, so coarser scales blur
naturally). The CA class channel marks a sparse subset of object cells,
optionally concentrated near an anchor, plus uniform noise.

Two stress presets model the known failure modes of CA seeding: seeds that
are sparse and concentrated on one part of a heterogeneous object, and
seeds that leak onto a background patch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dump import (AggregatedAttention, AttentionDump, Manifest,
                   RawAttentionMap, load_dump, write_aggregated_dump,
                   write_full_dump)
from .errors import InputError
from .pngio import write_grayscale

BG, PART1, PART2, DISTRACTOR = 0, 1, 2, 3
_REGIONS = 4

GRID = 64  # finest label grid; ground truth replicates its cells to 512
TOKEN_COUNT = 8
CLASS_TOKEN = 5  # "a photo of a <label>" -> [bos, a, photo, of, a, <label>, eos, pad]


@dataclass(frozen=True)
class Affinity:
    """Softmax logits between region families, indexed [query, key].

    Queries and keys may couple asymmetrically (QK^T logits are not
    symmetric): background queries attend a distractor patch via
    ``bg_to_distractor`` while the distractor's own queries stay
    self-coherent.
    """

    within_object: float = 8.0
    within_background: float = 8.0
    object_background: float = 0.0
    part_link: float = 8.0
    distractor_self: float = 8.0
    bg_to_distractor: float = 0.0

    def matrix(self) -> np.ndarray:
        a = np.full((_REGIONS, _REGIONS), self.object_background)
        a[BG, BG] = self.within_background
        a[PART1, PART1] = a[PART2, PART2] = self.within_object
        a[PART1, PART2] = a[PART2, PART1] = self.part_link
        a[DISTRACTOR, DISTRACTOR] = self.distractor_self
        a[BG, DISTRACTOR] = self.bg_to_distractor
        return a


@dataclass(frozen=True)
class SynthSpec:
    """Geometry, affinities, seeding, and noise for one synthetic dump."""

    shape: str = "disk"  # disk | rectangle | two_blobs
    center: tuple[int, int] = (32, 32)
    radius: int = 20
    rect: tuple[int, int, int, int] = (12, 12, 52, 52)  # r0, c0, r1, c1 (exclusive)
    blob_centers: tuple[tuple[int, int], tuple[int, int]] = ((20, 20), (44, 44))
    blob_radii: tuple[int, int] = (10, 12)
    split_parts: bool = False
    distractor: tuple[int, int, int] | None = None  # (row, col, radius)
    affinity: dict[int, Affinity] = field(default_factory=dict)  # per scale
    seed_sparsity: float = 0.5
    concentration_anchor: tuple[int, int] | None = None  # 16-grid coords
    leak_cells: int = 0
    noise: float = 0.0
    rng_seed: int = 0
    scales: tuple[int, ...] = (16, 32, 64)
    include_scale_8: bool = False
    beta: float = 0.3  # threshold used to construct the 512^2 ground truth
    label: str = ""

    def scale_list(self) -> tuple[int, ...]:
        return ((8,) + tuple(self.scales)) if self.include_scale_8 else tuple(self.scales)

    def affinity_at(self, scale: int) -> Affinity:
        return self.affinity.get(scale, Affinity())


def _labels(spec: SynthSpec) -> np.ndarray:
    rr, cc = np.mgrid[0:GRID, 0:GRID]
    lab = np.full((GRID, GRID), BG, dtype=np.int64)
    if spec.shape == "disk":
        r0, c0 = spec.center
        if not (0 < r0 - spec.radius and r0 + spec.radius < GRID
                and 0 < c0 - spec.radius and c0 + spec.radius < GRID):
            raise InputError(f"disk at {spec.center} r={spec.radius} leaves the grid")
        inside = (rr - r0) ** 2 + (cc - c0) ** 2 <= spec.radius ** 2
        if spec.split_parts:
            lab[inside & (cc < c0)] = PART1
            lab[inside & (cc >= c0)] = PART2
        else:
            lab[inside] = PART1
    elif spec.shape == "rectangle":
        r0, c0, r1, c1 = spec.rect
        if not (0 <= r0 < r1 <= GRID and 0 <= c0 < c1 <= GRID):
            raise InputError(f"rectangle {spec.rect} leaves the grid")
        if spec.split_parts:
            mid = (c0 + c1) // 2
            lab[r0:r1, c0:mid] = PART1
            lab[r0:r1, mid:c1] = PART2
        else:
            lab[r0:r1, c0:c1] = PART1
    elif spec.shape == "two_blobs":
        for part, (center, radius) in zip(
                (PART1, PART2), zip(spec.blob_centers, spec.blob_radii)):
            r0, c0 = center
            if not (0 < r0 - radius and r0 + radius < GRID
                    and 0 < c0 - radius and c0 + radius < GRID):
                raise InputError(f"blob at {center} r={radius} leaves the grid")
            lab[(rr - r0) ** 2 + (cc - c0) ** 2 <= radius ** 2] = part
    else:
        raise InputError(f"unknown shape {spec.shape!r}")

    if spec.distractor is not None:
        r0, c0, radius = spec.distractor
        patch = (rr - r0) ** 2 + (cc - c0) ** 2 <= radius ** 2
        if not patch.any() or (patch & (lab != BG)).any():
            raise InputError("distractor must sit fully inside the background")
        lab[patch] = DISTRACTOR
    if not np.isin(lab, (PART1, PART2)).any():
        raise InputError("object region is empty")
    return lab


def _memberships(lab: np.ndarray, side: int) -> np.ndarray:
    f = GRID // side
    onehot = np.eye(_REGIONS)[lab]
    mu = onehot.reshape(side, f, side, f, _REGIONS).mean(axis=(1, 3))
    return mu.reshape(side * side, _REGIONS)


def _sa_map(mu: np.ndarray, logits: np.ndarray,
            gain: float = 1.0) -> np.ndarray:
    z = gain * (mu @ logits @ mu.T)
    z -= z.max(axis=1, keepdims=True)
    e = np.exp(z)
    sa = e / e.sum(axis=1, keepdims=True)
    side = int(np.sqrt(mu.shape[0]))
    return sa.reshape(side, side, side, side).astype(np.float32)


def _object_coverage(lab: np.ndarray, side: int) -> np.ndarray:
    mu = _memberships(lab, side).reshape(side, side, _REGIONS)
    return mu[:, :, PART1] + mu[:, :, PART2]


def _hot_cells(spec: SynthSpec, lab: np.ndarray,
               rng: np.random.Generator) -> list[tuple[int, int]]:
    cov = _object_coverage(lab, 16)
    eligible = [(i, j) for i in range(16) for j in range(16) if cov[i, j] >= 0.6]
    if not eligible:
        raise InputError("object too small: no mostly-object cells at scale 16")
    k = max(1, round(spec.seed_sparsity * len(eligible)))
    if spec.concentration_anchor is not None:
        ar, ac = spec.concentration_anchor
        eligible.sort(key=lambda p: ((p[0] - ar) ** 2 + (p[1] - ac) ** 2, p))
        hot = eligible[:k]
    else:
        chosen = rng.choice(len(eligible), size=min(k, len(eligible)), replace=False)
        hot = [eligible[i] for i in sorted(chosen)]
    if spec.leak_cells > 0:
        if spec.distractor is None:
            raise InputError("leak_cells requires a distractor patch")
        mu = _memberships(lab, 16).reshape(16, 16, _REGIONS)
        dis = [(i, j) for i in range(16) for j in range(16)
               if mu[i, j, DISTRACTOR] >= 0.6]
        if len(dis) < spec.leak_cells:
            raise InputError("distractor too small to place leak seeds at scale 16")
        dr, dc, _ = spec.distractor
        dis.sort(key=lambda p: ((p[0] - dr / 4) ** 2 + (p[1] - dc / 4) ** 2, p))
        hot += dis[:spec.leak_cells]
    return hot


def _ca_map(spec: SynthSpec, lab: np.ndarray, side: int,
            hot: list[tuple[int, int]], rng: np.random.Generator) -> np.ndarray:
    ca = np.full((side, side, TOKEN_COUNT), 0.1)
    ca[:, :, 0] = 0.9  # start-token channel soaks up diffuse attention
    if side == 16:
        chan = np.zeros((side, side))
        for i, j in hot:
            chan[i, j] = 1.0
        if spec.noise > 0.0:
            chan = np.clip(chan + spec.noise * rng.uniform(size=chan.shape), 0.0, 1.0)
    else:
        chan = _object_coverage(lab, side)
    ca[:, :, CLASS_TOKEN] = chan
    return ca.astype(np.float32)


def _direct_upsample(src: np.ndarray, out_side: int) -> np.ndarray:
    # straight half-pixel bilinear, kept local so ground truth never routes
    # through the production kernels
    src = np.asarray(src, dtype=np.float64)
    n = src.shape[0]
    x = (np.arange(out_side) + 0.5) * (n / out_side) - 0.5
    lo = np.floor(x).astype(int)
    frac = x - lo
    frac[lo < 0] = 0.0
    lo = np.clip(lo, 0, n - 1)
    hi = np.minimum(lo + 1, n - 1)
    frac[lo == hi] = 0.0
    a = src[np.ix_(lo, lo)]
    b = src[np.ix_(lo, hi)]
    c = src[np.ix_(hi, lo)]
    d = src[np.ix_(hi, hi)]
    fx, fy = frac[None, :], frac[:, None]
    top = a + fx * (b - a)
    bot = c + fx * (d - c)
    return top + fy * (bot - top)


def ground_truth(lab: np.ndarray, beta: float) -> np.ndarray:
    """512^2 binary truth: upsampled object indicator thresholded at beta."""
    indicator = np.isin(lab, (PART1, PART2)).astype(np.float64)
    return (_direct_upsample(indicator, 512) >= beta).astype(np.uint8)


def _render_image(lab: np.ndarray) -> np.ndarray:
    shades = np.array([210, 60, 80, 140], dtype=np.uint8)
    return np.repeat(np.repeat(shades[lab], 8, axis=0), 8, axis=1)


def make_synthetic_dump(out_dir: str | Path, spec: SynthSpec,
                        mode: str = "aggregated",
                        full_scales: tuple[int, ...] = (16,),
                        layers: int = 2,
                        timesteps: int = 2) -> tuple[AttentionDump, np.ndarray]:
    """Write a dump with known geometry; returns (dump, 512^2 truth mask).

    ``full`` mode stores per-layer / per-timestep raw maps (kept to small
    scales) whose temperatures are jittered per map; aggregated mode stores
    the constructed per-scale maps directly. Deterministic in ``rng_seed``.
    """
    rng = np.random.default_rng(spec.rng_seed)
    lab = _labels(spec)
    hot = _hot_cells(spec, lab, rng)
    label = spec.label or spec.shape
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    gt = ground_truth(lab, spec.beta)
    write_grayscale(gt * 255, out / "gt.png")
    write_grayscale(_render_image(lab), out / "image.png")

    manifest = Manifest(
        prompt=f"a photo of a {label}",
        class_token_indices=[CLASS_TOKEN],
        timestep_count=50 if mode == "aggregated" else timesteps,
        mode=mode,
        scales=[],
        tensors=[],
        image_path="image.png",
        generator={"model_id": "synthetic-block-affinity",
                   "sampler_seed": spec.rng_seed},
        class_label=label,
        extras={"ground_truth_path": "gt.png",
                "synthetic": {"shape": spec.shape, "beta": spec.beta,
                              "noise": spec.noise,
                              "seed_sparsity": spec.seed_sparsity}},
    )

    if mode == "aggregated":
        maps = {}
        for s in spec.scale_list():
            mu = _memberships(lab, s)
            sa = _sa_map(mu, spec.affinity_at(s).matrix())
            ca = _ca_map(spec, lab, s, hot, rng)
            maps[s] = AggregatedAttention(s, ca, sa)
        write_aggregated_dump(out, manifest, maps)
    elif mode == "full":
        if layers < 1 or timesteps < 1:
            raise InputError("full mode needs at least one layer and timestep")
        raw: list[RawAttentionMap] = []
        for s in full_scales:
            mu = _memberships(lab, s)
            logits = spec.affinity_at(s).matrix()
            base_ca = _ca_map(spec, lab, s, hot, rng).astype(np.float64)
            for layer in range(1, layers + 1):
                for t in range(1, timesteps + 1):
                    gain = 0.8 + 0.4 * rng.uniform()
                    sa = _sa_map(mu, logits, gain=gain)
                    ca = base_ca * (0.5 + 0.5 * rng.uniform()) \
                        + 0.05 * rng.uniform(size=base_ca.shape)
                    ca /= ca.sum(axis=2, keepdims=True)  # softmax-like rows
                    raw.append(RawAttentionMap("self", s, layer, t, sa))
                    raw.append(RawAttentionMap(
                        "cross", s, layer, t, ca.astype(np.float32)))
        manifest.scales = sorted(full_scales)
        write_full_dump(out, manifest, raw)
    else:
        raise InputError(f"unknown dump mode {mode!r}")

    return load_dump(out), gt


def clean_spec(shape: str = "disk", rng_seed: int = 0, noise: float = 0.0,
               **overrides) -> SynthSpec:
    """Well-separated fixture: block affinities, zero cross-coupling."""
    return SynthSpec(shape=shape, rng_seed=rng_seed, noise=noise, **overrides)


def concentrated_spec(rng_seed: int = 0, **overrides) -> SynthSpec:
    """Sparse seeds stuck on one part of a two-part object.

    Parts are linked at the coarse scale but barely at fine scales, so only
    iterative coarse-to-fine expansion covers the whole object.
    """
    kwargs = dict(
        shape="disk",
        split_parts=True,
        seed_sparsity=0.04,
        concentration_anchor=(8, 3),
        affinity={
            16: Affinity(part_link=8.0),
            32: Affinity(part_link=4.0),
            64: Affinity(part_link=2.0),
        },
        rng_seed=rng_seed,
        label="striped disk",
    )
    kwargs.update(overrides)
    return SynthSpec(**kwargs)


def background_leak_spec(rng_seed: int = 0, **overrides) -> SynthSpec:
    """Seeds leak onto a self-coherent background patch.

    The patch survives object-side expansion (its queries are
    self-coherent) but background queries attend it strongly, so the
    background stage reclaims and suppresses it.
    """
    leak_affinity = Affinity(distractor_self=8.0, bg_to_distractor=7.8)
    kwargs = dict(
        shape="disk",
        center=(32, 36),
        radius=18,
        distractor=(14, 10, 10),
        seed_sparsity=0.12,
        leak_cells=2,
        affinity={16: leak_affinity, 32: leak_affinity, 64: leak_affinity},
        rng_seed=rng_seed,
        label="spotted disk",
    )
    kwargs.update(overrides)
    return SynthSpec(**kwargs)


PRESETS = {
    "clean": clean_spec,
    "concentrated": concentrated_spec,
    "leak": background_leak_spec,
}
