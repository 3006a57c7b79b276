"""Attention dump container: manifest.json plus ATNB tensor files.

A dump directory captures one generation session. ``aggregated`` mode stores
one cross-attention (CA) and one self-attention (SA) tensor per scale;
``full`` mode stores the raw per-layer, per-timestep maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .atnb import read_tensor, write_tensor
from .errors import DumpError

VALID_SCALES = (8, 16, 32, 64)

MANIFEST_NAME = "manifest.json"
REQUIRED_KEYS = ("prompt", "class_token_indices", "timestep_count", "mode",
                 "scales", "tensors")


def check_scale(side: int) -> int:
    if side not in VALID_SCALES:
        raise DumpError(f"invalid scale {side}; expected one of {VALID_SCALES}")
    return side


@dataclass(frozen=True)
class RawAttentionMap:
    """One captured attention map before aggregation."""

    kind: str  # "cross" | "self"
    scale: int
    layer_index: int
    timestep: int
    data: np.ndarray

    def validate(self, token_count: int | None = None,
                 timestep_count: int | None = None) -> "RawAttentionMap":
        check_scale(self.scale)
        if self.kind not in ("cross", "self"):
            raise DumpError(f"unknown attention kind {self.kind!r}")
        if not 1 <= self.layer_index <= 16:
            raise DumpError(f"layer index {self.layer_index} outside [1, 16]")
        if timestep_count is not None and not 1 <= self.timestep <= timestep_count:
            raise DumpError(
                f"timestep {self.timestep} outside [1, {timestep_count}]")
        s = self.scale
        shape = self.data.shape
        if self.kind == "self":
            if shape != (s, s, s, s):
                raise DumpError(f"self map at {s} has shape {shape}")
        else:
            if len(shape) != 3 or shape[:2] != (s, s):
                raise DumpError(f"cross map at {s} has shape {shape}")
            if token_count is not None and shape[2] != token_count:
                raise DumpError(
                    f"cross map token axis {shape[2]} != expected {token_count}")
        if not np.isfinite(self.data).all() or (self.data < 0).any():
            raise DumpError("attention map entries must be finite and >= 0")
        return self


@dataclass(frozen=True)
class AggregatedAttention:
    """Per-scale aggregated CA (H, W, P) and SA (H, W, H, W) maps in [0, 1]."""

    scale: int
    ca: np.ndarray
    sa: np.ndarray

    def validate(self) -> "AggregatedAttention":
        s = check_scale(self.scale)
        if len(self.ca.shape) != 3 or self.ca.shape[:2] != (s, s):
            raise DumpError(f"aggregated CA at {s} has shape {self.ca.shape}")
        if self.sa.shape != (s, s, s, s):
            raise DumpError(f"aggregated SA at {s} has shape {self.sa.shape}")
        for name, t in (("CA", self.ca), ("SA", self.sa)):
            if not np.isfinite(t).all():
                raise DumpError(f"aggregated {name} at {s} has non-finite entries")
            if t.min() < 0.0 or t.max() > 1.0:
                raise DumpError(f"aggregated {name} at {s} leaves [0, 1]")
            if t.max() == 0.0:
                raise DumpError(f"aggregated {name} at {s} is identically zero")
        return self


@dataclass
class Manifest:
    prompt: str
    class_token_indices: list[int]
    timestep_count: int
    mode: str  # "aggregated" | "full"
    scales: list[int]
    tensors: list[dict]
    image_path: str | None = None
    generator: dict = field(default_factory=dict)
    class_label: str = ""
    extras: dict = field(default_factory=dict)  # unknown keys, preserved

    @classmethod
    def from_json(cls, payload: dict) -> "Manifest":
        missing = [k for k in REQUIRED_KEYS if k not in payload]
        if missing:
            raise DumpError(f"manifest missing required keys: {missing}")
        known = {
            "prompt": payload["prompt"],
            "class_token_indices": list(payload["class_token_indices"]),
            "timestep_count": int(payload["timestep_count"]),
            "mode": payload["mode"],
            "scales": [int(s) for s in payload["scales"]],
            "tensors": list(payload["tensors"]),
            "image_path": payload.get("image_path"),
            "generator": dict(payload.get("generator", {})),
            "class_label": payload.get("class_label", ""),
        }
        handled = set(known) | {"image_path", "generator", "class_label"}
        extras = {k: v for k, v in payload.items() if k not in handled}
        return cls(extras=extras, **known)

    def to_json(self) -> dict:
        out = {
            "prompt": self.prompt,
            "class_token_indices": self.class_token_indices,
            "timestep_count": self.timestep_count,
            "mode": self.mode,
            "scales": self.scales,
            "tensors": self.tensors,
        }
        if self.image_path is not None:
            out["image_path"] = self.image_path
        if self.generator:
            out["generator"] = self.generator
        if self.class_label:
            out["class_label"] = self.class_label
        out.update(self.extras)
        return out


@dataclass
class AttentionDump:
    """Validated, immutable view of a dump directory."""

    root: Path
    manifest: Manifest
    aggregated: dict[int, AggregatedAttention] = field(default_factory=dict)
    raw: list[RawAttentionMap] = field(default_factory=list)

    @property
    def scales(self) -> list[int]:
        return self.manifest.scales

    def attention(self, scale: int) -> AggregatedAttention:
        try:
            return self.aggregated[scale]
        except KeyError:
            raise DumpError(f"dump has no aggregated maps at scale {scale}") from None

    def ca(self, scale: int) -> np.ndarray:
        return self.attention(scale).ca

    def sa(self, scale: int) -> np.ndarray:
        return self.attention(scale).sa


def _token_count(entries: list[tuple[dict, np.ndarray]]) -> int | None:
    for meta, data in entries:
        if meta["kind"] == "cross":
            return data.shape[-1]
    return None


def load_dump(directory: str | Path) -> AttentionDump:
    """Load and validate a dump directory. Raises DumpError on any violation."""
    root = Path(directory)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise DumpError(f"{root}: no {MANIFEST_NAME}")
    try:
        payload = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DumpError(f"{manifest_path}: unreadable manifest: {exc}") from exc
    manifest = Manifest.from_json(payload)

    if manifest.mode not in ("aggregated", "full"):
        raise DumpError(f"unknown dump mode {manifest.mode!r}")
    for s in manifest.scales:
        check_scale(s)
    if not manifest.class_token_indices:
        raise DumpError("class_token_indices is empty")
    if manifest.timestep_count < 1:
        raise DumpError(f"timestep_count {manifest.timestep_count} < 1")

    entries: list[tuple[dict, np.ndarray]] = []
    for meta in manifest.tensors:
        for key in ("kind", "scale", "path", "shape"):
            if key not in meta:
                raise DumpError(f"tensor entry missing {key!r}: {meta}")
        path = root / meta["path"]
        if not path.is_file():
            raise DumpError(f"tensor file missing: {path}")
        data = read_tensor(path)
        if list(data.shape) != list(meta["shape"]):
            raise DumpError(
                f"{path}: shape {list(data.shape)} != manifest {meta['shape']}")
        entries.append((meta, data))

    token_count = _token_count(entries)
    if token_count is not None:
        bad = [i for i in manifest.class_token_indices
               if not 0 <= i < token_count]
        if bad:
            raise DumpError(
                f"class_token_indices {bad} outside token axis [0, {token_count})")

    dump = AttentionDump(root=root, manifest=manifest)
    if manifest.mode == "aggregated":
        ca: dict[int, np.ndarray] = {}
        sa: dict[int, np.ndarray] = {}
        for meta, data in entries:
            scale = check_scale(int(meta["scale"]))
            if meta["kind"] not in ("cross", "self"):
                raise DumpError(f"unknown tensor kind {meta['kind']!r}")
            bucket = ca if meta["kind"] == "cross" else sa
            if scale in bucket:
                raise DumpError(f"duplicate {meta['kind']} tensor at scale {scale}")
            bucket[scale] = data
        for s in manifest.scales:
            if s not in ca or s not in sa:
                raise DumpError(f"aggregated dump lacks CA or SA at scale {s}")
            dump.aggregated[s] = AggregatedAttention(s, ca[s], sa[s]).validate()
    else:
        for meta, data in entries:
            if "layer" not in meta or "timestep" not in meta:
                raise DumpError(f"full-mode tensor entry missing layer/timestep: "
                                f"{meta['path']}")
            raw = RawAttentionMap(
                kind=meta["kind"],
                scale=int(meta["scale"]),
                layer_index=int(meta["layer"]),
                timestep=int(meta["timestep"]),
                data=data,
            ).validate(token_count=token_count,
                       timestep_count=manifest.timestep_count)
            dump.raw.append(raw)
        if not dump.raw:
            raise DumpError("full-mode dump lists no tensors")
    return dump


def write_aggregated_dump(directory: str | Path, manifest: Manifest,
                          maps: dict[int, AggregatedAttention]) -> Path:
    """Write an aggregated-mode dump; fills the manifest's tensor table."""
    root = Path(directory)
    (root / "tensors").mkdir(parents=True, exist_ok=True)
    tensors = []
    for scale in sorted(maps):
        agg = maps[scale]
        for kind, data in (("cross", agg.ca), ("self", agg.sa)):
            tag = "ca" if kind == "cross" else "sa"
            rel = f"tensors/{tag}_s{scale}.atnb"
            write_tensor(data, root / rel)
            tensors.append({"kind": kind, "scale": scale, "path": rel,
                            "shape": list(data.shape)})
    manifest.tensors = tensors
    manifest.scales = sorted(maps)
    manifest.mode = "aggregated"
    (root / MANIFEST_NAME).write_text(
        json.dumps(manifest.to_json(), indent=2) + "\n", encoding="utf-8")
    return root


def write_full_dump(directory: str | Path, manifest: Manifest,
                    maps: list[RawAttentionMap]) -> Path:
    """Write a full-mode dump of raw per-layer / per-timestep maps."""
    root = Path(directory)
    (root / "tensors").mkdir(parents=True, exist_ok=True)
    tensors = []
    for m in maps:
        tag = "ca" if m.kind == "cross" else "sa"
        rel = f"tensors/{tag}_s{m.scale}_l{m.layer_index}_t{m.timestep}.atnb"
        write_tensor(m.data, root / rel)
        tensors.append({"kind": m.kind, "scale": m.scale, "layer": m.layer_index,
                        "timestep": m.timestep, "path": rel,
                        "shape": list(m.data.shape)})
    manifest.tensors = tensors
    manifest.mode = "full"
    (root / MANIFEST_NAME).write_text(
        json.dumps(manifest.to_json(), indent=2) + "\n", encoding="utf-8")
    return root
