"""Intersection-over-union scoring for binary masks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


def iou(pred: np.ndarray, gt: np.ndarray) -> float:
    """|pred & gt| / |pred | gt|; 1.0 when both masks are empty."""
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise InputError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    p = pred != 0
    g = gt != 0
    union = int(np.logical_or(p, g).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(p, g).sum())
    return inter / union


@dataclass
class EvalReport:
    per_class: dict[str, float]
    miou: float
    counts: dict[str, dict[str, int]] = field(default_factory=dict)
    mode: str = "pooled"

    def to_json(self) -> dict:
        return {
            "per_class": self.per_class,
            "miou": self.miou,
            "counts": self.counts,
            "mode": self.mode,
            "both_empty_convention": 1.0,
        }


def evaluate(pairs: list[tuple[np.ndarray, np.ndarray, str]],
             per_image: bool = False) -> EvalReport:
    """Per-class IoU over (pred, gt, class_label) triples.

    Pooled mode (the default) sums intersection and union counts across all
    pairs of a class before dividing; ``per_image`` averages the individual
    pair IoUs instead.
    """
    if not pairs:
        raise InputError("no mask pairs to evaluate")
    counts: dict[str, dict[str, int]] = {}
    per_image_scores: dict[str, list[float]] = {}
    for pred, gt, label in pairs:
        score = iou(pred, gt)  # also validates shapes
        p = np.asarray(pred) != 0
        g = np.asarray(gt) != 0
        c = counts.setdefault(label, {"intersection": 0, "union": 0, "pairs": 0})
        c["intersection"] += int(np.logical_and(p, g).sum())
        c["union"] += int(np.logical_or(p, g).sum())
        c["pairs"] += 1
        per_image_scores.setdefault(label, []).append(score)

    per_class: dict[str, float] = {}
    for label, c in sorted(counts.items()):
        if per_image:
            scores = per_image_scores[label]
            per_class[label] = float(sum(scores) / len(scores))
        else:
            per_class[label] = (c["intersection"] / c["union"]
                                if c["union"] > 0 else 1.0)
    miou = float(sum(per_class.values()) / len(per_class))
    return EvalReport(per_class=per_class, miou=miou, counts=counts,
                      mode="per_image" if per_image else "pooled")
