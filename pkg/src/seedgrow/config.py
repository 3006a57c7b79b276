"""Pipeline configuration shared by all mask-generation strategies."""

from __future__ import annotations

from dataclasses import dataclass

from .dump import VALID_SCALES
from .errors import InputError

STRATEGIES = ("caa", "ca_sa", "seediff")

DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 0.3
DEFAULT_SCHEDULE = (16, 32, 64)
FULL_RESOLUTION = 512


@dataclass(frozen=True)
class PipelineConfig:
    """Thresholds, scale schedule, and strategy switches.

    ``alpha`` gates seed extraction, ``beta`` binarizes the final soft mask.
    ``bg_alpha`` overrides ``alpha`` for background seeding when set.
    ``renormalize_expansion`` divides each expanded mask by its maximum so a
    fixed alpha stays meaningful across scales; disable only for study.
    ``reseed_from_ca`` re-extracts seeds from the CA channel at every scale
    instead of from the upsampled mask.
    """

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    scale_schedule: tuple[int, ...] = DEFAULT_SCHEDULE
    strategy: str = "seediff"
    ca_seed_scale: int = 16
    background: bool = True
    bg_alpha: float | None = None
    renormalize_expansion: bool = True
    reseed_from_ca: bool = False
    per_token_normalization: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise InputError(f"alpha {self.alpha} outside (0, 1]")
        if not 0.0 < self.beta <= 1.0:
            raise InputError(f"beta {self.beta} outside (0, 1]")
        if self.bg_alpha is not None and not 0.0 < self.bg_alpha <= 1.0:
            raise InputError(f"bg_alpha {self.bg_alpha} outside (0, 1]")
        if self.strategy not in STRATEGIES:
            raise InputError(f"unknown strategy {self.strategy!r}")
        if not self.scale_schedule:
            raise InputError("scale schedule is empty")
        for s in self.scale_schedule:
            if s not in VALID_SCALES:
                raise InputError(f"schedule scale {s} not in {VALID_SCALES}")
        if list(self.scale_schedule) != sorted(set(self.scale_schedule)):
            raise InputError(f"schedule {self.scale_schedule} must be strictly increasing")
        if self.ca_seed_scale != self.scale_schedule[0]:
            raise InputError(
                f"ca_seed_scale {self.ca_seed_scale} must equal the first "
                f"schedule entry {self.scale_schedule[0]}")

    @property
    def background_alpha(self) -> float:
        return self.alpha if self.bg_alpha is None else self.bg_alpha
