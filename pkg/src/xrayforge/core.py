"""Shared data model.

Rasters are plain numpy arrays in normalized intensity:

* image     -- float64 array of shape (H, W, 3), values in [0, 1]
* soft mask -- float64 array of shape (H, W), values in [0, 1]
* face map  -- float64 array of shape (H, W), values in [0, 1] (the
  blending-boundary map; all zero for an untouched image)

8-bit quantization happens only at file boundaries (see :mod:`xrayforge.io`).
Landmark sets are float64 arrays of shape (K, 2) holding (x, y) pixel
coordinates.  Records that travel through manifests are small frozen
dataclasses.  Everything here is immutable-by-convention and safe to share
across parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Any

import numpy as np

from .errors import BadDimensionsError, OutOfRangeError

MIN_SIZE = 16

REAL = "real"
BLENDED = "blended"


def validate_image(img: np.ndarray) -> None:
    """Check image invariants; raise on violation.

    Raises
    ------
    BadDimensionsError
        Not (H, W, 3) or smaller than 16x16.
    OutOfRangeError
        Any intensity outside [0, 1].
    """
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise BadDimensionsError(f"expected (H, W, 3), got {img.shape}")
    h, w = img.shape[:2]
    if h < MIN_SIZE or w < MIN_SIZE:
        raise BadDimensionsError(f"minimum size is {MIN_SIZE}x{MIN_SIZE}, got {h}x{w}")
    if not np.isfinite(img).all():
        raise OutOfRangeError("non-finite intensity")
    lo, hi = float(img.min()), float(img.max())
    if lo < 0.0 or hi > 1.0:
        raise OutOfRangeError(f"intensities must lie in [0, 1], found [{lo}, {hi}]")


def validate_mask(mask: np.ndarray, *, name: str = "mask") -> None:
    """Check scalar-field invariants for soft masks and boundary maps."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise BadDimensionsError(f"{name}: expected (H, W), got {mask.shape}")
    h, w = mask.shape
    if h < MIN_SIZE or w < MIN_SIZE:
        raise BadDimensionsError(f"{name}: minimum size is {MIN_SIZE}x{MIN_SIZE}, got {h}x{w}")
    if not np.isfinite(mask).all():
        raise OutOfRangeError(f"{name}: non-finite value")
    lo, hi = float(mask.min()), float(mask.max())
    if lo < 0.0 or hi > 1.0:
        raise OutOfRangeError(f"{name}: values must lie in [0, 1], found [{lo}, {hi}]")


def validate_landmarks(points: np.ndarray, width: int, height: int) -> None:
    """Check a landmark set against its raster: K >= 3, all points in bounds."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise BadDimensionsError(f"landmarks: expected (K, 2), got {points.shape}")
    if points.shape[0] < 3:
        raise BadDimensionsError(f"landmarks: need at least 3 points, got {points.shape[0]}")
    x, y = points[:, 0], points[:, 1]
    if (x < 0).any() or (x > width - 1).any() or (y < 0).any() or (y > height - 1).any():
        raise OutOfRangeError("landmarks: point outside image bounds")


@dataclass(frozen=True)
class GenerationParams:
    """Knobs of the training-data generator.

    ``blur_kernels`` entries must be odd; kernel 1 is the degenerate
    "no blur" setting used to construct binary-mask edge cases.
    """

    global_seed: int = 0
    output_size: int = 256
    nn_pool_size: int = 500
    nn_top_k: int = 100
    deform_grid: int = 4
    deform_max_offset_frac: float = 0.10
    blur_kernels: tuple[int, ...] = (5, 7, 9, 11, 13, 15)
    blend_mode: str = "alpha"
    color_correct: bool = True
    real_fraction: float = 0.5
    exclude_same_source: bool = True

    def __post_init__(self) -> None:
        if not (0 <= int(self.global_seed) < 2**64):
            raise OutOfRangeError("global_seed must fit in 64 bits")
        if self.output_size < MIN_SIZE:
            raise BadDimensionsError(f"output_size must be >= {MIN_SIZE}")
        if self.nn_pool_size < 1 or self.nn_top_k < 1:
            raise OutOfRangeError("nn_pool_size and nn_top_k must be >= 1")
        if self.nn_top_k > self.nn_pool_size:
            raise OutOfRangeError("nn_top_k must not exceed nn_pool_size")
        if self.deform_grid < 2:
            raise OutOfRangeError("deform_grid needs at least 2 points per axis")
        if not (0.0 <= self.deform_max_offset_frac <= 1.0):
            raise OutOfRangeError("deform_max_offset_frac must lie in [0, 1]")
        if not self.blur_kernels:
            raise OutOfRangeError("blur_kernels must not be empty")
        for k in self.blur_kernels:
            if k < 1 or k % 2 == 0:
                raise OutOfRangeError(f"blur kernel sizes must be odd and >= 1, got {k}")
        if self.blend_mode not in ("alpha", "poisson"):
            raise OutOfRangeError(f"blend_mode must be 'alpha' or 'poisson', got {self.blend_mode!r}")
        if not (0.0 <= self.real_fraction <= 1.0):
            raise OutOfRangeError("real_fraction must lie in [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["blur_kernels"] = list(self.blur_kernels)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GenerationParams":
        d = dict(d)
        if "blur_kernels" in d:
            d["blur_kernels"] = tuple(int(k) for k in d["blur_kernels"])
        return cls(**d)


@dataclass(frozen=True)
class Sample:
    """One generated record: a real pass-through or a blended composite.

    ``label == "real"`` implies an all-zero boundary map and
    ``fg_source == bg_source``.  Paths are stored relative to the manifest.
    """

    id: str
    label: str
    blended_path: str
    xray_path: str
    fg_source: str
    bg_source: str
    params: GenerationParams
    seed: int

    def __post_init__(self) -> None:
        if self.label not in (REAL, BLENDED):
            raise OutOfRangeError(f"label must be 'real' or 'blended', got {self.label!r}")
        if self.label == REAL and self.fg_source != self.bg_source:
            raise OutOfRangeError("real sample must have fg_source == bg_source")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "label": self.label,
            "blended_path": self.blended_path,
            "xray_path": self.xray_path,
            "fg_source": self.fg_source,
            "bg_source": self.bg_source,
            "params": self.params.to_dict(),
            "seed": int(self.seed),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Sample":
        return cls(
            id=d["id"],
            label=d["label"],
            blended_path=d["blended_path"],
            xray_path=d["xray_path"],
            fg_source=d["fg_source"],
            bg_source=d["bg_source"],
            params=GenerationParams.from_dict(d["params"]),
            seed=int(d["seed"]),
        )


def sample_seed_sequence(global_seed: int, sample_index: int) -> np.random.SeedSequence:
    """RNG stream derivation: SeedSequence keyed on (global_seed, sample_index).

    Every per-sample random draw comes from a generator built on this
    sequence, which makes sample content independent of worker scheduling.
    """
    return np.random.SeedSequence(entropy=(int(global_seed), int(sample_index)))


def sample_rng(global_seed: int, sample_index: int) -> np.random.Generator:
    return np.random.default_rng(sample_seed_sequence(global_seed, sample_index))


def sample_seed_value(global_seed: int, sample_index: int) -> int:
    """64-bit provenance seed recorded in the sample's manifest line."""
    ss = sample_seed_sequence(global_seed, sample_index)
    return int(ss.generate_state(1, np.uint64)[0])
