"""Pupil segmentation: smoothing, two edge branches, AND-combination, localization.

Branch A runs Prewitt on the smoothed image and thresholds the gradient
magnitude.  Branch B binarizes the smoothed image, complements it so the dark
pupil is 1, and runs a second Prewitt pass on the {0, 255} mask whose output
needs no further thresholding.  The final edge map keeps only pixels both
branches agree on.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .binarization import GRADIENT_THRESHOLD, INTENSITY_THRESHOLD, ThresholdParams, binarize
from .bitlevel import AdderConfig, CellKind
from .errors import ConfigurationError, DimensionMismatchError, ImageSizeError, NoPupilError
from .filters import (
    GradientField,
    as_gray,
    gaussian_datapath,
    gradient_magnitude_approx,
    gradient_magnitude_exact,
    prewitt_gradients,
)
from .metrics import StageTimer

ADDER_WIDTH = 12
DEFAULT_APPROX_BITS = 5
MIN_IMAGE_SIDE = 16

STAGES = ("gaussian", "edge_detection", "binarization", "prewitt_filter2", "combine", "localize")


class Variant(enum.Enum):
    EXACT = "exact"
    APPROXIMATE = "approx"


@dataclass(frozen=True)
class PipelineConfig:
    gaussian_cfg: AdderConfig
    prewitt_cfg: AdderConfig
    intensity_threshold: ThresholdParams
    gradient_threshold: ThresholdParams
    variant: Variant

    def __post_init__(self):
        if self.variant is Variant.EXACT:
            if not (self.gaussian_cfg.is_exact and self.prewitt_cfg.is_exact):
                raise ConfigurationError("the exact variant requires all-exact adders")
            if self.intensity_threshold.ignored_lsbs or self.gradient_threshold.ignored_lsbs:
                raise ConfigurationError("the exact variant compares on full words (k = 0)")

    @classmethod
    def exact(cls, intensity: int = INTENSITY_THRESHOLD.value,
              gradient: int = GRADIENT_THRESHOLD.value) -> "PipelineConfig":
        return cls(
            gaussian_cfg=AdderConfig.exact(ADDER_WIDTH),
            prewitt_cfg=AdderConfig.exact(ADDER_WIDTH),
            intensity_threshold=ThresholdParams(intensity, 0, INTENSITY_THRESHOLD.word_width),
            gradient_threshold=ThresholdParams(gradient, 0, GRADIENT_THRESHOLD.word_width),
            variant=Variant.EXACT,
        )

    @classmethod
    def approximate(cls, gauss_approx_bits: int = DEFAULT_APPROX_BITS,
                    gauss_cell: CellKind = CellKind.APPROX_LOA,
                    prewitt_approx_bits: int = DEFAULT_APPROX_BITS,
                    intensity: int = INTENSITY_THRESHOLD.value,
                    gradient: int = GRADIENT_THRESHOLD.value,
                    ignore_lsbs_intensity: int = INTENSITY_THRESHOLD.ignored_lsbs,
                    ignore_lsbs_gradient: int = GRADIENT_THRESHOLD.ignored_lsbs,
                    ) -> "PipelineConfig":
        return cls(
            gaussian_cfg=AdderConfig.build(ADDER_WIDTH, gauss_approx_bits, gauss_cell),
            prewitt_cfg=AdderConfig.build(ADDER_WIDTH, prewitt_approx_bits, CellKind.APPROX_LOA),
            intensity_threshold=ThresholdParams(
                intensity, ignore_lsbs_intensity, INTENSITY_THRESHOLD.word_width),
            gradient_threshold=ThresholdParams(
                gradient, ignore_lsbs_gradient, GRADIENT_THRESHOLD.word_width),
            variant=Variant.APPROXIMATE,
        )

    def as_dict(self) -> dict:
        def adder(cfg):
            return {"width": cfg.width, "approx_bits": cfg.approx_prefix,
                    "cell": cfg.prefix_kind.value}

        def thr(t):
            return {"value": t.value, "ignored_lsbs": t.ignored_lsbs, "word_width": t.word_width}

        return {
            "variant": self.variant.value,
            "gaussian": adder(self.gaussian_cfg),
            "prewitt": adder(self.prewitt_cfg),
            "intensity_threshold": thr(self.intensity_threshold),
            "gradient_threshold": thr(self.gradient_threshold),
        }

    def fingerprint(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class PupilResult:
    edge_map: np.ndarray
    pupil_mask: np.ndarray
    center: tuple[float, float]
    radius: float
    stage_timings: dict[str, float]
    # intermediate rasters, keyed by stage boundary
    stages: dict[str, np.ndarray] = field(default_factory=dict)


def combine_edge_maps(e1, e2) -> np.ndarray:
    e1 = np.asarray(e1)
    e2 = np.asarray(e2)
    if e1.shape != e2.shape:
        raise DimensionMismatchError(f"edge maps differ in shape: {e1.shape} vs {e2.shape}")
    return ((e1 != 0) & (e2 != 0)).astype(np.uint8)


def localize_pupil(mask) -> tuple[tuple[float, float], float]:
    """Centroid ``(x, y)`` and equal-area radius of the largest 4-connected component.

    Ties on area go to the component met first in raster order.
    """
    mask = np.asarray(mask) != 0
    labels, n = ndimage.label(mask)  # default structure is 4-connectivity
    if n == 0:
        raise NoPupilError("pupil mask is empty")
    areas = np.bincount(labels.ravel())
    areas[0] = 0
    best = int(np.argmax(areas))
    rows, cols = np.nonzero(labels == best)
    area = rows.size
    return (float(cols.mean()), float(rows.mean())), float(np.sqrt(area / np.pi))


def _edge_branch(smoothed, cfg: PipelineConfig):
    gf = prewitt_gradients(smoothed, cfg.prewitt_cfg)
    gf = _magnitude(gf, cfg)
    return gf, binarize(gf.magnitude, cfg.gradient_threshold)


def _magnitude(gf: GradientField, cfg: PipelineConfig) -> GradientField:
    if cfg.variant is Variant.EXACT:
        return gradient_magnitude_exact(gf)
    return gradient_magnitude_approx(gf, cfg.prewitt_cfg)


def _mask_branch(smoothed, cfg: PipelineConfig):
    return (1 - binarize(smoothed, cfg.intensity_threshold)).astype(np.uint8)


def _filter2(mask, cfg: PipelineConfig):
    # Input is already binary, so there is no comparator stage.  Any set bit
    # above the approximate adder prefix marks an edge; the prefix bits are
    # excluded because an LOA subtractor leaves a -1 residue on flat input.
    gf = _magnitude(prewitt_gradients(mask * 255, cfg.prewitt_cfg), cfg)
    return ((gf.magnitude >> cfg.prewitt_cfg.approx_prefix) != 0).astype(np.uint8)


def run_pipeline(img, cfg: PipelineConfig) -> PupilResult:
    img = as_gray(img)
    if min(img.shape) < MIN_IMAGE_SIDE:
        raise ImageSizeError(
            f"pipeline needs at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}, "
            f"got {img.shape[1]}x{img.shape[0]}")
    timer = StageTimer()
    smoothed = timer.run("gaussian", gaussian_datapath, img, cfg.gaussian_cfg)
    gf, e1 = timer.run("edge_detection", _edge_branch, smoothed, cfg)
    mask = timer.run("binarization", _mask_branch, smoothed, cfg)
    e2 = timer.run("prewitt_filter2", _filter2, mask, cfg)
    edge_map = timer.run("combine", combine_edge_maps, e1, e2)
    stages = {
        "smoothed": smoothed,
        "gradient_magnitude": gf.magnitude,
        "edge_map_e1": e1,
        "pupil_mask": mask,
        "edge_map_e2": e2,
        "edge_map": edge_map,
    }
    if not edge_map.any():
        raise NoPupilError("no pupil boundary found: combined edge map is empty")
    center, radius = timer.run("localize", localize_pupil, mask)
    return PupilResult(edge_map, mask, center, radius, timer.timings, stages)
