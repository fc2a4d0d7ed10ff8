"""Threshold binarization: exact strict comparison and the truncated comparator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitlevel import compare_ge_values
from .errors import ConfigurationError, RangeError


@dataclass(frozen=True)
class ThresholdParams:
    value: int
    ignored_lsbs: int = 0
    word_width: int = 8

    def __post_init__(self):
        if self.word_width < 1:
            raise ConfigurationError(f"word width must be positive, got {self.word_width}")
        if not 0 <= self.value < (1 << self.word_width):
            raise ConfigurationError(
                f"threshold {self.value} does not fit in {self.word_width} bits")
        if not 0 <= self.ignored_lsbs < self.word_width:
            raise ConfigurationError(
                f"ignored LSBs {self.ignored_lsbs} must be in 0..{self.word_width - 1}")

    @property
    def aligned(self) -> bool:
        return self.value % (1 << self.ignored_lsbs) == 0

    def exact(self) -> "ThresholdParams":
        return ThresholdParams(self.value, 0, self.word_width)


INTENSITY_THRESHOLD = ThresholdParams(96, ignored_lsbs=5, word_width=8)
GRADIENT_THRESHOLD = ThresholdParams(128, ignored_lsbs=7, word_width=12)


def _check_range(raster, width: int) -> np.ndarray:
    arr = np.asarray(raster, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= (1 << width)):
        raise RangeError(
            f"raster values {arr.min()}..{arr.max()} exceed {width}-bit unsigned range")
    return arr


def binarize_exact(raster, params: ThresholdParams) -> np.ndarray:
    """1 where ``value > params.value``; `ignored_lsbs` is not consulted."""
    arr = _check_range(raster, params.word_width)
    return (arr > params.value).astype(np.uint8)


def binarize_truncated(raster, params: ThresholdParams) -> np.ndarray:
    """Per-pixel truncated ``>=`` comparison on the upper bits only.

    Agrees with `binarize_exact` everywhere except at ``value == threshold``,
    provided the threshold's dropped bits are zero; misaligned thresholds are
    rejected.
    """
    if not params.aligned:
        raise ConfigurationError(
            f"threshold {params.value} is not a multiple of 2^{params.ignored_lsbs}; "
            "the truncated comparator would misclassify a whole band")
    arr = _check_range(raster, params.word_width)
    bits = compare_ge_values(arr, params.value, params.ignored_lsbs, params.word_width)
    return np.asarray(bits, dtype=np.uint8)


def binarize(raster, params: ThresholdParams) -> np.ndarray:
    """Truncated comparator when LSBs are ignored, exact comparison otherwise."""
    if params.ignored_lsbs:
        return binarize_truncated(raster, params)
    return binarize_exact(raster, params)
