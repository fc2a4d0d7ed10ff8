"""PSNR, SSIM and per-stage wall-clock timing."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatchError, ImageSizeError

PEAK = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b) -> float:
    """PSNR in dB against a fixed peak of 255; ``inf`` for identical images."""
    a, b = _pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2
    g = np.exp(-(x * x) / (2 * sigma * sigma))
    return g / g.sum()


def _filter_valid(img: np.ndarray, w: np.ndarray) -> np.ndarray:
    # separable weighted mean over every fully-contained window
    rows = sliding_window_view(img, w.size, axis=1) @ w
    return sliding_window_view(rows, w.size, axis=0) @ w


def ssim_map(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ImageSizeError(
            f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape}")
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2
    w = gaussian_window()
    mu_a = _filter_valid(a, w)
    mu_b = _filter_valid(b, w)
    var_a = _filter_valid(a * a, w) - mu_a * mu_a
    var_b = _filter_valid(b * b, w) - mu_b * mu_b
    cov = _filter_valid(a * b, w) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b) -> float:
    """Mean SSIM over 11x11 Gaussian-weighted (sigma 1.5) valid windows."""
    return float(np.mean(ssim_map(a, b)))


class StageTimer:
    """Collects wall-clock durations (seconds) keyed by stage label, in call order."""

    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, label: str, fn: Callable[..., Any], *args, **kwargs):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        self.timings[label] = time.perf_counter() - t0
        return result


def time_stage(label: str, fn: Callable[..., Any], *args, **kwargs):
    """Run ``fn`` once; return ``(result, seconds)``."""
    timer = StageTimer()
    result = timer.run(label, fn, *args, **kwargs)
    return result, timer.timings[label]


@dataclass
class StageMetrics:
    psnr_db: float
    ssim: float


@dataclass
class MetricsReport:
    """Exact-vs-approximate comparison for one image.

    `psnr_db` and `ssim` are the smoothed-image stage figures; `stages` holds
    the same pair at every stage boundary.
    """

    psnr_db: float
    ssim: float
    stages: dict[str, StageMetrics]
    per_stage_timings: dict[str, dict[str, float]]
    cost: dict[str, Any]
    config_fingerprint: str
    extra: dict[str, Any] = field(default_factory=dict)
