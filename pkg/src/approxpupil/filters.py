"""Gaussian smoothing and Prewitt gradients, exact and on the modeled datapath.

Images are 2-D numpy arrays indexed ``[row, col]``.  Borders are handled by
replicating edge pixels, so every output has the input's shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitlevel import AdderConfig, add_values, sub_values
from .errors import ConfigurationError, ImageSizeError, RangeError

GAUSSIAN_KERNEL = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]], dtype=np.int64)
GAUSSIAN_SHIFT = 4
# Left-shift applied to each neighbor for its kernel weight (1, 2 or 4).
_GAUSSIAN_WEIGHT_SHIFTS = (0, 1, 0, 1, 2, 1, 0, 1, 0)

GAUSSIAN_SUM_BITS = 12  # 16 * 255 = 4080
PREWITT_MIN_BITS = 11   # |3 * 255| plus sign


@dataclass(frozen=True)
class GradientField:
    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray | None = None


def as_gray(img) -> np.ndarray:
    """Validate an 8-bit grayscale raster and return it as an int64 array."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ImageSizeError(f"expected a 2-D grayscale raster, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise RangeError("pixel values must lie in 0..255")
    return arr.astype(np.int64, copy=False)


def neighborhood(img: np.ndarray) -> list[np.ndarray]:
    """The nine 3x3 neighbors p1..p9 of every pixel, row-major from top-left."""
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise ImageSizeError(f"image must be at least 3x3, got {img.shape[1]}x{img.shape[0]}")
    h, w = img.shape
    padded = np.pad(img, 1, mode="edge")
    return [padded[dy:dy + h, dx:dx + w] for dy in range(3) for dx in range(3)]


def gaussian_reference(img) -> np.ndarray:
    p = neighborhood(as_gray(img))
    acc = sum(int(wt) * q for wt, q in zip(GAUSSIAN_KERNEL.ravel(), p))
    return (acc >> GAUSSIAN_SHIFT).astype(np.uint8)


def gaussian_datapath(img, cfg: AdderConfig) -> np.ndarray:
    """Shift-and-add Gaussian on ripple adders configured by `cfg`.

    Terms are accumulated row-major, p1 through p9, in a chain of eight
    two-input adders.  The last adder feeds the divide-by-16 shift, so only
    that stage may use carry-only cells; earlier stages keep their sum bits
    (their carry-only positions are evaluated exactly).  LOA cells apply to
    every stage.  Partial sums saturate at the adder width.
    """
    if cfg.width < GAUSSIAN_SUM_BITS:
        raise ConfigurationError(
            f"Gaussian adder needs {GAUSSIAN_SUM_BITS} bits for sums up to 4080, got {cfg.width}")
    p = neighborhood(as_gray(img))
    inner = cfg.with_carry_only_as_exact()
    limit = (1 << cfg.width) - 1
    terms = [q << s for q, s in zip(p, _GAUSSIAN_WEIGHT_SHIFTS)]
    acc = terms[0]
    for i, term in enumerate(terms[1:], start=1):
        stage = cfg if i == len(terms) - 1 else inner
        acc = np.minimum(add_values(acc, term, stage), limit)
    return np.minimum(acc >> GAUSSIAN_SHIFT, 255).astype(np.uint8)


def prewitt_gradients(img, cfg: AdderConfig) -> GradientField:
    """Gx = (p3+p6+p9) - (p1+p4+p7), Gy = (p7+p8+p9) - (p1+p2+p3) on `cfg` adders."""
    if cfg.width < PREWITT_MIN_BITS:
        raise ConfigurationError(
            f"Prewitt adder needs at least {PREWITT_MIN_BITS} bits, got {cfg.width}")
    p1, p2, p3, p4, _, p6, p7, p8, p9 = neighborhood(as_gray(img))

    def add3(a, b, c):
        return add_values(add_values(a, b, cfg), c, cfg)

    gx = sub_values(add3(p3, p6, p9), add3(p1, p4, p7), cfg)
    gy = sub_values(add3(p7, p8, p9), add3(p1, p2, p3), cfg)
    return GradientField(gx=gx, gy=gy)


def _isqrt(v: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(v.astype(np.float64))).astype(np.int64)
    r -= (r * r > v)
    r += ((r + 1) * (r + 1) <= v)
    return r


def gradient_magnitude_exact(gf: GradientField) -> GradientField:
    gx = np.asarray(gf.gx, dtype=np.int64)
    gy = np.asarray(gf.gy, dtype=np.int64)
    return GradientField(gf.gx, gf.gy, _isqrt(gx * gx + gy * gy))


def gradient_magnitude_approx(gf: GradientField, cfg: AdderConfig) -> GradientField:
    """|Gx| + |Gy| with the addition on the configured adder."""
    gx = np.asarray(gf.gx, dtype=np.int64)
    gy = np.asarray(gf.gy, dtype=np.int64)
    mask = (1 << cfg.width) - 1
    # negate-if-negative: two's complement ~v + 1
    ax = np.where(gx < 0, ((~gx) + 1) & mask, gx)
    ay = np.where(gy < 0, ((~gy) + 1) & mask, gy)
    if ax.size and max(int(ax.max()), int(ay.max())) > mask:
        raise RangeError(f"gradient magnitude exceeds {cfg.width}-bit adder")
    return GradientField(gf.gx, gf.gy, add_values(ax, ay, cfg))
