"""Deterministic synthetic eye images with known pupil geometry.

Randomness comes only from ``numpy.random.default_rng(seed)`` (PCG64), used
in a fixed order: specular highlight positions, then per-pixel Gaussian
noise.  Pixel ``(x, y)`` means column ``x``, row ``y``; a pixel belongs to a
disk when its center lies strictly inside the circle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import SpecError


@dataclass(frozen=True)
class EyeSpec:
    width: int = 64
    height: int = 64
    pupil_center: tuple[float, float] = (32.0, 32.0)
    pupil_radius: float = 10.0
    pupil_intensity: int = 10
    iris_radius: float = 22.0
    iris_intensity: int = 100
    sclera_intensity: int = 220
    highlight_count: int = 0
    highlight_radius: float = 1.5
    highlight_intensity: int = 255
    eyelid_fraction: float = 0.0
    eyelid_intensity: int = 160
    noise_sigma: float = 0.0
    seed: int = 0

    def validate(self):
        cx, cy = self.pupil_center
        r = self.pupil_radius
        if self.width < 1 or self.height < 1:
            raise SpecError(f"image size must be positive, got {self.width}x{self.height}")
        if r <= 0:
            raise SpecError(f"pupil radius must be positive, got {r}")
        if not r < self.iris_radius:
            raise SpecError(f"pupil radius {r} must be smaller than iris radius {self.iris_radius}")
        if cx - r < 0 or cy - r < 0 or cx + r > self.width - 1 or cy + r > self.height - 1:
            raise SpecError(
                f"pupil circle at ({cx}, {cy}) r={r} does not fit in {self.width}x{self.height}")
        for name in ("pupil_intensity", "iris_intensity", "sclera_intensity",
                     "highlight_intensity", "eyelid_intensity"):
            v = getattr(self, name)
            if not 0 <= v <= 255:
                raise SpecError(f"{name} {v} outside 0..255")
        if not 0.0 <= self.eyelid_fraction <= 1.0:
            raise SpecError(f"eyelid fraction {self.eyelid_fraction} outside [0, 1]")
        if self.noise_sigma < 0 or self.highlight_count < 0 or self.highlight_radius < 0:
            raise SpecError("noise sigma and highlight parameters must be non-negative")
        if not 0 <= self.seed < 2 ** 64:
            raise SpecError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class GroundTruth:
    cx: float
    cy: float
    radius: float


def generate_eye(spec: EyeSpec) -> tuple[np.ndarray, GroundTruth]:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    cx, cy = spec.pupil_center
    yy, xx = np.mgrid[0:spec.height, 0:spec.width]
    d2 = (xx - cx) ** 2 + (yy - cy) ** 2

    img = np.full((spec.height, spec.width), float(spec.sclera_intensity))
    img[d2 < spec.iris_radius ** 2] = spec.iris_intensity
    img[d2 < spec.pupil_radius ** 2] = spec.pupil_intensity

    for _ in range(spec.highlight_count):
        # uniform over the part of the pupil that keeps the dot inside it
        reach = max(spec.pupil_radius - spec.highlight_radius, 0.0)
        ang = rng.uniform(0, 2 * np.pi)
        rad = reach * np.sqrt(rng.uniform())
        hx, hy = cx + rad * np.cos(ang), cy + rad * np.sin(ang)
        dot = (xx - hx) ** 2 + (yy - hy) ** 2 <= spec.highlight_radius ** 2
        img[dot] = spec.highlight_intensity

    if spec.eyelid_fraction > 0:
        lid_edge = cy - spec.pupil_radius + 2 * spec.pupil_radius * spec.eyelid_fraction
        img[yy < lid_edge] = spec.eyelid_intensity

    if spec.noise_sigma > 0:
        img = img + rng.normal(0.0, spec.noise_sigma, size=img.shape)
    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    return img, GroundTruth(float(cx), float(cy), float(spec.pupil_radius))


def corpus_specs(count: int, seed: int, base: EyeSpec = EyeSpec(), *,
                 radius_range: tuple[float, float] = (0.125, 0.2),
                 iris_ratio_range: tuple[float, float] = (1.8, 2.4),
                 margin: float = 3.0) -> list[EyeSpec]:
    """Draw `count` eye geometries from `seed`, keeping the non-geometric fields of `base`.

    `radius_range` is a fraction of the shorter image side.  Each image gets
    its own 64-bit seed drawn from the corpus generator.
    """
    if count < 0:
        raise SpecError(f"count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    side = min(base.width, base.height)
    specs = []
    for _ in range(count):
        r = float(rng.uniform(*radius_range)) * side
        iris = r * float(rng.uniform(*iris_ratio_range))
        lo = r + margin
        cx = float(rng.uniform(lo, base.width - 1 - lo))
        cy = float(rng.uniform(lo, base.height - 1 - lo))
        img_seed = int(rng.integers(0, 2 ** 63))
        spec = replace(base, pupil_center=(round(cx, 2), round(cy, 2)), pupil_radius=round(r, 2),
                       iris_radius=round(iris, 2), seed=img_seed)
        spec.validate()
        specs.append(spec)
    return specs
