"""Conditional-image construction for panorama synthesis.

A condition is an ERP image with a boolean known-mask; unknown pixels
are zeroed. Variants cover the usual tasks: a single centered photo
(outpainting), random rectangle dropout (inpainting), an unknown ground
region, two opposite-facing photos, and a caller-supplied mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import erp_direction_grid_cached
from .projection import camera_coverage, camera_for_direction, extract_nfov

DEFAULT_FOV_W = 126.87
DEFAULT_FOV_H = 112.62


@dataclass(frozen=True)
class CenterNfov:
    """Known region = footprint of a forward (+z) camera."""
    fov_w_deg: float = DEFAULT_FOV_W
    fov_h_deg: float = DEFAULT_FOV_H


@dataclass(frozen=True)
class RandomBoxes:
    """Unknown region = union of random axis-aligned rectangles.

    Rectangles wrap horizontally like the ERP itself. Draws are retried
    until the masked fraction lands inside [min_frac, max_frac].
    """
    min_boxes: int = 1
    max_boxes: int = 8
    min_frac: float = 0.2
    max_frac: float = 0.8
    min_side_frac: float = 0.1
    max_side_frac: float = 0.7
    attempts: int = 100

    def __post_init__(self):
        if not 1 <= self.min_boxes <= self.max_boxes:
            raise ValueError("box count range invalid")
        if not 0.0 <= self.min_frac <= self.max_frac <= 1.0:
            raise ValueError("masked-fraction range invalid")
        if not 0.0 < self.min_side_frac <= self.max_side_frac <= 1.0:
            raise ValueError("side-fraction range invalid")


@dataclass(frozen=True)
class GroundRegion:
    """Pixels below the latitude threshold are unknown."""
    lat_threshold: float = -np.pi / 4

    def __post_init__(self):
        if not -np.pi / 2 < self.lat_threshold <= np.pi / 2:
            raise ValueError(f"latitude threshold {self.lat_threshold} "
                             "outside (-pi/2, pi/2]")


@dataclass(frozen=True)
class TwoView:
    """Two camera footprints, yaw_offset apart around the vertical axis."""
    fov_w_deg: float = DEFAULT_FOV_W
    fov_h_deg: float = DEFAULT_FOV_H
    yaw_offset_deg: float = 180.0


class ExplicitMask:
    """Caller-supplied known-mask; the only variant allowed to be empty."""

    def __init__(self, mask: np.ndarray):
        self.mask = np.asarray(mask) > 0.5


def _footprint(fov_w_deg, fov_h_deg, yaw_deg, width, height):
    forward = np.array([np.sin(np.radians(yaw_deg)), 0.0,
                        np.cos(np.radians(yaw_deg))])
    cam = camera_for_direction(forward, fov_deg=fov_w_deg,
                               fov_h_deg=fov_h_deg, size=8)
    return camera_coverage(cam, width, height)


def _boxes_mask(spec: RandomBoxes, height, width, rng):
    total = height * width
    for _ in range(spec.attempts):
        masked = np.zeros((height, width), dtype=bool)
        n_boxes = int(rng.integers(spec.min_boxes, spec.max_boxes + 1))
        for _ in range(n_boxes):
            bw = int(rng.integers(max(1, round(spec.min_side_frac * width)),
                                  max(2, round(spec.max_side_frac * width)) + 1))
            bh = int(rng.integers(max(1, round(spec.min_side_frac * height)),
                                  max(2, round(spec.max_side_frac * height)) + 1))
            bh = min(bh, height)
            u0 = int(rng.integers(0, width))
            v0 = int(rng.integers(0, height - bh + 1))
            cols = (u0 + np.arange(bw)) % width
            masked[v0:v0 + bh, cols] = True
        frac = masked.sum() / total
        if spec.min_frac <= frac <= spec.max_frac:
            return ~masked
    raise RuntimeError(
        f"no rectangle draw hit masked fraction "
        f"[{spec.min_frac}, {spec.max_frac}] in {spec.attempts} attempts")


def make_condition(erp: np.ndarray, spec,
                   rng: np.random.Generator | None = None):
    """Build (conditional image, known-mask) from a full panorama.

    The conditional image equals `erp` where the mask is known and is
    exactly zero elsewhere. Every variant except ExplicitMask rejects an
    empty known region.
    """
    erp = np.asarray(erp, dtype=np.float64)
    if erp.ndim != 3 or erp.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) panorama, got {erp.shape}")
    height, width = erp.shape[:2]

    if isinstance(spec, CenterNfov):
        known = _footprint(spec.fov_w_deg, spec.fov_h_deg, 0.0, width, height)
    elif isinstance(spec, RandomBoxes):
        if rng is None:
            raise ValueError("random boxes need an RNG")
        known = _boxes_mask(spec, height, width, rng)
    elif isinstance(spec, GroundRegion):
        dirs = erp_direction_grid_cached(width, height)
        lat = np.arcsin(np.clip(dirs[:, :, 1], -1.0, 1.0))
        known = lat >= spec.lat_threshold
    elif isinstance(spec, TwoView):
        known = (_footprint(spec.fov_w_deg, spec.fov_h_deg, 0.0,
                            width, height)
                 | _footprint(spec.fov_w_deg, spec.fov_h_deg,
                              spec.yaw_offset_deg, width, height))
    elif isinstance(spec, ExplicitMask):
        known = spec.mask
        if known.shape != (height, width):
            raise ValueError(
                f"mask shape {known.shape} does not match panorama "
                f"({height}, {width})")
    else:
        raise TypeError(f"unknown condition variant {type(spec).__name__}")

    if not isinstance(spec, ExplicitMask) and not known.any():
        raise ValueError("condition leaves no known pixels")
    cond = np.where(known[:, :, None], erp, 0.0)
    return cond, known


def condition_to_views(cond: np.ndarray, mask: np.ndarray, views):
    """Extract the ERP condition and its mask through each camera.

    Images are sampled bilinearly, masks with nearest neighbor so they
    stay binary. Returns a list of (nfov_condition, nfov_known) pairs.
    """
    mask_f = np.asarray(mask, dtype=np.float64)
    out = []
    for cam in views:
        nf_cond = extract_nfov(cond, cam)
        nf_mask = extract_nfov(mask_f, cam, interp="nearest") > 0.5
        out.append((nf_cond, nf_mask))
    return out
