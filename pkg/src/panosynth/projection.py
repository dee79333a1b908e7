"""Gnomonic NFoV extraction from equirectangular images and re-projection.

An NFoV camera is a pinhole looking along frame.forward. Image-plane
coordinates (a, b) are tangents of the view angles; NFoV pixel (i, j)
with i in [0, res_w], j in [0, res_h] (centers at integer + 0.5) maps to

    a = (2*i/res_w - 1) * tan(fov_w/2)
    b = (1 - 2*j/res_h) * tan(fov_h/2)
    direction = normalize(forward + a*right + b*up)

so row 0 is the top of the view and great circles map to straight lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    CameraFrame,
    camera_frame_for,
    direction_to_erp_pixel,
    erp_direction_grid_cached,
    rhombicuboctahedron_directions,
)
from .raster import sample_bilinear, sample_nearest


@dataclass(frozen=True)
class NfovCamera:
    frame: CameraFrame
    fov_w: float  # degrees
    fov_h: float  # degrees
    width: int
    height: int

    def __post_init__(self):
        for name, fov in (("fov_w", self.fov_w), ("fov_h", self.fov_h)):
            if not 0.0 < fov < 180.0:
                raise ValueError(f"{name} must be in (0, 180) degrees, got {fov}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"resolution must be >= 1, got {self.width}x{self.height}")

    @property
    def tan_half_w(self) -> float:
        return math.tan(math.radians(self.fov_w) / 2.0)

    @property
    def tan_half_h(self) -> float:
        return math.tan(math.radians(self.fov_h) / 2.0)

    @property
    def half_diagonal(self) -> float:
        """Largest possible distance (pixels) from the image center."""
        return math.hypot(self.width / 2.0, self.height / 2.0)


def camera_for_direction(forward, fov_deg: float = 60.0, size: int = 256,
                         fov_h_deg: float | None = None, height: int | None = None) -> NfovCamera:
    """Convenience constructor: north-up camera looking along `forward`."""
    return NfovCamera(
        frame=camera_frame_for(np.asarray(forward, dtype=np.float64)),
        fov_w=fov_deg,
        fov_h=fov_deg if fov_h_deg is None else fov_h_deg,
        width=size,
        height=size if height is None else height,
    )


def standard_viewset(fov_deg: float = 60.0, size: int = 256,
                     directions: np.ndarray | None = None) -> list[NfovCamera]:
    """The 26 rhombicuboctahedron-normal cameras (or a user-supplied set)."""
    if directions is None:
        directions = rhombicuboctahedron_directions()
    return [camera_for_direction(d, fov_deg=fov_deg, size=size) for d in directions]


@dataclass
class NfovImage:
    camera: NfovCamera
    pixels: np.ndarray  # (H, W, 3) float in [0, 1]

    def __post_init__(self):
        h, w = self.pixels.shape[:2]
        if (h, w) != (self.camera.height, self.camera.width):
            raise ValueError(
                f"pixel grid {h}x{w} does not match camera resolution "
                f"{self.camera.height}x{self.camera.width}")


@dataclass
class ProjectedView:
    """One NFoV view resampled onto the ERP grid.

    distance holds each covered pixel's distance (NFoV pixel units) from
    the view's image center, +inf where not covered; max_distance is the
    source camera's half-diagonal, the largest value distance can take.
    index is the view's position in its view set and fixes the blending
    accumulation order.
    """

    colors: np.ndarray      # (H, W, 3), zero outside coverage
    coverage: np.ndarray    # (H, W) bool
    distance: np.ndarray    # (H, W) float, +inf outside coverage
    max_distance: float
    index: int = 0


def nfov_pixel_to_direction(cam: NfovCamera, i, j) -> np.ndarray:
    """Unit directions for continuous NFoV pixel coordinates."""
    i = np.asarray(i, dtype=np.float64)
    j = np.asarray(j, dtype=np.float64)
    a = (2.0 * i / cam.width - 1.0) * cam.tan_half_w
    b = (1.0 - 2.0 * j / cam.height) * cam.tan_half_h
    f, r, u = cam.frame.forward, cam.frame.right, cam.frame.up
    d = f + a[..., None] * r + b[..., None] * u
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def extract_nfov(erp: np.ndarray, cam: NfovCamera, interp: str = "bilinear") -> np.ndarray:
    """Sample an NFoV image out of an ERP image.

    Bilinear with horizontal wrap by default; interp="nearest" keeps
    binary masks binary. Works for (H, W, 3) images and (H, W) masks.
    """
    h, w = erp.shape[:2]
    cols = np.arange(cam.width, dtype=np.float64) + 0.5
    rows = np.arange(cam.height, dtype=np.float64) + 0.5
    ii, jj = np.meshgrid(cols, rows)
    dirs = nfov_pixel_to_direction(cam, ii, jj)
    u, v = direction_to_erp_pixel(dirs, w, h)
    if interp == "bilinear":
        return sample_bilinear(erp, u, v, wrap_x=True)
    if interp == "nearest":
        return sample_nearest(erp, u, v, wrap_x=True)
    raise ValueError(f"unknown interpolation {interp!r}")


def _plane_coords(cam: NfovCamera, dirs: np.ndarray):
    """Per-direction frustum test and image-plane coordinates.

    Returns (inside, a, b) where a, b are tangent-plane coordinates valid
    where forward . dir > 0.
    """
    f, r, u = cam.frame.forward, cam.frame.right, cam.frame.up
    t = dirs @ f
    front = t > 0.0
    safe_t = np.where(front, t, 1.0)
    a = (dirs @ r) / safe_t
    b = (dirs @ u) / safe_t
    inside = front & (np.abs(a) <= cam.tan_half_w) & (np.abs(b) <= cam.tan_half_h)
    return inside, a, b


def project_nfov_to_erp(img: NfovImage, width: int, height: int) -> ProjectedView:
    """Resample an NFoV image onto the ERP grid it covers.

    Covered pixels are those whose direction lies inside the camera
    frustum; they are bilinearly sampled from the NFoV image (clamped at
    its borders) and annotated with the NFoV-plane distance to the view
    center.
    """
    if width != 2 * height:
        raise ValueError(f"ERP requires width == 2*height, got {width}x{height}")
    cam = img.camera
    dirs = erp_direction_grid_cached(width, height)
    inside, a, b = _plane_coords(cam, dirs)

    colors = np.zeros((height, width, 3), dtype=np.float64)
    distance = np.full((height, width), np.inf, dtype=np.float64)

    ai = a[inside]
    bi = b[inside]
    i = (ai / cam.tan_half_w + 1.0) * 0.5 * cam.width
    j = (1.0 - bi / cam.tan_half_h) * 0.5 * cam.height
    colors[inside] = sample_bilinear(img.pixels, i, j, wrap_x=False)
    distance[inside] = np.hypot(i - cam.width / 2.0, j - cam.height / 2.0)

    return ProjectedView(
        colors=colors,
        coverage=inside,
        distance=distance,
        max_distance=cam.half_diagonal,
    )


def camera_coverage(cam: NfovCamera, width: int, height: int) -> np.ndarray:
    """(H, W) bool mask of ERP pixels inside the camera frustum."""
    dirs = erp_direction_grid_cached(width, height)
    inside, _, _ = _plane_coords(cam, dirs)
    return inside


def coverage_of_viewset(views: list[NfovCamera], width: int, height: int) -> np.ndarray:
    """Per-pixel count of how many views cover each ERP pixel."""
    counts = np.zeros((height, width), dtype=np.int32)
    for cam in views:
        counts += camera_coverage(cam, width, height)
    return counts
