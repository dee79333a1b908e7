"""Spherical coordinate conventions and the 26-direction view set.

Conventions shared by the whole package:
  * world axes: +z is the forward axis at the equirectangular image center,
    +y points at the north pole (image top), +x to the image right;
  * longitude lon in [-pi, pi) grows to the right, latitude lat in
    [-pi/2, pi/2] grows upward;
  * ERP pixel (u, v) with u in [0, W), v in [0, H], pixel centers at
    integer + 0.5, and W = 2H always:
        lon = 2*pi*u/W - pi        lat = pi/2 - pi*v/H
  * a unit direction is d = (cos(lat)*sin(lon), sin(lat), cos(lat)*cos(lon)).

Pole pixels have no well-defined longitude; the inverse mapping reports
them at lon = 0 (atan2(0, 0) = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

NORTH = np.array([0.0, 1.0, 0.0])


def normalize(v: np.ndarray) -> np.ndarray:
    """Scale vectors (last axis = xyz) to unit length."""
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n


def latlon_to_direction(lat, lon) -> np.ndarray:
    """Unit direction for latitude/longitude in radians (stacked on last axis)."""
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    cl = np.cos(lat)
    return np.stack([cl * np.sin(lon), np.sin(lat), cl * np.cos(lon)], axis=-1)


def direction_to_latlon(d: np.ndarray):
    """Inverse of latlon_to_direction; lon normalized to [-pi, pi)."""
    d = np.asarray(d, dtype=np.float64)
    lat = np.arcsin(np.clip(d[..., 1], -1.0, 1.0))
    lon = np.arctan2(d[..., 0], d[..., 2])
    lon = np.where(lon == np.pi, -np.pi, lon)
    return lat, lon


def erp_pixel_to_direction(u, v, width: int, height: int) -> np.ndarray:
    """Map continuous ERP pixel coordinates to unit directions.

    Requires the 2:1 equirectangular aspect (width == 2 * height).
    """
    if width != 2 * height:
        raise ValueError(f"ERP requires width == 2*height, got {width}x{height}")
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    lon = 2.0 * np.pi * u / width - np.pi
    lat = np.pi / 2.0 - np.pi * v / height
    return latlon_to_direction(lat, lon)


def direction_to_erp_pixel(d: np.ndarray, width: int, height: int):
    """Map unit directions to continuous ERP pixel coordinates.

    Returns (u, v) with u wrap-normalized into [0, W). Poles land at
    u = W/2 via the lon = 0 convention.
    """
    if width != 2 * height:
        raise ValueError(f"ERP requires width == 2*height, got {width}x{height}")
    lat, lon = direction_to_latlon(d)
    u = (lon + np.pi) * width / (2.0 * np.pi)
    v = (np.pi / 2.0 - lat) * height / np.pi
    u = np.where(u >= width, u - width, u)
    return u, v


def erp_direction_grid(width: int, height: int) -> np.ndarray:
    """(H, W, 3) unit directions at every ERP pixel center."""
    u = np.arange(width, dtype=np.float64) + 0.5
    v = np.arange(height, dtype=np.float64) + 0.5
    uu, vv = np.meshgrid(u, v)
    return erp_pixel_to_direction(uu, vv, width, height)


_GRID_CACHE: dict[tuple[int, int], np.ndarray] = {}


def erp_direction_grid_cached(width: int, height: int) -> np.ndarray:
    """Cached, read-only variant of erp_direction_grid for hot paths."""
    key = (width, height)
    grid = _GRID_CACHE.get(key)
    if grid is None:
        if len(_GRID_CACHE) >= 4:
            _GRID_CACHE.clear()
        grid = erp_direction_grid(width, height)
        grid.flags.writeable = False
        _GRID_CACHE[key] = grid
    return grid


def rhombicuboctahedron_directions() -> np.ndarray:
    """The 26 face-normal directions of a rhombicuboctahedron, as (26, 3).

    Groups in order: the 6 axis vectors, the 12 edge vectors (two nonzero
    components), the 8 corner vectors (three nonzero components); each
    group sorted lexicographically by its unnormalized (x, y, z) tuple.
    The fixed order keeps downstream code-grid layouts reproducible.
    """
    axes, edges, corners = [], [], []
    for vec in product((-1, 0, 1), repeat=3):
        nz = sum(c != 0 for c in vec)
        if nz == 1:
            axes.append(vec)
        elif nz == 2:
            edges.append(vec)
        elif nz == 3:
            corners.append(vec)
    ordered = sorted(axes) + sorted(edges) + sorted(corners)
    return normalize(np.array(ordered, dtype=np.float64))


@dataclass(frozen=True)
class CameraFrame:
    """Right-handed orthonormal camera basis with right x up = forward."""

    forward: np.ndarray
    right: np.ndarray
    up: np.ndarray


def camera_frame_for(forward: np.ndarray) -> CameraFrame:
    """North-up camera frame for a view direction.

    The up vector is the north pole projected off the forward axis; views
    within 1e-6 of the poles fall back to -z (north-facing) or +z
    (south-facing) as the up reference so the frame stays defined.
    """
    f = normalize(np.asarray(forward, dtype=np.float64))
    cos_pole = float(f @ NORTH)
    if abs(cos_pole) < 1.0 - 1e-6:
        ref = NORTH
    elif cos_pole > 0:
        ref = np.array([0.0, 0.0, -1.0])
    else:
        ref = np.array([0.0, 0.0, 1.0])
    up = normalize(ref - (ref @ f) * f)
    right = normalize(np.cross(up, f))
    return CameraFrame(forward=f, right=right, up=up)
