"""Seeded procedural panoramas for experiments and tests.

A scene is a pure function of view direction, so the same scene renders
consistently into an ERP image at any resolution or into any camera.
Scenes combine a vertical sky gradient, a sun disk, a two-scale ground
checkerboard on the plane y = -1 with a horizon fade, integer-frequency
longitude stripes (seamless across the wrap), and soft color blobs
pinned to sphere points with extra density near both poles so the pole
caps carry real texture. Output colors stay inside [0.05, 0.98]: never
pure black, so a zeroed (unknown) pixel is distinguishable from scene
content.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import erp_direction_grid_cached, normalize

COLOR_LO = 0.05
COLOR_HI = 0.98


@dataclass(frozen=True)
class SceneParams:
    sky_top: np.ndarray
    sky_horizon: np.ndarray
    ground_a: np.ndarray
    ground_b: np.ndarray
    cell: float
    fine_cell: float
    # Checker grids are shifted off the origin by these fractions of
    # their own cell size: the x = 0 plane maps to the lon = +-pi
    # meridian, so an unshifted cell edge would run the whole length of
    # the ERP wrap seam and make the scene look discontinuous there.
    checker_shift: tuple[float, float]
    sun_dir: np.ndarray
    sun_cos: float
    sun_color: np.ndarray
    stripe_freq: int
    stripe_amp: float
    blob_dirs: np.ndarray
    blob_colors: np.ndarray
    blob_cos_sigma: np.ndarray


def scene_params(seed: int, n_blobs: int = 24) -> SceneParams:
    rng = np.random.default_rng(seed)

    def color(lo=0.1, hi=0.9):
        return rng.uniform(lo, hi, size=3)

    # Blobs: a third clustered at the zenith, a fifth at the nadir, a
    # quarter strung along the lon = pi meridian, the rest anywhere.
    # Pole caps need sphere-isotropic detail (not just the
    # latitude-only gradient), and the wrap meridian needs texture so
    # seam behavior is exercised, not trivially smooth.
    n_top = n_blobs // 3
    n_bot = n_blobs // 5
    n_seam = n_blobs // 4
    n_any = n_blobs - n_top - n_bot - n_seam
    ys = np.concatenate([
        rng.uniform(0.75, 1.0, n_top),
        rng.uniform(-1.0, -0.75, n_bot),
        rng.uniform(-0.95, 0.95, n_seam),
        rng.uniform(-1.0, 1.0, n_any),
    ])
    phis = np.concatenate([
        rng.uniform(0, 2 * np.pi, n_top + n_bot),
        np.pi + rng.uniform(-0.25, 0.25, n_seam),
        rng.uniform(0, 2 * np.pi, n_any),
    ])
    r = np.sqrt(np.clip(1.0 - ys ** 2, 0.0, 1.0))
    blob_dirs = np.stack([r * np.sin(phis), ys, r * np.cos(phis)], axis=1)

    sun_y = rng.uniform(0.2, 0.95)
    sun_phi = rng.uniform(0, 2 * np.pi)
    sun_r = np.sqrt(1.0 - sun_y ** 2)
    sun_dir = np.array([sun_r * np.sin(sun_phi), sun_y, sun_r * np.cos(sun_phi)])

    return SceneParams(
        sky_top=color(0.15, 0.75),
        sky_horizon=color(0.35, 0.95),
        ground_a=color(0.1, 0.55),
        ground_b=color(0.45, 0.9),
        cell=float(rng.uniform(0.14, 0.3)),
        fine_cell=float(rng.uniform(0.04, 0.07)),
        checker_shift=(float(rng.uniform(0.25, 0.75)),
                       float(rng.uniform(0.25, 0.75))),
        sun_dir=sun_dir,
        sun_cos=float(np.cos(np.radians(rng.uniform(4.0, 9.0)))),
        sun_color=color(0.75, 1.0),
        stripe_freq=int(rng.integers(3, 9)),
        stripe_amp=float(rng.uniform(0.08, 0.18)),
        blob_dirs=blob_dirs,
        blob_colors=rng.uniform(0.1, 0.9, size=(n_blobs, 3)),
        blob_cos_sigma=np.cos(np.radians(rng.uniform(3.0, 10.0, n_blobs))),
    )


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def render_directions(params: SceneParams, dirs: np.ndarray) -> np.ndarray:
    """Color every unit direction in `dirs` (..., 3) -> (..., 3)."""
    dirs = normalize(np.asarray(dirs, dtype=np.float64))
    shape = dirs.shape[:-1]
    d = dirs.reshape(-1, 3)
    x, y, z = d[:, 0], d[:, 1], d[:, 2]

    t = (y + 1.0) * 0.5
    col = (params.sky_horizon[None, :]
           + t[:, None] * (params.sky_top - params.sky_horizon)[None, :])

    lon = np.arctan2(x, z)
    stripe = np.sin(params.stripe_freq * lon)
    # Stripes fade toward the poles: (1 - y^2) = cos(lat)^2. In ERP they
    # are uniform vertical bands, but on the sphere they pinch at the
    # poles into detail no patch grid resolves well; keep them where
    # they are benign.
    col = col + (params.stripe_amp * stripe * (1.0 - y ** 2))[:, None]

    below = y < -1e-9
    if below.any():
        inv = -1.0 / y[below]
        fx, fz = params.checker_shift
        px = x[below] * inv
        pz = z[below] * inv
        checker = ((np.floor(px / params.cell - fx)
                    + np.floor(pz / params.cell - fz)) % 2.0)
        fine = ((np.floor(px / params.fine_cell - fx)
                 + np.floor(pz / params.fine_cell - fz)) % 2.0)
        ground = (params.ground_a[None, :]
                  + checker[:, None] * (params.ground_b - params.ground_a)[None, :])
        ground = ground + (fine[:, None] - 0.5) * 0.12
        fade = _smoothstep(-y[below] / 0.12)
        col[below] = col[below] + fade[:, None] * (ground - col[below])

    for i in range(params.blob_dirs.shape[0]):
        cos_a = d @ params.blob_dirs[i]
        # exp falloff in angle^2, expressed via cos for cheapness
        sigma2 = 2.0 * (1.0 - params.blob_cos_sigma[i])
        g = np.exp(-(2.0 * (1.0 - np.clip(cos_a, -1.0, 1.0))) / sigma2)
        strong = g > 1e-4
        if strong.any():
            mix = 0.85 * g[strong, None]
            col[strong] = (col[strong]
                           + mix * (params.blob_colors[i] - col[strong]))

    sun = _smoothstep((d @ params.sun_dir - params.sun_cos)
                      / (1.0 - params.sun_cos) * 6.0)
    col = col + sun[:, None] * (params.sun_color[None, :] - col) * 0.9

    col = COLOR_LO + (COLOR_HI - COLOR_LO) * np.clip(col, 0.0, 1.0)
    return col.reshape(shape + (3,))


def render_panorama(params: SceneParams, height: int,
                    width: int | None = None) -> np.ndarray:
    if width is None:
        width = 2 * height
    dirs = erp_direction_grid_cached(width, height)
    return render_directions(params, dirs)
