"""Raster utilities: PNG I/O, interpolation, and resizing.

Images are numpy float64 arrays in [0, 1], shaped (H, W, 3) for color or
(H, W) for masks/grayscale. Pixel centers sit at integer + 0.5 in the
continuous (u, v) coordinates used by every sampler here.
"""

from __future__ import annotations

import numpy as np
from PIL import Image


def load_image(path) -> np.ndarray:
    """Load a PNG (or any PIL-readable raster) as float64 RGB in [0, 1]."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return arr / 255.0


def save_image(img: np.ndarray, path) -> None:
    """Save a float image in [0, 1] as 8-bit RGB PNG."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    data = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(data, mode="RGB").save(path, format="PNG")


def load_mask(path) -> np.ndarray:
    """Load a raster as a boolean mask, thresholding at 0.5."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"), dtype=np.float64)
    return arr / 255.0 >= 0.5


def save_mask(mask: np.ndarray, path) -> None:
    """Save a boolean mask as an 8-bit grayscale PNG (255 = True)."""
    data = np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path, format="PNG")


def _gather(img, yi, xi):
    return img[yi, xi]


def sample_bilinear(img: np.ndarray, u, v, wrap_x: bool = True) -> np.ndarray:
    """Bilinear sample at continuous coordinates (u horizontal, v vertical).

    Horizontal handling is periodic when wrap_x (equirectangular seam),
    clamped otherwise; vertical access always clamps. Uses the lerp form
    so constant regions reproduce bit-exactly.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    h, w = img.shape[:2]

    x = u - 0.5
    y = v - 0.5
    x0f = np.floor(x)
    y0f = np.floor(y)
    fx = x - x0f
    fy = y - y0f
    x0 = x0f.astype(np.int64)
    y0 = y0f.astype(np.int64)
    x1 = x0 + 1
    y1 = y0 + 1
    if wrap_x:
        x0 %= w
        x1 %= w
    else:
        x0 = np.clip(x0, 0, w - 1)
        x1 = np.clip(x1, 0, w - 1)
    y0 = np.clip(y0, 0, h - 1)
    y1 = np.clip(y1, 0, h - 1)

    if img.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    v00 = _gather(img, y0, x0)
    v01 = _gather(img, y0, x1)
    v10 = _gather(img, y1, x0)
    v11 = _gather(img, y1, x1)
    top = v00 + fx * (v01 - v00)
    bot = v10 + fx * (v11 - v10)
    return top + fy * (bot - top)


def sample_nearest(img: np.ndarray, u, v, wrap_x: bool = True) -> np.ndarray:
    """Nearest-neighbor sample; keeps binary masks binary."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    h, w = img.shape[:2]
    xi = np.floor(u).astype(np.int64)
    yi = np.floor(v).astype(np.int64)
    if wrap_x:
        xi %= w
    else:
        xi = np.clip(xi, 0, w - 1)
    yi = np.clip(yi, 0, h - 1)
    return _gather(img, yi, xi)


def downsample_area(img: np.ndarray, factor: int) -> np.ndarray:
    """Area-average downsample by an integer factor along both axes."""
    if factor < 1:
        raise ValueError(f"downsample factor must be >= 1, got {factor}")
    h, w = img.shape[:2]
    if h % factor or w % factor:
        raise ValueError(f"image {h}x{w} not divisible by factor {factor}")
    nh, nw = h // factor, w // factor
    if img.ndim == 3:
        blocks = img.reshape(nh, factor, nw, factor, img.shape[2])
        return blocks.mean(axis=(1, 3))
    blocks = img.reshape(nh, factor, nw, factor)
    return blocks.mean(axis=(1, 3))


def resize_bilinear(img: np.ndarray, shape: tuple[int, int], wrap_x: bool = True) -> np.ndarray:
    """Resample to (height, width) by bilinear interpolation at new pixel centers."""
    nh, nw = shape
    h, w = img.shape[:2]
    u = (np.arange(nw) + 0.5) * (w / nw)
    v = (np.arange(nh) + 0.5) * (h / nh)
    uu, vv = np.meshgrid(u, v)
    return sample_bilinear(img, uu, vv, wrap_x=wrap_x)


def resize_erp(img: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Resize an equirectangular image: area-average on integer downscales,
    bilinear (with horizontal wrap) otherwise."""
    nh, nw = shape
    h, w = img.shape[:2]
    if (h, w) == (nh, nw):
        return img.copy()
    if h % nh == 0 and w % nw == 0 and h // nh == w // nw:
        return downsample_area(img, h // nh)
    return resize_bilinear(img, shape, wrap_x=True)
