"""Interpolation and PNG round trips.

Bilinear expectations are hand-computed from the lerp form on tiny
grids; PNG round trips check the 8-bit quantization bound of
0.5/255 per channel.
"""

import numpy as np

from panosynth.raster import (
    downsample_area,
    load_image,
    load_mask,
    resize_bilinear,
    resize_erp,
    sample_bilinear,
    sample_nearest,
    save_image,
    save_mask,
)


def test_bilinear_at_pixel_centers_is_exact(rng):
    img = rng.uniform(size=(5, 9, 3))
    uu, vv = np.meshgrid(np.arange(9) + 0.5, np.arange(5) + 0.5)
    out = sample_bilinear(img, uu, vv)
    assert np.array_equal(out, img)


def test_bilinear_midpoint():
    # Halfway between two pixels the lerp is the plain average.
    img = np.zeros((1, 2))
    img[0, 0] = 0.2
    img[0, 1] = 0.6
    got = sample_bilinear(img, np.array([1.0]), np.array([0.5]), wrap_x=False)
    assert abs(got[0] - 0.4) < 1e-15


def test_bilinear_wraps_horizontally():
    img = np.zeros((1, 4))
    img[0, 0] = 1.0
    img[0, 3] = 0.0
    # u = 0 sits halfway between the last and first pixel centers.
    got = sample_bilinear(img, np.array([0.0]), np.array([0.5]), wrap_x=True)
    assert abs(got[0] - 0.5) < 1e-15
    clamped = sample_bilinear(img, np.array([0.0]), np.array([0.5]), wrap_x=False)
    assert abs(clamped[0] - 1.0) < 1e-15


def test_bilinear_clamps_vertically():
    img = np.arange(8.0).reshape(4, 2)
    got = sample_bilinear(img, np.array([0.5, 0.5]), np.array([-3.0, 99.0]))
    assert got[0] == img[0, 0]
    assert got[1] == img[3, 0]


def test_bilinear_constant_region_bit_exact():
    img = np.full((6, 6, 3), 0.37)
    u = np.linspace(0.1, 5.9, 23)
    out = sample_bilinear(img, u, u * 0.9)
    assert np.all(out == 0.37)


def test_nearest_keeps_binary(rng):
    img = (rng.uniform(size=(16, 32)) > 0.5).astype(np.float64)
    u = rng.uniform(-5, 40, 200)
    v = rng.uniform(-5, 20, 200)
    out = sample_nearest(img, u, v)
    assert set(np.unique(out)) <= {0.0, 1.0}


def test_downsample_area_means():
    img = np.arange(16.0).reshape(4, 4)
    out = downsample_area(img, 2)
    # Top-left block is {0, 1, 4, 5}, mean 2.5.
    expected = np.array([[2.5, 4.5], [10.5, 12.5]])
    assert np.array_equal(out, expected)


def test_downsample_rejects_indivisible():
    try:
        downsample_area(np.zeros((5, 5)), 2)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


def test_resize_identity_copies():
    img = np.random.default_rng(1).uniform(size=(4, 8, 3))
    out = resize_erp(img, (4, 8))
    assert np.array_equal(out, img)
    assert out is not img


def test_resize_erp_integer_downscale_is_area():
    img = np.random.default_rng(2).uniform(size=(8, 16, 3))
    assert np.array_equal(resize_erp(img, (4, 8)), downsample_area(img, 2))


def test_resize_bilinear_upscale_preserves_constant():
    img = np.full((4, 8, 3), 0.61)
    out = resize_bilinear(img, (16, 32))
    assert out.shape == (16, 32, 3)
    assert np.all(out == 0.61)


def test_image_round_trip(tmp_path, rng):
    img = rng.uniform(size=(12, 24, 3))
    p = tmp_path / "x.png"
    save_image(img, p)
    back = load_image(p)
    assert back.shape == img.shape
    assert np.abs(back - img).max() <= 0.5 / 255.0 + 1e-12


def test_mask_round_trip(tmp_path, rng):
    mask = rng.uniform(size=(9, 18)) > 0.4
    p = tmp_path / "m.png"
    save_mask(mask, p)
    back = load_mask(p)
    assert back.dtype == bool
    assert np.array_equal(back, mask)


def test_grayscale_saves_as_rgb(tmp_path):
    img = np.linspace(0.0, 1.0, 20).reshape(4, 5)
    p = tmp_path / "g.png"
    save_image(img, p)
    back = load_image(p)
    assert back.shape == (4, 5, 3)
    assert np.abs(back[:, :, 0] - img).max() <= 0.5 / 255.0 + 1e-12
