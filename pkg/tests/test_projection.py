"""Gnomonic projection: pixel mapping, frustum membership, reprojection.

Gnomonic check values are hand-derived. For a forward-facing camera with
fov 90 degrees (tan(fov/2) = 1) and width 4, pixel i = 3.0 gives
a = 2*3/4 - 1 = 0.5, so the direction before normalization is
(0.5, b, 1).
"""

import numpy as np

from panosynth.geometry import rhombicuboctahedron_directions
from panosynth.projection import (
    NfovCamera,
    NfovImage,
    camera_coverage,
    camera_for_direction,
    coverage_of_viewset,
    extract_nfov,
    nfov_pixel_to_direction,
    project_nfov_to_erp,
    standard_viewset,
)
from panosynth.scenes import render_directions, render_panorama, scene_params


def test_pixel_to_direction_hand_value():
    cam = camera_for_direction([0.0, 0.0, 1.0], fov_deg=90.0, size=4)
    d = nfov_pixel_to_direction(cam, np.array([3.0]), np.array([2.0]))
    expected = np.array([0.5, 0.0, 1.0])
    expected /= np.linalg.norm(expected)
    assert np.linalg.norm(d[0] - expected) < 1e-12


def test_center_pixel_is_forward():
    for fwd in rhombicuboctahedron_directions():
        cam = camera_for_direction(fwd, fov_deg=60.0, size=128)
        d = nfov_pixel_to_direction(cam, np.array([64.0]), np.array([64.0]))
        assert np.linalg.norm(d[0] - cam.frame.forward) < 1e-12


def test_rows_map_to_lines(rng):
    # Gnomonic projection maps great circles to straight lines, so all
    # directions of one NFoV row are coplanar with the origin.
    cam = camera_for_direction(rng.normal(size=3), fov_deg=75.0, size=64)
    i = np.linspace(0.5, 63.5, 64)
    j = np.full(64, 17.5)
    d = nfov_pixel_to_direction(cam, i, j)
    normal = np.cross(d[0], d[-1])
    normal /= np.linalg.norm(normal)
    assert np.abs(d @ normal).max() < 1e-12


def test_viewset_basics():
    views = standard_viewset(60.0, 32)
    assert len(views) == 26
    assert all(v.width == 32 and v.height == 32 for v in views)
    assert all(v.fov_w == 60.0 and v.fov_h == 60.0 for v in views)


def test_camera_rejects_bad_fov():
    for bad in (0.0, 180.0, -10.0):
        try:
            camera_for_direction([0, 0, 1], fov_deg=bad, size=8)
        except ValueError:
            pass
        else:
            raise AssertionError(f"fov {bad} accepted")


def test_extract_matches_direct_render():
    # Rendering the scene straight along NFoV rays vs sampling its ERP
    # rendering must agree except for ERP resampling error.
    params = scene_params(3)
    erp = render_panorama(params, 256)
    cam = camera_for_direction([0.0, 0.0, 1.0], fov_deg=60.0, size=64)
    sampled = extract_nfov(erp, cam)
    cols = np.arange(64, dtype=np.float64) + 0.5
    ii, jj = np.meshgrid(cols, cols)
    direct = render_directions(params, nfov_pixel_to_direction(cam, ii, jj))
    err = np.abs(sampled - direct)
    assert np.median(err) < 2.0 / 255.0, f"median {np.median(err):.5f}"


def test_project_then_distances():
    cam = camera_for_direction([0.0, 0.0, 1.0], fov_deg=60.0, size=64)
    img = NfovImage(camera=cam, pixels=np.full((64, 64, 3), 0.5))
    pv = project_nfov_to_erp(img, 256, 128)
    assert pv.coverage.any()
    assert not pv.coverage.all()
    # Covered pixels carry finite distances below the half-diagonal.
    assert np.all(np.isfinite(pv.distance[pv.coverage]))
    assert pv.distance[pv.coverage].max() <= pv.max_distance + 1e-9
    assert np.all(np.isinf(pv.distance[~pv.coverage]))
    # The ERP pixel nearest the view center has near-zero distance.
    vmin = pv.distance[pv.coverage].min()
    assert vmin < 1.0, f"min distance {vmin}"
    # Colors are zero outside coverage, constant inside.
    assert np.all(pv.colors[~pv.coverage] == 0.0)
    assert np.allclose(pv.colors[pv.coverage], 0.5)


def test_project_round_trip_colors():
    erp = render_panorama(scene_params(5), 128)
    cam = camera_for_direction([1.0, 0.0, 0.0], fov_deg=70.0, size=96)
    view = NfovImage(camera=cam, pixels=extract_nfov(erp, cam))
    pv = project_nfov_to_erp(view, 256, 128)
    err = np.abs(pv.colors - erp)[pv.coverage]
    assert np.median(err) < 3.0 / 255.0, f"median {np.median(err):.5f}"


def test_frustum_excludes_behind():
    cam = camera_for_direction([0.0, 0.0, 1.0], fov_deg=90.0, size=16)
    cov = camera_coverage(cam, 64, 32)
    # Directions with z < 0 are behind the camera; column 0 of the ERP
    # looks along lon ~ -pi, i.e. -z.
    assert not cov[:, 0].any()
    assert cov[16, 32]  # image center looks along +z


def test_full_viewset_covers_sphere():
    views = standard_viewset(60.0, 16)
    counts = coverage_of_viewset(views, 128, 64)
    assert counts.min() >= 1, "sphere not fully covered"
    assert counts.max() <= 6


def test_projected_resolution_mismatch_rejected():
    cam = camera_for_direction([0, 0, 1], fov_deg=60.0, size=32)
    try:
        NfovImage(camera=cam, pixels=np.zeros((16, 32, 3)))
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
