"""Distance-weighted merging of projected views into one ERP image.

Each view contributes weight w = 1 - d/D at a covered pixel, where d is
the pixel's distance from that view's image center and D the view's
half-diagonal, so w falls from 1 at the center to 0 at the corners. The
merged value is sum(w_i * x_i) / sum(w_i), evaluated as normalized
weights first: y = sum((w_i / W) * x_i) with W = sum(w_k). For two views
this reproduces the classic y = w_i/(w_i+w_j) x_i + w_j/(w_i+w_j) x_j
bit-for-bit. Views are accumulated in ascending `index` order so the
result does not depend on list order.
"""

from __future__ import annotations

import numpy as np

from .projection import NfovImage, ProjectedView, camera_for_direction, project_nfov_to_erp

_ZERO_WEIGHT_EPS = 1e-12


def _raw_weight(view: ProjectedView) -> np.ndarray:
    w = np.zeros(view.distance.shape, dtype=np.float64)
    cov = view.coverage
    w[cov] = 1.0 - view.distance[cov] / view.max_distance
    return w


def blend_weights(views: list[ProjectedView]) -> np.ndarray:
    """Normalized per-view blending weights, (N, H, W), zero where uncovered.

    At every covered pixel the weights sum to 1. Pixels where all raw
    weights vanish (exact view corners) fall back to an unweighted mean
    over the covering views.
    """
    views = sorted(views, key=lambda pv: pv.index)
    total = np.zeros(views[0].distance.shape, dtype=np.float64)
    count = np.zeros(views[0].distance.shape, dtype=np.int64)
    for pv in views:
        total += _raw_weight(pv)
        count += pv.coverage
    degenerate = (total < _ZERO_WEIGHT_EPS) & (count > 0)

    out = np.zeros((len(views),) + total.shape, dtype=np.float64)
    safe_total = np.where(total > 0, total, 1.0)
    for n, pv in enumerate(views):
        w = _raw_weight(pv) / safe_total
        w[degenerate] = pv.coverage[degenerate] / count[degenerate]
        out[n] = w
    return out


def blend_views(views: list[ProjectedView]) -> np.ndarray:
    """Merge projected views into one ERP image.

    Raises ValueError (with the pixel count) if the union of coverages
    leaves any ERP pixel uncovered.
    """
    if not views:
        raise ValueError("cannot blend an empty view list")
    views = sorted(views, key=lambda pv: pv.index)
    shape = views[0].distance.shape

    total = np.zeros(shape, dtype=np.float64)
    count = np.zeros(shape, dtype=np.int64)
    for pv in views:
        if pv.distance.shape != shape:
            raise ValueError("all projected views must share the ERP shape")
        total += _raw_weight(pv)
        count += pv.coverage

    uncovered = int((count == 0).sum())
    if uncovered:
        raise ValueError(f"blend input leaves {uncovered} ERP pixels uncovered")

    # Corner-only pixels: every raw weight is ~0, fall back to plain mean.
    degenerate = total < _ZERO_WEIGHT_EPS
    safe_total = np.where(degenerate, 1.0, total)

    out = np.zeros(shape + (3,), dtype=np.float64)
    for pv in views:
        w = _raw_weight(pv) / safe_total
        w[degenerate] = pv.coverage[degenerate] / count[degenerate]
        out += w[:, :, None] * pv.colors
    return out


def embed_nfov_center(pixels: np.ndarray, fov_w_deg: float, fov_h_deg: float,
                      width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """Embed an NFoV image at the ERP center (a +z-facing camera).

    Returns (erp, known_mask): the image projected onto an otherwise
    black ERP and the boolean footprint of the camera frustum. This is
    the conditional-image layout used when a single photo seeds a
    panorama.
    """
    h, w = pixels.shape[:2]
    cam = camera_for_direction(
        np.array([0.0, 0.0, 1.0]), fov_deg=fov_w_deg, fov_h_deg=fov_h_deg,
        size=w, height=h)
    pv = project_nfov_to_erp(NfovImage(camera=cam, pixels=pixels), width, height)
    return pv.colors, pv.coverage
