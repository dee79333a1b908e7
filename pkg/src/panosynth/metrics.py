"""Desk-scale quality metrics for panoramas.

Reconstruction error is latitude-weighted by cos(lat) so it measures
sphere area rather than ERP pixel count (ERP oversamples the poles).
No perceptual or distributional metrics live here: FID, IS and LPIPS
need pretrained networks and are deliberately not implemented.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

POLE_LAT_DEG = 60.0
EQUATOR_LAT_DEG = 30.0


@dataclass(frozen=True)
class MetricReport:
    global_mse: float
    pole_mse: float
    equator_mse: float
    seam_score: float
    psnr: float
    coverage_min: int | None = None
    coverage_max: int | None = None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k, v in d.items():
            if isinstance(v, float) and not math.isfinite(v):
                d[k] = None  # JSON has no Infinity
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _row_latitudes(height: int) -> np.ndarray:
    v = np.arange(height) + 0.5
    return np.pi / 2 - np.pi * v / height


def latitude_weights(height: int) -> np.ndarray:
    """Per-row sphere-area weights, cos(lat) at pixel centers."""
    return np.cos(_row_latitudes(height))


def _weighted_mse(per_row: np.ndarray, w_rows: np.ndarray,
                  row_sel: np.ndarray) -> float:
    if not row_sel.any():
        return 0.0
    w = w_rows[row_sel]
    return float((w * per_row[row_sel]).sum() / w.sum())


def psnr_from_mse(mse: float) -> float:
    """Peak signal-to-noise for [0, 1] images; infinite at zero error."""
    if mse <= 0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def mse_regions(a: np.ndarray, b: np.ndarray,
                coverage: np.ndarray | None = None) -> MetricReport:
    """Compare two equal-size panoramas, area-weighted.

    pole is |lat| > 60 deg, equator |lat| < 30 deg. seam_score is
    evaluated on `a`, the image under test. If a coverage count map is
    given its min and max fill the coverage fields.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    height = a.shape[0]
    per_row = ((a - b) ** 2).reshape(height, -1).mean(axis=1)
    lat = np.abs(_row_latitudes(height))
    w = latitude_weights(height)

    g = _weighted_mse(per_row, w, np.ones(height, dtype=bool))
    pole = _weighted_mse(per_row, w, lat > np.radians(POLE_LAT_DEG))
    equator = _weighted_mse(per_row, w, lat < np.radians(EQUATOR_LAT_DEG))

    cov_min = cov_max = None
    if coverage is not None:
        cov_min = int(np.min(coverage))
        cov_max = int(np.max(coverage))
    return MetricReport(global_mse=g, pole_mse=pole, equator_mse=equator,
                        seam_score=seam_score(a), psnr=psnr_from_mse(g),
                        coverage_min=cov_min, coverage_max=cov_max)


def seam_score(erp: np.ndarray) -> float:
    """Left/right edge discontinuity relative to typical column change.

    Mean abs difference between columns 0 and W-1, divided by the mean
    abs difference over all adjacent interior column pairs. 1.0 means
    the wrap seam looks like any other column boundary; a constant
    image (0/0) is seamless by convention.
    """
    erp = np.asarray(erp, dtype=np.float64)
    seam = float(np.abs(erp[:, 0] - erp[:, -1]).mean())
    interior = float(np.abs(np.diff(erp, axis=1)).mean())
    if interior == 0.0:
        return 1.0 if seam == 0.0 else math.inf
    return seam / interior
