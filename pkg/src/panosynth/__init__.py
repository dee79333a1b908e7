"""Two-stage omni-directional image synthesis toolkit.

Coarse full-sphere generation on a low-resolution ERP code grid,
followed by per-view refinement of 26 overlapping perspective views
that are projected and blended back into a seamless high-resolution
panorama.
"""

from .blending import blend_views, blend_weights, embed_nfov_center
from .codebook import Codebook, decode, encode, load_codebook, \
    save_codebook, train_codebook
from .conditioning import CenterNfov, ExplicitMask, GroundRegion, \
    RandomBoxes, TwoView, condition_to_views, make_condition
from .geometry import CameraFrame, camera_frame_for, direction_to_latlon, \
    erp_direction_grid, latlon_to_direction, rhombicuboctahedron_directions
from .metrics import MetricReport, mse_regions, seam_score
from .pipeline import PipelineConfig, SynthesisResult, reconstruct_direct, \
    reconstruct_via_views, stage1, stage2, synthesize
from .projection import NfovCamera, NfovImage, ProjectedView, \
    camera_for_direction, coverage_of_viewset, extract_nfov, \
    project_nfov_to_erp, standard_viewset
from .sampler import ContextCopyPredictor, MarginalPredictor, \
    OraclePredictor, PerViewPredictor, SampleConfig, mask_ratio, sample, \
    training_mask
from .scenes import SceneParams, render_directions, render_panorama, \
    scene_params

__version__ = "0.1.0"

__all__ = [
    "blend_views", "blend_weights", "embed_nfov_center",
    "Codebook", "decode", "encode", "load_codebook", "save_codebook",
    "train_codebook",
    "CenterNfov", "ExplicitMask", "GroundRegion", "RandomBoxes", "TwoView",
    "condition_to_views", "make_condition",
    "CameraFrame", "camera_frame_for", "direction_to_latlon",
    "erp_direction_grid", "latlon_to_direction",
    "rhombicuboctahedron_directions",
    "MetricReport", "mse_regions", "seam_score",
    "PipelineConfig", "SynthesisResult", "reconstruct_direct",
    "reconstruct_via_views", "stage1", "stage2", "synthesize",
    "NfovCamera", "NfovImage", "ProjectedView", "camera_for_direction",
    "coverage_of_viewset", "extract_nfov", "project_nfov_to_erp",
    "standard_viewset",
    "ContextCopyPredictor", "MarginalPredictor", "OraclePredictor",
    "PerViewPredictor", "SampleConfig", "mask_ratio", "sample",
    "training_mask",
    "SceneParams", "render_directions", "render_panorama", "scene_params",
]
