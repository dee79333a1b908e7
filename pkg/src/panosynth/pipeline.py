"""Two-stage panorama synthesis and the reconstruction comparison.

Stage 1 fills a coarse 256x512 ERP code grid from the condition; stage 2
refines it as 26 overlapping NFoV views at 256x256, each conditioned on
the decoded low-resolution image, then projects and blends the views
into the 1024x2048 result. The stages share nothing but the decoded
low-res image, and the 26 views are mutually independent, so stage 2
can fan out across workers.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .blending import blend_views
from .codebook import Codebook, decode, encode
from .projection import NfovImage, extract_nfov, project_nfov_to_erp, \
    standard_viewset
from .raster import resize_erp
from .sampler import ContextCopyPredictor, MarginalPredictor, \
    OraclePredictor, PerViewPredictor, SampleConfig, sample

FULLY_KNOWN = 0.999


@dataclass
class PipelineConfig:
    codebook: Codebook
    stage1_predictor: object
    stage2_predictor: object
    low_shape: tuple[int, int] = (256, 512)
    high_shape: tuple[int, int] = (1024, 2048)
    nfov_res: int = 256
    fov_deg: float = 60.0
    steps: int = 16
    temperature: float = 0.0
    seed: int = 0
    workers: int = 1
    directions: np.ndarray | None = None
    views: list = field(init=False)

    def __post_init__(self):
        ph, pw = self.codebook.patch_h, self.codebook.patch_w
        for name, (h, w) in (("low_shape", self.low_shape),
                             ("high_shape", self.high_shape),
                             ("nfov", (self.nfov_res, self.nfov_res))):
            if h % ph or w % pw:
                raise ValueError(
                    f"{name} {h}x{w} not divisible by patch {ph}x{pw}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.views = standard_viewset(self.fov_deg, self.nfov_res,
                                      directions=self.directions)


def fixed_code_grid(cond: np.ndarray, known: np.ndarray,
                    cb: Codebook) -> np.ndarray:
    """Encode `cond`, keeping codes only for fully-known patches.

    A patch whose footprint is not entirely known gets the MASK
    sentinel: fixing a partially-known patch would bake zeroed pixels
    into the output.
    """
    codes = encode(cond, cb)
    gh, gw = codes.shape
    full = (np.asarray(known, dtype=bool)
            .reshape(gh, cb.patch_h, gw, cb.patch_w)
            .all(axis=(1, 3)))
    return np.where(full, codes, cb.mask_code).astype(np.int32)


def _known_after_resize(mask: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Resize a boolean mask, counting a pixel known only if its whole
    source footprint was known."""
    if mask.shape == shape:
        return np.asarray(mask, dtype=bool)
    resized = resize_erp(np.asarray(mask, dtype=np.float64), shape)
    return resized >= FULLY_KNOWN


def stage1(cond: np.ndarray, known: np.ndarray,
           cfg: PipelineConfig) -> np.ndarray:
    """Coarse synthesis: fill the low-res code grid, decode to 256x512."""
    low_cond = resize_erp(np.asarray(cond, dtype=np.float64), cfg.low_shape)
    low_known = _known_after_resize(known, cfg.low_shape)
    low_cond = np.where(low_known[:, :, None], low_cond, 0.0)
    initial = fixed_code_grid(low_cond, low_known, cfg.codebook)
    ctx = {"stage": 1, "condition": low_cond, "mask": low_known}
    grid = sample(cfg.stage1_predictor, initial, ctx,
                  SampleConfig(cfg.steps, cfg.temperature, cfg.seed),
                  cfg.codebook.mask_code)
    return decode(grid, cfg.codebook)


def _stage2_view(args):
    k, cam, low, cond, mask_f, cfg = args
    low_view = extract_nfov(low, cam)
    cond_view = extract_nfov(cond, cam)
    # Bilinear-sampled mask: >= FULLY_KNOWN means the whole 2x2 support
    # of every sample was known, so cond_view carries no zero bleed.
    known_view = extract_nfov(mask_f, cam) >= FULLY_KNOWN
    cond_view = np.where(known_view[:, :, None], cond_view, 0.0)
    initial = fixed_code_grid(cond_view, known_view, cfg.codebook)
    ctx = {"stage": 2, "view_index": k, "low": low_view,
           "condition": cond_view, "mask": known_view}
    grid = sample(cfg.stage2_predictor, initial, ctx,
                  SampleConfig(cfg.steps, cfg.temperature,
                               cfg.seed + 7919 * (k + 1)),
                  cfg.codebook.mask_code)
    decoded = decode(grid, cfg.codebook)
    h, w = cfg.high_shape
    pv = project_nfov_to_erp(NfovImage(camera=cam, pixels=decoded), w, h)
    return dataclasses.replace(pv, index=k), decoded


def stage2(low: np.ndarray, cond: np.ndarray, known: np.ndarray,
           cfg: PipelineConfig, return_views: bool = False):
    """Refine: synthesize all views against the low-res image, blend."""
    if low.shape[:2] != cfg.low_shape:
        raise ValueError(f"stage-2 input is {low.shape[:2]}, "
                         f"expected {cfg.low_shape}")
    mask_f = np.asarray(known, dtype=np.float64)
    jobs = [(k, cam, low, cond, mask_f, cfg)
            for k, cam in enumerate(cfg.views)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_stage2_view, jobs))
    else:
        results = [_stage2_view(j) for j in jobs]
    erp = blend_views([pv for pv, _ in results])
    if return_views:
        return erp, [dec for _, dec in results]
    return erp


@dataclass
class SynthesisResult:
    high: np.ndarray
    low: np.ndarray
    views: list


def synthesize(cond: np.ndarray, known: np.ndarray,
               cfg: PipelineConfig) -> SynthesisResult:
    """Full two-stage run: coarse ERP, per-view refinement, blend."""
    cond = np.asarray(cond, dtype=np.float64)
    if cond.shape[:2] != cfg.high_shape:
        cond_hi = resize_erp(cond, cfg.high_shape)
        known_hi = _known_after_resize(known, cfg.high_shape)
        cond_hi = np.where(known_hi[:, :, None], cond_hi, 0.0)
    else:
        cond_hi, known_hi = cond, np.asarray(known, dtype=bool)
    low = stage1(cond, known, cfg)
    high, views = stage2(low, cond_hi, known_hi, cfg, return_views=True)
    return SynthesisResult(high=high, low=low, views=views)


def _stage_grids(erp: np.ndarray, cfg: PipelineConfig):
    """Code grids a panorama induces: one low-res grid, one per view."""
    erp = np.asarray(erp, dtype=np.float64)
    low = encode(resize_erp(erp, cfg.low_shape), cfg.codebook)
    high = erp if erp.shape[:2] == cfg.high_shape \
        else resize_erp(erp, cfg.high_shape)
    per_view = [encode(extract_nfov(high, cam), cfg.codebook)
                for cam in cfg.views]
    return low, per_view


def oracle_predictors_for(erp: np.ndarray, cfg: PipelineConfig):
    """(stage1, stage2) predictors that reproduce this panorama's codes."""
    vocab = cfg.codebook.num_entries
    low, per_view = _stage_grids(erp, cfg)
    return (OraclePredictor(low, vocab),
            PerViewPredictor([OraclePredictor(g, vocab) for g in per_view]))


def marginal_predictors_for(images, cfg: PipelineConfig):
    """(stage1, stage2) code-frequency predictors from a corpus; with an
    empty corpus both fall back to uniform."""
    vocab = cfg.codebook.num_entries
    lows, view_grids = [], []
    for erp in images:
        low, per_view = _stage_grids(erp, cfg)
        lows.append(low)
        view_grids.extend(per_view)
    if not lows:
        return MarginalPredictor.uniform(vocab), MarginalPredictor.uniform(vocab)
    return (MarginalPredictor.from_grids(lows, vocab),
            MarginalPredictor.from_grids(view_grids, vocab))


def contextcopy_predictors_for(images, cfg: PipelineConfig):
    """(stage1, stage2) per-position frequency predictors; stage 2 keeps
    one table per view, dispatched on conditioning['view_index']."""
    vocab = cfg.codebook.num_entries
    lows = []
    per_view_corpora: list[list[np.ndarray]] = [[] for _ in cfg.views]
    for erp in images:
        low, per_view = _stage_grids(erp, cfg)
        lows.append(low)
        for bucket, g in zip(per_view_corpora, per_view):
            bucket.append(g)
    if not lows:
        raise ValueError("context-copy predictors need a corpus")
    s2 = PerViewPredictor([ContextCopyPredictor.from_grids(c, vocab)
                           for c in per_view_corpora])
    return ContextCopyPredictor.from_grids(lows, vocab), s2


def reconstruct_direct(erp: np.ndarray, cb: Codebook) -> np.ndarray:
    """Quantize the panorama in ERP space: decode(encode(erp))."""
    return decode(encode(erp, cb), cb)


def reconstruct_via_views(erp: np.ndarray, cb: Codebook,
                          views=None) -> np.ndarray:
    """Quantize through the view set: extract, encode/decode each NFoV
    view, project and blend back at the input resolution."""
    if views is None:
        views = standard_viewset()
    h, w = erp.shape[:2]
    projected = []
    for k, cam in enumerate(views):
        rec = decode(encode(extract_nfov(erp, cam), cb), cb)
        pv = project_nfov_to_erp(NfovImage(camera=cam, pixels=rec), w, h)
        projected.append(dataclasses.replace(pv, index=k))
    return blend_views(projected)
