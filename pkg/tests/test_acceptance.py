"""Ten go/no-go checks for the whole package, one test per criterion.

Each test prints a single `criterion NN [PASS|FAIL] ...` line (visible
with `pytest -s`, or in the captured-output section on failure) and
asserts the stated tolerance. The heavy fixtures are module-scoped:
one patch-codebook representation experiment over synthetic panoramas,
and one full-resolution oracle synthesis setup shared by the last two
criteria.

Angular errors are measured through chord length, 2*asin(|d - d'| / 2):
acos of a dot product cannot resolve angles below ~1e-8 rad in double
precision (the derivative of acos blows up at 1), while the chord form
stays accurate down to the femto-radian range.
"""

import math
import time

import numpy as np
import pytest

from panosynth.blending import blend_views, blend_weights
from panosynth.codebook import decode, encode, image_patches, train_codebook
from panosynth.conditioning import (
    CenterNfov,
    ExplicitMask,
    GroundRegion,
    RandomBoxes,
    TwoView,
    make_condition,
)
from panosynth.geometry import direction_to_erp_pixel, erp_pixel_to_direction
from panosynth.metrics import mse_regions, seam_score
from panosynth.pipeline import (
    PipelineConfig,
    oracle_predictors_for,
    reconstruct_direct,
    reconstruct_via_views,
    synthesize,
)
from panosynth.projection import (
    NfovImage,
    ProjectedView,
    camera_for_direction,
    coverage_of_viewset,
    extract_nfov,
    nfov_pixel_to_direction,
    project_nfov_to_erp,
    standard_viewset,
)
from panosynth.sampler import (
    MarginalPredictor,
    OraclePredictor,
    SampleConfig,
    mask_count,
    sample,
)
from panosynth.scenes import render_panorama, scene_params


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {detail}")
    assert ok, f"criterion {num}: {detail}"


def _chord_angle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 2.0 * np.arcsin(np.linalg.norm(a - b, axis=-1) / 2.0)


# --------------------------------------------------------------------
# Heavy shared fixtures


def _representation_setup():
    """Patch codebook trained on NFoV views of 20 synthetic panoramas.

    Views use 272x272 pixels: 17 patch columns, an odd count, so every
    view center falls mid-patch. With an even count the five seam-
    covering views (whose centers lie exactly on the lon = +-pi
    meridian) would put a quantization block edge along the full length
    of the wrap seam and poison the seam comparison.
    """
    views = standard_viewset(60.0, 272)
    train_imgs = []
    for s in range(20):
        erp = render_panorama(scene_params(s), 512)
        train_imgs.extend(extract_nfov(erp, cam) for cam in views)
    cb = train_codebook(train_imgs, k=256, patch=16, seed=0,
                        max_patches=25000)
    return cb, views


@pytest.fixture(scope="module")
def oracle_setup():
    """Full-resolution ground truth + codebook able to memorize it.

    The codebook is trained on the target's own 26 views and its
    low-resolution resize, so oracle-predicted codes reproduce the
    target up to quantization error alone.
    """
    from panosynth.raster import resize_erp

    truth = render_panorama(scene_params(11), 1024)
    views = standard_viewset(60.0, 256)
    imgs = [extract_nfov(truth, cam) for cam in views]
    imgs.append(resize_erp(truth, (256, 512)))
    cb = train_codebook(imgs, k=1024, patch=16, seed=0)
    cfg = PipelineConfig(codebook=cb, stage1_predictor=None,
                         stage2_predictor=None)
    s1, s2 = oracle_predictors_for(truth, cfg)
    cfg.stage1_predictor, cfg.stage2_predictor = s1, s2
    return truth, cfg


# --------------------------------------------------------------------
# Criteria


def test_criterion_01_geometry_round_trip():
    rng = np.random.default_rng(100)
    t0 = time.perf_counter()
    d = rng.normal(size=(10_000, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    u, v = direction_to_erp_pixel(d, 2048, 1024)
    d2 = erp_pixel_to_direction(u, v, 2048, 1024)
    worst = float(_chord_angle(d, d2).max())
    dt = time.perf_counter() - t0
    ok = worst < 1e-9 and dt < 1.0
    _report(1, ok, f"10k direction round trips: max error "
                   f"{worst:.3e} rad (< 1e-9), {dt:.3f} s (< 1 s)")


def test_criterion_02_gnomonic_collinearity():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        cam = camera_for_direction(rng.normal(size=3), fov_deg=60.0, size=256)
        # Three collinear pixels: two random points and their midpoint.
        p0 = rng.uniform(0, 256, size=2)
        p1 = rng.uniform(0, 256, size=2)
        pm = (p0 + p1) / 2.0
        i = np.array([p0[0], p1[0], pm[0]])
        j = np.array([p0[1], p1[1], pm[1]])
        d = nfov_pixel_to_direction(cam, i, j)
        triple = abs(float(np.linalg.det(d)))
        worst = max(worst, triple)
    ok = worst < 1e-9
    _report(2, ok, f"100 cameras, collinear pixels -> coplanar rays: "
                   f"max |triple product| {worst:.3e} (< 1e-9)")


def test_criterion_03_viewset_coverage():
    t0 = time.perf_counter()
    counts = coverage_of_viewset(standard_viewset(60.0, 256), 2048, 1024)
    dt = time.perf_counter() - t0
    cmin, cmax = int(counts.min()), int(counts.max())
    ok = cmin >= 1 and cmax >= 2 and dt < 10.0
    _report(3, ok, f"26 views at 60 deg on 1024x2048: coverage min {cmin} "
                   f"(>= 1), max {cmax} (>= 2), {dt:.2f} s (< 10 s)")


def test_criterion_04_blend_round_trip(pano_512):
    views = standard_viewset(60.0, 256)
    projected = []
    for k, cam in enumerate(views):
        nfov = extract_nfov(pano_512, cam)
        pv = project_nfov_to_erp(NfovImage(camera=cam, pixels=nfov),
                                 1024, 512)
        projected.append(ProjectedView(colors=pv.colors,
                                       coverage=pv.coverage,
                                       distance=pv.distance,
                                       max_distance=pv.max_distance,
                                       index=k))
    w = blend_weights(projected)
    unity_err = float(np.abs(w.sum(axis=0) - 1.0).max())
    out = blend_views(projected)
    med = float(np.median(np.abs(out - pano_512)))
    seam = seam_score(out)
    ok = unity_err < 1e-9 and med <= 3.0 / 255.0 and seam <= 1.5
    _report(4, ok, f"partition of unity {unity_err:.2e} (< 1e-9), "
                   f"round-trip median {med * 255:.3f}/255 (<= 3/255), "
                   f"seam {seam:.3f} (<= 1.5)")


def test_criterion_05_blend_closed_forms():
    rng = np.random.default_rng(102)
    shape = (8, 16)
    x1 = rng.uniform(size=shape + (3,))
    x2 = rng.uniform(size=shape + (3,))

    def view(colors, dist, idx):
        return ProjectedView(colors=colors,
                             coverage=np.ones(shape, dtype=bool),
                             distance=np.full(shape, dist),
                             max_distance=10.0, index=idx)

    # Symmetric: equal distances, so the result is the exact mean.
    sym = blend_views([view(x1, 4.0, 0), view(x2, 4.0, 1)])
    sym_ok = np.array_equal(sym, 0.5 * x1 + 0.5 * x2)

    # Center/corner: w = 1 vs w = 0, center view passes through exactly.
    cc = blend_views([view(x1, 0.0, 0), view(x2, 10.0, 1)])
    cc_ok = np.array_equal(cc, x1)

    # General pair against the same-arithmetic closed form.
    g = blend_views([view(x1, 2.0, 0), view(x2, 7.0, 1)])
    w1, w2 = 1.0 - 2.0 / 10.0, 1.0 - 7.0 / 10.0
    total = w1 + w2
    closed = (w1 / total) * x1 + (w2 / total) * x2
    gen_ok = np.array_equal(g, closed)

    ok = sym_ok and cc_ok and gen_ok
    _report(5, ok, f"two-view closed forms bit-exact: symmetric {sym_ok}, "
                   f"center/corner {cc_ok}, general {gen_ok}")


def test_criterion_06_sampler_schedule_and_oracle():
    # Independent schedule oracle: math.ceil over the exact cosine, with
    # the t = T endpoint pinned to 0 because cos(pi/2) is exactly zero
    # mathematically (float cos(pi/2) is ~6e-17 and would ceil to 1).
    sched_ok = True
    for m0 in (100, 512, 1000):
        for t in range(1, 17):
            expected = 0 if t == 16 else math.ceil(
                m0 * math.cos(math.pi / 2.0 * t / 16.0))
            if mask_count(t, 16, m0) != expected:
                sched_ok = False

    rng = np.random.default_rng(103)
    vocab = 128
    truth = rng.integers(0, vocab, size=(16, 32))
    grid = truth.copy().reshape(-1)
    grid[rng.choice(grid.size, size=400, replace=False)] = vocab
    grid = grid.reshape(truth.shape)
    out = sample(OraclePredictor(truth, vocab), grid, None,
                 SampleConfig(steps=16, temperature=0.0, seed=0), vocab)
    oracle_ok = np.array_equal(out, truth)

    pred = MarginalPredictor.uniform(vocab)
    cfg = SampleConfig(steps=16, temperature=3.0, seed=7)
    full = np.full((16, 32), vocab)
    seed_ok = np.array_equal(sample(pred, full, None, cfg, vocab),
                             sample(pred, full, None, cfg, vocab))

    ok = sched_ok and oracle_ok and seed_ok
    _report(6, ok, f"cosine schedule counts {sched_ok}, oracle exact "
                   f"{oracle_ok}, seed-deterministic {seed_ok}")


def test_criterion_07_codebook_contract(small_codebook):
    rng = np.random.default_rng(104)
    ph = small_codebook.patch_h
    patches = rng.uniform(size=(100, ph * ph * 3))
    img = (patches.reshape(10, 10, ph, ph, 3)
           .transpose(0, 2, 1, 3, 4).reshape(10 * ph, 10 * ph, 3))
    codes = encode(img, small_codebook)
    entries = small_codebook.entries.astype(np.float64)
    brute = np.array([int(np.argmin(((entries - p) ** 2).sum(axis=1)))
                      for p in image_patches(img, ph, ph)],
                     dtype=np.int32).reshape(10, 10)
    brute_ok = np.array_equal(codes, brute)

    rec = decode(codes, small_codebook)
    idem_ok = np.array_equal(encode(rec, small_codebook), codes)

    imgs = [render_panorama(scene_params(s), 64) for s in (30, 31)]
    cb1 = train_codebook(imgs, k=16, patch=8, seed=3)
    cb2 = train_codebook(imgs, k=16, patch=8, seed=3)
    repro_ok = np.array_equal(cb1.entries, cb2.entries)

    ok = brute_ok and idem_ok and repro_ok
    _report(7, ok, f"encode == brute force on 100 random patches "
                   f"{brute_ok}, encode/decode idempotent {idem_ok}, "
                   f"same-seed training reproducible {repro_ok}")


def test_criterion_08_view_route_beats_direct():
    t0 = time.perf_counter()
    cb, views = _representation_setup()
    pole_wins = seam_wins = 0
    n_eval = 12
    for s in range(100, 100 + n_eval):
        erp = render_panorama(scene_params(s), 512)
        direct = reconstruct_direct(erp, cb)
        via = reconstruct_via_views(erp, cb, views)
        rep_d = mse_regions(direct, erp)
        rep_v = mse_regions(via, erp)
        pole_wins += int(rep_v.pole_mse < rep_d.pole_mse)
        seam_wins += int(rep_v.seam_score < rep_d.seam_score)
    dt = time.perf_counter() - t0
    need = math.ceil(0.9 * n_eval)
    ok = pole_wins >= need and seam_wins >= need and dt < 300.0
    _report(8, ok, f"view route wins pole MSE {pole_wins}/{n_eval} and "
                   f"seam {seam_wins}/{n_eval} (need >= {need}), "
                   f"{dt:.0f} s train+eval (< 300 s)")


def test_criterion_09_oracle_synthesis(oracle_setup):
    truth, cfg = oracle_setup
    cond, known = make_condition(truth, CenterNfov())

    cfg.workers = 1
    t0 = time.perf_counter()
    single = synthesize(cond, known, cfg)
    dt_single = time.perf_counter() - t0

    cfg.workers = 4
    t0 = time.perf_counter()
    parallel = synthesize(cond, known, cfg)
    dt_par = time.perf_counter() - t0

    med = float(np.median(np.abs(single.high - truth)))
    same = np.array_equal(single.high, parallel.high)
    ok = (med <= 6.0 / 255.0 and dt_single < 30.0 and dt_par < 10.0
          and same)
    _report(9, ok, f"oracle synthesis median error {med * 255:.2f}/255 "
                   f"(<= 6/255), {dt_single:.1f} s single (< 30 s), "
                   f"{dt_par:.1f} s parallel (< 10 s), outputs equal {same}")


def test_criterion_10_conditioning_preserved(oracle_setup):
    truth, cfg = oracle_setup
    cfg.workers = 4
    h, w = truth.shape[:2]
    band = np.zeros((h, w), dtype=bool)
    band[h // 4: h // 2, w // 8: w // 2] = True
    variants = [
        ("center", CenterNfov()),
        ("boxes", RandomBoxes()),
        ("ground", GroundRegion()),
        ("two-view", TwoView()),
        ("explicit", ExplicitMask(band)),
    ]
    rng = np.random.default_rng(105)
    failures = []
    for name, spec in variants:
        cond, known = make_condition(truth, spec, rng)
        result = synthesize(cond, known, cfg)
        med = float(np.median(np.abs(result.high[known] - cond[known])))
        lowest = float(result.high.min())
        finite = bool(np.isfinite(result.high).all())
        if med > 6.0 / 255.0 or lowest <= 0.0 or not finite:
            failures.append(f"{name}: median {med * 255:.2f}/255, "
                            f"min {lowest:.4f}, finite {finite}")
    ok = not failures
    _report(10, ok, "all five condition variants: known region within "
                    "6/255, no zeros leaked"
                    + ("" if ok else f" -- failed: {'; '.join(failures)}"))
