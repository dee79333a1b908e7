"""Command-line front end: one executable, thirteen subcommands.

Exit codes: 0 success, 1 usage error (bad flags, unknown subcommand),
2 data error (missing file, malformed input, pipeline failure).

A plain-text config file (`key = value`, `#` comments) can pre-set any
flag of any subcommand via --config; explicit flags win over the file.
Every randomized subcommand logs the seed it ran with, and re-running
with that seed reproduces the outputs bit-exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import blending, codebook, conditioning, metrics, pipeline, raster
from .geometry import rhombicuboctahedron_directions
from .projection import NfovImage, camera_for_direction, extract_nfov, \
    project_nfov_to_erp, standard_viewset, coverage_of_viewset
from .sampler import ContextCopyPredictor, MarginalPredictor, \
    OraclePredictor, SampleConfig, sample

log = logging.getLogger("panosynth")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _load_config(path: str) -> dict[str, str]:
    cfg = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key == "in":
            key = "inp"
        cfg[key] = value.strip()
    return cfg


def _apply_config(parsers, cfg: dict[str, str]) -> None:
    for p in parsers:
        for action in p._actions:
            if action.dest in ("help", argparse.SUPPRESS):
                continue
            if action.dest not in cfg:
                continue
            raw = cfg[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                action.default = raw.lower() in ("1", "true", "yes", "on")
            elif action.nargs in ("+", "*"):
                vals = raw.split()
                action.default = ([action.type(v) for v in vals]
                                  if action.type else vals)
            elif action.type is not None:
                action.default = action.type(raw)
            else:
                action.default = raw
            action.required = False


def _read_grid(path: str, cb: codebook.Codebook) -> np.ndarray:
    return codebook.parse_code_grid(Path(path).read_text(), cb.mask_code)


def _write_grid(codes: np.ndarray, cb: codebook.Codebook,
                path: str | None) -> None:
    text = codebook.format_code_grid(codes, cb.mask_code) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_json(payload: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(payload + "\n")
    else:
        Path(path).write_text(payload + "\n")


def _forward(parser: _Parser, args) -> np.ndarray:
    """Camera forward direction from --dir or --yaw/--pitch (degrees)."""
    has_angles = args.yaw is not None or args.pitch is not None
    if args.dir is not None and has_angles:
        parser.error("give --dir or --yaw/--pitch, not both")
    if args.dir is not None:
        dirs = rhombicuboctahedron_directions()
        if not 0 <= args.dir < len(dirs):
            parser.error(f"--dir must be in [0, {len(dirs)})")
        return dirs[args.dir]
    if not has_angles:
        parser.error("one of --dir or --yaw/--pitch is required")
    yaw = np.radians(args.yaw or 0.0)
    pitch = np.radians(args.pitch or 0.0)
    return np.array([np.cos(pitch) * np.sin(yaw), np.sin(pitch),
                     np.cos(pitch) * np.cos(yaw)])


def _load_image_dir(path: str) -> list[np.ndarray]:
    files = sorted(Path(path).glob("*.png"))
    if not files:
        raise ValueError(f"no .png files in {path}")
    return [raster.load_image(f) for f in files]


def _cmd_directions(args) -> int:
    for k, d in enumerate(rhombicuboctahedron_directions()):
        print(f"{k},{d[0]:.17g},{d[1]:.17g},{d[2]:.17g}")
    return 0


def _cmd_extract(parser, args) -> int:
    erp = raster.load_image(args.inp)
    cam = camera_for_direction(_forward(parser, args), fov_deg=args.fov,
                               size=args.size)
    raster.save_image(extract_nfov(erp, cam), args.out)
    return 0


def _cmd_project(parser, args) -> int:
    pixels = raster.load_image(args.inp)
    h, w = pixels.shape[:2]
    cam = camera_for_direction(_forward(parser, args), fov_deg=args.fov,
                               size=w, height=h)
    pv = project_nfov_to_erp(NfovImage(camera=cam, pixels=pixels),
                             args.width, args.height)
    raster.save_image(pv.colors, args.out)
    if args.mask_out:
        raster.save_mask(pv.coverage, args.mask_out)
    return 0


def _cmd_blend(args) -> int:
    dirs = rhombicuboctahedron_directions()
    if len(args.views) > len(dirs):
        raise ValueError(f"at most {len(dirs)} views, got {len(args.views)}")
    projected = []
    for k, path in enumerate(args.views):
        pixels = raster.load_image(path)
        h, w = pixels.shape[:2]
        cam = camera_for_direction(dirs[k], fov_deg=args.fov, size=w, height=h)
        pv = project_nfov_to_erp(NfovImage(camera=cam, pixels=pixels),
                                 args.width, args.height)
        projected.append(dataclasses.replace(pv, index=k))
    raster.save_image(blending.blend_views(projected), args.out)
    return 0


def _cmd_embed(args) -> int:
    pixels = raster.load_image(args.inp)
    erp, known = blending.embed_nfov_center(pixels, args.fovw, args.fovh,
                                            args.width, args.height)
    raster.save_image(erp, args.out)
    if args.mask:
        raster.save_mask(known, args.mask)
    return 0


def _cmd_train_codebook(args) -> int:
    log.info("seed = %d", args.seed)
    images = _load_image_dir(args.images)
    cb = codebook.train_codebook(images, k=args.k, patch=args.patch,
                                 seed=args.seed, max_patches=args.max_patches)
    codebook.save_codebook(cb, args.out)
    log.info("trained %d entries on %d images", cb.num_entries, len(images))
    return 0


def _cmd_encode(args) -> int:
    cb = codebook.load_codebook(args.codebook)
    codes = codebook.encode(raster.load_image(args.inp), cb)
    _write_grid(codes, cb, args.out)
    return 0


def _cmd_decode(args) -> int:
    cb = codebook.load_codebook(args.codebook)
    raster.save_image(codebook.decode(_read_grid(args.inp, cb), cb), args.out)
    return 0


def _cmd_mask(args) -> int:
    log.info("seed = %d", args.seed)
    erp = raster.load_image(args.inp)
    if args.variant == "center":
        spec = conditioning.CenterNfov(args.fovw, args.fovh)
    elif args.variant == "boxes":
        spec = conditioning.RandomBoxes(
            min_boxes=args.min_boxes, max_boxes=args.max_boxes,
            min_frac=args.min_frac, max_frac=args.max_frac)
    elif args.variant == "ground":
        spec = conditioning.GroundRegion(np.radians(args.lat_deg))
    else:
        spec = conditioning.TwoView(args.fovw, args.fovh)
    cond, known = conditioning.make_condition(
        erp, spec, np.random.default_rng(args.seed))
    raster.save_image(cond, args.out)
    raster.save_mask(known, args.mask_out)
    return 0


def _sample_predictor(parser, args, cb):
    vocab = cb.num_entries
    corpus = [_read_grid(p, cb) for p in args.corpus or []]
    if args.predictor == "oracle":
        if not args.truth:
            parser.error("--predictor oracle needs --truth")
        return OraclePredictor(_read_grid(args.truth, cb), vocab)
    if args.predictor == "contextcopy":
        if not corpus:
            parser.error("--predictor contextcopy needs --corpus")
        return ContextCopyPredictor.from_grids(corpus, vocab)
    if corpus:
        return MarginalPredictor.from_grids(corpus, vocab)
    return MarginalPredictor.uniform(vocab)


def _cmd_sample(parser, args) -> int:
    log.info("seed = %d", args.seed)
    cb = codebook.load_codebook(args.codebook)
    codes = _read_grid(args.codes, cb)
    pred = _sample_predictor(parser, args, cb)
    out = sample(pred, codes, {}, SampleConfig(args.T, args.temperature,
                                               args.seed), cb.mask_code)
    _write_grid(out, cb, args.out)
    return 0


def _cmd_synthesize(parser, args) -> int:
    log.info("seed = %d", args.seed)
    cb = codebook.load_codebook(args.codebook)
    cond = raster.load_image(args.cond)
    known = raster.load_mask(args.mask)
    cfg = pipeline.PipelineConfig(
        codebook=cb, stage1_predictor=None, stage2_predictor=None,
        steps=args.T, temperature=args.temperature, seed=args.seed,
        workers=args.workers)
    if args.predictor == "oracle":
        if not args.oracle_image:
            parser.error("--predictor oracle needs --oracle-image")
        preds = pipeline.oracle_predictors_for(
            raster.load_image(args.oracle_image), cfg)
    elif args.predictor == "contextcopy":
        if not args.corpus_images:
            parser.error("--predictor contextcopy needs --corpus-images")
        preds = pipeline.contextcopy_predictors_for(
            _load_image_dir(args.corpus_images), cfg)
    else:
        images = (_load_image_dir(args.corpus_images)
                  if args.corpus_images else [])
        preds = pipeline.marginal_predictors_for(images, cfg)
    cfg.stage1_predictor, cfg.stage2_predictor = preds
    result = pipeline.synthesize(cond, known, cfg)
    raster.save_image(result.high, args.out)
    if args.save_stage1:
        raster.save_image(result.low, args.save_stage1)
    if args.save_views:
        out_dir = Path(args.save_views)
        out_dir.mkdir(parents=True, exist_ok=True)
        for k, view in enumerate(result.views):
            raster.save_image(view, out_dir / f"view_{k:02d}.png")
    return 0


def _cmd_reconstruct_compare(args) -> int:
    cb = codebook.load_codebook(args.codebook)
    erp = raster.load_image(args.inp)
    views = standard_viewset()
    coverage = coverage_of_viewset(views, erp.shape[1], erp.shape[0])
    direct = pipeline.reconstruct_direct(erp, cb)
    via = pipeline.reconstruct_via_views(erp, cb, views)
    report = {
        "direct": metrics.mse_regions(direct, erp, coverage).to_dict(),
        "via_views": metrics.mse_regions(via, erp, coverage).to_dict(),
    }
    _write_json(json.dumps(report, indent=2), args.report)
    return 0


def _cmd_metrics(args) -> int:
    a = raster.load_image(args.a)
    b = raster.load_image(args.b)
    _write_json(metrics.mse_regions(a, b).to_json(), args.json)
    return 0


def _build_parser():
    parser = _Parser(prog="panosynth",
                     description="Two-stage panorama synthesis toolkit.")
    parser.add_argument("--config", help="key = value file pre-setting flags")
    parser.add_argument("--log-level", default="info",
                        choices=["debug", "info", "warning", "error"])
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")
    all_parsers = []

    def sub(name, **kw):
        p = subs.add_parser(name, **kw)
        all_parsers.append(p)
        return p

    p = sub("directions", help="print the 26 view directions as CSV")
    p.set_defaults(func=lambda a: _cmd_directions(a))

    def camera_flags(p, size=True):
        p.add_argument("--dir", type=int, default=None,
                       help="view-set direction index")
        p.add_argument("--yaw", type=float, default=None, help="degrees")
        p.add_argument("--pitch", type=float, default=None, help="degrees")
        p.add_argument("--fov", type=float, default=60.0)
        if size:
            p.add_argument("--size", type=int, default=256)

    def erp_size_flags(p):
        p.add_argument("--width", type=int, default=2048)
        p.add_argument("--height", type=int, default=1024)

    p = sub("extract", help="cut an NFoV view out of a panorama")
    p.add_argument("--in", dest="inp", required=True)
    camera_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=lambda a, _p=p: _cmd_extract(_p, a))

    p = sub("project", help="paste an NFoV view onto an ERP canvas")
    p.add_argument("--in", dest="inp", required=True)
    camera_flags(p, size=False)
    erp_size_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--mask-out", default=None)
    p.set_defaults(func=lambda a, _p=p: _cmd_project(_p, a))

    p = sub("blend", help="blend NFoV views (in direction order) into ERP")
    p.add_argument("--views", nargs="+", required=True)
    p.add_argument("--fov", type=float, default=60.0)
    erp_size_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_blend)

    p = sub("embed", help="center-embed one photo as a conditional ERP")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--fovw", type=float, default=conditioning.DEFAULT_FOV_W)
    p.add_argument("--fovh", type=float, default=conditioning.DEFAULT_FOV_H)
    erp_size_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--mask", default=None, help="write the known-mask here")
    p.set_defaults(func=_cmd_embed)

    p = sub("train-codebook", help="k-means patch codebook from a directory")
    p.add_argument("--images", required=True)
    p.add_argument("--k", type=int, default=256)
    p.add_argument("--patch", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-patches", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_codebook)

    p = sub("encode", help="image to code grid (text, MASK as 'M')")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_encode)

    p = sub("decode", help="code grid to image")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decode)

    p = sub("mask", help="build a conditional image + known-mask")
    p.add_argument("--variant", required=True,
                   choices=["center", "boxes", "ground", "two"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mask-out", required=True)
    p.add_argument("--fovw", type=float, default=conditioning.DEFAULT_FOV_W)
    p.add_argument("--fovh", type=float, default=conditioning.DEFAULT_FOV_H)
    p.add_argument("--lat-deg", type=float, default=-45.0,
                   help="ground variant: unknown below this latitude")
    p.add_argument("--min-boxes", type=int, default=1)
    p.add_argument("--max-boxes", type=int, default=8)
    p.add_argument("--min-frac", type=float, default=0.2)
    p.add_argument("--max-frac", type=float, default=0.8)
    p.set_defaults(func=_cmd_mask)

    p = sub("sample", help="fill MASK entries of a code grid")
    p.add_argument("--codes", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--predictor", default="marginal",
                   choices=["oracle", "marginal", "contextcopy"])
    p.add_argument("--truth", default=None, help="oracle ground-truth grid")
    p.add_argument("--corpus", nargs="*", default=None,
                   help="grids for frequency predictors")
    p.add_argument("--T", type=int, default=16, dest="T")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=lambda a, _p=p: _cmd_sample(_p, a))

    p = sub("synthesize", help="two-stage synthesis from a condition")
    p.add_argument("--cond", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--predictor", default="marginal",
                   choices=["oracle", "marginal", "contextcopy"])
    p.add_argument("--oracle-image", default=None)
    p.add_argument("--corpus-images", default=None)
    p.add_argument("--T", type=int, default=16, dest="T")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--save-stage1", default=None)
    p.add_argument("--save-views", default=None)
    p.set_defaults(func=lambda a, _p=p: _cmd_synthesize(_p, a))

    p = sub("reconstruct-compare", help="ERP-direct vs via-views quantization")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--report", default=None, help="JSON output path")
    p.set_defaults(func=_cmd_reconstruct_compare)

    p = sub("metrics", help="compare two panoramas")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--json", default=None, help="JSON output path")
    p.set_defaults(func=_cmd_metrics)

    return parser, all_parsers


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, all_parsers = _build_parser()

    config_path = None
    for i, tok in enumerate(list(argv)):
        if tok == "--config":
            if i + 1 >= len(argv):
                parser.error("--config needs a path")
            config_path = argv[i + 1]
            del argv[i:i + 2]
            break
        if tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
            del argv[i]
            break
    if config_path is not None:
        try:
            _apply_config(all_parsers, _load_config(config_path))
        except (OSError, ValueError) as exc:
            sys.stderr.write(f"panosynth: config error: {exc}\n")
            return 2

    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper()),
                        format="%(levelname)s %(name)s: %(message)s")
    if not getattr(args, "func", None):
        parser.error("a subcommand is required")
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError, IndexError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
