"""Command-line harness: reproducible experiment runs emitting CSV files.

Subcommands::

    parcs bound-surface --seed N --out DIR [--config FILE]
    parcs perm-table    --seed N --out DIR IMAGE.pgm [IMAGE.pgm ...]
    parcs image-psnr    --seed N --out DIR IMAGE.pgm [IMAGE.pgm ...]
    parcs video-psnr    --seed N --out DIR VIDEO.yuv
    parcs layer-fit     --seed N --out DIR IMAGE.pgm

Every command is a pure function of (config, input files): rerunning with
the same inputs reproduces the CSV outputs byte for byte. The one
exception is ``video_timing.csv``, which records measured wall-clock
seconds and is documented as non-reproducible. Each run writes a
``manifest.txt`` echoing the resolved configuration, the input digests,
and the schema version of every output file.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _rng
from .codec import (
    Frame,
    decode_image,
    decode_pair,
    dct2,
    encode_image,
    encode_sequence,
    psnr,
)
from .config import ConfigError, RunConfig, load_config
from .core import Signal2D, layer_sizes, sparsity_vector, threshold_support
from .formats import read_measurements, read_pgm, read_yuv_luminance, write_measurements
from .layermodel import (
    LayerModelParams,
    acceptance_lower_bound,
    empirical_layer_profile,
    layer_probabilities,
    monte_carlo_acceptance,
)
from .permute import zigzag_permutation
from .recon import SolverOptions

_SCHEMAS = {
    "bound_surface.csv": "bound_surface_v1",
    "perm_table.csv": "perm_table_v1",
    "image_psnr.csv": "image_psnr_v1",
    "video_psnr.csv": "video_psnr_v1",
    "video_timing.csv": "video_timing_v1 (wall-clock; not byte-reproducible)",
    "layer_fit.csv": "layer_fit_v1",
}


def _fmt(value) -> str:
    if isinstance(value, float) or isinstance(value, np.floating):
        if math.isinf(value):
            return "inf"
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(out: Path, command: str, cfg: RunConfig,
                    inputs: list[Path], outputs: list[str]) -> None:
    lines = [f"parcs {__version__}", f"command = {command}"]
    lines.extend(cfg.as_lines())
    for p in inputs:
        digest = hashlib.sha256(Path(p).read_bytes()).hexdigest()
        lines.append(f"input {Path(p).name} sha256={digest}")
    for name in outputs:
        lines.append(f"output {name} schema={_SCHEMAS[name]}")
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def _solver_options(cfg: RunConfig) -> SolverOptions:
    return SolverOptions(
        max_iterations=cfg.solver_max_iterations,
        abs_tol=cfg.solver_abs_tol,
        rel_tol=cfg.solver_rel_tol,
        feas_tol=cfg.solver_feas_tol,
        iteration_budget=cfg.solver_budget,
    )


def _load_image(path) -> Signal2D:
    return Signal2D(read_pgm(path).astype(np.float64))


def cmd_bound_surface(cfg: RunConfig, out: Path) -> list[str]:
    """Acceptance-probability lower bound vs Monte Carlo over a model grid."""
    shape = (cfg.grid_rows, cfg.grid_cols)
    rows = []
    row_index = 0
    for (r0, r1) in cfg.r_pairs:
        for r2 in cfg.r2_grid:
            for alpha in cfg.alpha_grid:
                row_index += 1
                if not (0 <= r0 < r1 < r2 <= min(shape)) or r2 < 2 * r1 - 3 * r0 - 1:
                    continue  # grid cross-products may include invalid corners
                params = LayerModelParams(r0, r1, r2, alpha, shape, cfg.convention)
                bound = acceptance_lower_bound(params)
                est, stderr = monte_carlo_acceptance(
                    params, cfg.trials, _rng.derive_key(cfg.seed, row_index))
                rows.append((r0, r1, r2, alpha, bound, est, stderr))
    if not rows:
        raise ConfigError("no valid (r0, r1, r2, alpha) combinations in the grid")
    _write_csv(out / "bound_surface.csv",
               ["r0", "r1", "r2", "alpha", "bound", "monte_carlo_estimate", "stderr"],
               rows)
    return ["bound_surface.csv"]


def cmd_perm_table(cfg: RunConfig, out: Path, images: list[Path]) -> list[str]:
    """Worst column count of thresholded DCT supports, before/after zigzag."""
    rows = []
    for path in images:
        img = _load_image(path)
        spectrum = dct2(img)
        zz = zigzag_permutation(img.rows, img.cols)
        for tau in cfg.thresholds:
            sup = threshold_support(spectrum, tau)
            before = sparsity_vector(sup).chebyshev()
            after = sparsity_vector(zz.apply_support(sup)).chebyshev()
            rows.append((Path(path).name, tau, len(sup), before, after))
    _write_csv(out / "perm_table.csv",
               ["image", "threshold", "support_size", "chebyshev_before", "chebyshev_after"],
               rows)
    return ["perm_table.csv"]


def cmd_image_psnr(cfg: RunConfig, out: Path, images: list[Path]) -> list[str]:
    """Compression PSNR with and without the zigzag permutation."""
    opts = _solver_options(cfg)
    rows = []
    for img_index, path in enumerate(images):
        full = _load_image(path)
        cropped = cfg.crop and (full.rows > cfg.crop or full.cols > cfg.crop)
        img = Signal2D(full.entries[:cfg.crop, :cfg.crop]) if cropped else full
        zz = zigzag_permutation(img.rows, img.cols)
        reference = Frame(img, 1)
        for ratio in cfg.ratios:
            for mode, perm in (("zigzag", zz), ("none", None)):
                code = encode_image(img, ratio, _rng.derive_key(cfg.seed, img_index), perm)
                decoded, rec = decode_image(code, opts, cfg.workers)
                value = psnr(reference, Frame(decoded, 1))
                converged = sum(r.converged for r in rec.column_results)
                rows.append((Path(path).name, img.rows, img.cols, int(cropped),
                             ratio, mode, code.k, value, converged))
    _write_csv(out / "image_psnr.csv",
               ["image", "rows", "cols", "desk_scale_crop", "ratio", "mode", "k",
                "psnr_db", "converged_columns"],
               rows)
    return ["image_psnr.csv"]


def cmd_video_psnr(cfg: RunConfig, out: Path, video: Path) -> list[str]:
    """Frame-pair codec over a ratio sweep: mean PSNRs plus decode seconds.

    Encoder and decoder communicate only through measurement files written
    under the output directory.
    """
    planes = read_yuv_luminance(video, cfg.video_width, cfg.video_height, cfg.frames)
    frames = [Frame.from_array(p.astype(np.float64), i + 1) for i, p in enumerate(planes)]
    opts = _solver_options(cfg)
    psnr_rows = []
    timing_rows = []
    for ratio in cfg.ratios:
        ratio_dir = out / "measurements" / f"ratio_{_fmt(ratio)}"
        ratio_dir.mkdir(parents=True, exist_ok=True)
        pairs = encode_sequence(frames, ratio, cfg.seed, cfg.split)
        for pair in pairs:
            write_measurements(ratio_dir / f"frame_{pair.ref.frame_index:03d}.pcm", pair.ref)
            write_measurements(ratio_dir / f"frame_{pair.nonref.frame_index:03d}.pcm", pair.nonref)
        ref_values = []
        nonref_values = []
        elapsed = 0.0
        for pair in pairs:
            stored = pair.__class__(
                read_measurements(ratio_dir / f"frame_{pair.ref.frame_index:03d}.pcm"),
                read_measurements(ratio_dir / f"frame_{pair.nonref.frame_index:03d}.pcm"),
                pair.ratios,
            )
            start = time.perf_counter()
            dec_ref, dec_nonref = decode_pair(stored, opts, cfg.workers)
            elapsed += time.perf_counter() - start
            ref_values.append(psnr(frames[dec_ref.frame.index - 1], dec_ref.frame))
            nonref_values.append(psnr(frames[dec_nonref.frame.index - 1], dec_nonref.frame))
        psnr_rows.append((ratio, len(pairs),
                          float(np.mean(ref_values)), float(np.mean(nonref_values))))
        timing_rows.append((ratio, elapsed))
    _write_csv(out / "video_psnr.csv",
               ["ratio", "frame_pairs", "ref_psnr_mean", "nonref_psnr_mean"], psnr_rows)
    _write_csv(out / "video_timing.csv", ["ratio", "reconstruction_seconds"], timing_rows)
    return ["video_psnr.csv", "video_timing.csv"]


def cmd_layer_fit(cfg: RunConfig, out: Path, image: Path) -> list[str]:
    """Per-layer occupancy of a thresholded DCT support vs the model curve."""
    img = _load_image(image)
    params = LayerModelParams(cfg.fit_r0, cfg.fit_r1, cfg.fit_r2, cfg.fit_alpha,
                              img.shape, cfg.convention)
    sup = threshold_support(dct2(img), cfg.fit_threshold)
    empirical = empirical_layer_profile(sup)
    model = layer_probabilities(params)
    sizes = layer_sizes(img.rows, img.cols)
    rows = [(m + 1, int(sizes[m]), empirical[m], model[m]) for m in range(empirical.size)]
    _write_csv(out / "layer_fit.csv",
               ["layer", "layer_size", "empirical_p", "model_p"], rows)
    return ["layer_fit.csv"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parcs", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None, help="run seed (mandatory here or in the config)")
        p.add_argument("--workers", type=int, default=None, help="column-reconstruction worker threads")
        p.add_argument("--out", type=Path, required=True, help="output directory")

    common(sub.add_parser("bound-surface", help="bound vs Monte Carlo over a model grid"))
    p = sub.add_parser("perm-table", help="worst column counts before/after zigzag")
    common(p)
    p.add_argument("images", nargs="+", type=Path)
    p = sub.add_parser("image-psnr", help="compression PSNR with/without permutation")
    common(p)
    p.add_argument("images", nargs="+", type=Path)
    p = sub.add_parser("video-psnr", help="frame-pair codec PSNR/timing over ratios")
    common(p)
    p.add_argument("video", type=Path)
    p = sub.add_parser("layer-fit", help="empirical layer occupancy vs model curve")
    common(p)
    p.add_argument("image", type=Path)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed, workers=args.workers)
        out = args.out
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "bound-surface":
            inputs, outputs = [], cmd_bound_surface(cfg, out)
        elif args.command == "perm-table":
            inputs, outputs = args.images, cmd_perm_table(cfg, out, args.images)
        elif args.command == "image-psnr":
            inputs, outputs = args.images, cmd_image_psnr(cfg, out, args.images)
        elif args.command == "video-psnr":
            inputs, outputs = [args.video], cmd_video_psnr(cfg, out, args.video)
        else:
            inputs, outputs = [args.image], cmd_layer_fit(cfg, out, args.image)
        _write_manifest(out, args.command, cfg, inputs, outputs)
    except ConfigError as exc:
        print(f"parcs: config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"parcs: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
