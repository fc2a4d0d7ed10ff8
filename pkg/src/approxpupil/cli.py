"""Command-line entry point: ``run``, ``compare``, ``characterize`` and ``synth``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import report as rpt
from .bitlevel import AdderConfig, CellKind
from .characterization import characterize_adder, cost_model
from .errors import (
    ApproxPupilError,
    ConfigurationError,
    ImageSizeError,
    NoPupilError,
    PGMParseError,
    RangeError,
)
from .metrics import psnr, ssim
from .pgm import read_pgm, write_pgm
from .pipeline import STAGES, PipelineConfig, Variant, run_pipeline
from .synth import EyeSpec, corpus_specs, generate_eye

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CONFIG = 4
EXIT_NO_PUPIL = 5

GROUND_TRUTH_FILE = "ground_truth.csv"
GROUND_TRUTH_COLUMNS = ["file", "seed", "cx", "cy", "r"]
# Stage boundaries compared between variants; binary rasters are scaled to 0/255.
COMPARED_STAGES = ("smoothed", "edge_map_e1", "pupil_mask", "edge_map_e2", "edge_map")
_BINARY_STAGES = {"edge_map_e1", "pupil_mask", "edge_map_e2", "edge_map"}


class UsageError(ApproxPupilError):
    pass


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, PGMParseError):
        return EXIT_PARSE
    if isinstance(exc, NoPupilError):
        return EXIT_NO_PUPIL
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, (ConfigurationError, ImageSizeError, RangeError)):
        return EXIT_CONFIG
    return 1


# -- shared helpers -----------------------------------------------------------

def collect_inputs(paths: list[str]) -> list[Path]:
    if not paths:
        raise UsageError("no input images given")
    files = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.pgm")))
        else:
            files.append(p)
    if not files:
        raise UsageError("input directories contain no .pgm files")
    return files


def load_ground_truth(path: Path) -> dict[str, dict]:
    with open(path, newline="") as f:
        return {row["file"]: {"seed": int(row["seed"]), "cx": float(row["cx"]),
                              "cy": float(row["cy"]), "r": float(row["r"])}
                for row in csv.DictReader(f)}


def ground_truth_for(files: list[Path], explicit: str | None) -> dict[Path, dict]:
    tables: dict[Path, dict] = {}
    out = {}
    for f in files:
        table_path = Path(explicit) if explicit else f.parent / GROUND_TRUTH_FILE
        if table_path not in tables:
            tables[table_path] = load_ground_truth(table_path) if table_path.exists() else {}
        if f.name in tables[table_path]:
            out[f] = tables[table_path][f.name]
    return out


def config_from_args(args, variant: str | None = None) -> PipelineConfig:
    variant = variant or args.variant
    if variant == Variant.EXACT.value:
        return PipelineConfig.exact(args.threshold_intensity, args.threshold_gradient)
    return PipelineConfig.approximate(
        gauss_approx_bits=args.gauss_approx_bits,
        gauss_cell=CellKind(args.gauss_cell),
        prewitt_approx_bits=args.prewitt_approx_bits,
        intensity=args.threshold_intensity,
        gradient=args.threshold_gradient,
        ignore_lsbs_intensity=args.ignore_lsbs_intensity,
        ignore_lsbs_gradient=args.ignore_lsbs_gradient,
    )


def _us(seconds: float) -> int:
    return int(round(seconds * 1e6))


def _emit(args, report: dict, columns=None):
    text = rpt.write_report(args.report, report, columns)
    if args.report is None:
        print(text)


def _stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return {"mean": None, "min": None, "max": None}
    return {"mean": float(np.mean(vals)), "min": min(vals), "max": max(vals)}


def _fraction(flags):
    flags = [f for f in flags if f is not None]
    return sum(flags) / len(flags) if flags else None


# -- run ----------------------------------------------------------------------

def _run_one(task):
    path, cfg, out_dir = task
    row = {"input": str(path), "status": "ok"}
    img = read_pgm(path)
    try:
        res = run_pipeline(img, cfg)
    except NoPupilError as exc:
        row.update(status="no_pupil", error=str(exc))
        return row
    stem = path.stem
    write_pgm(out_dir / f"{stem}_edges.pgm", res.edge_map * 255)
    write_pgm(out_dir / f"{stem}_mask.pgm", res.pupil_mask * 255)
    write_pgm(out_dir / f"{stem}_overlay.pgm", overlay(res.stages["smoothed"], res.edge_map,
                                                       res.center))
    row.update(cx=res.center[0], cy=res.center[1], radius=res.radius,
               edge_pixels=int(res.edge_map.sum()), mask_pixels=int(res.pupil_mask.sum()))
    row.update({f"{s}_us": _us(t) for s, t in res.stage_timings.items()})
    return row


def overlay(smoothed, edge_map, center) -> np.ndarray:
    """Smoothed image with the edge map burned in white and the center as a black cross."""
    out = np.array(smoothed, dtype=np.uint8)
    out[np.asarray(edge_map) != 0] = 255
    h, w = out.shape
    x, y = int(round(center[0])), int(round(center[1]))
    for dx, dy in ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)):
        if 0 <= x + dx < w and 0 <= y + dy < h:
            out[y + dy, x + dx] = 0
    return out


def _map(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))  # preserves input order
    return [fn(t) for t in tasks]


def cmd_run(args) -> int:
    files = collect_inputs(args.inputs)
    cfg = config_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    truth = ground_truth_for(files, args.ground_truth)
    rows = _map(_run_one, [(f, cfg, out_dir) for f in files], args.jobs)
    for f, row in zip(files, rows):
        row["seed"] = truth.get(f, {}).get("seed", args.seed)
        row["config_fingerprint"] = cfg.fingerprint()
    ok = [r for r in rows if r["status"] == "ok"]
    aggregates = {
        "images": len(rows),
        "pupils_found": len(ok),
        "radius": _stats([r["radius"] for r in ok]),
    }
    columns = (["schema_version", "input", "seed", "status", "cx", "cy", "radius",
                "edge_pixels", "mask_pixels"] + [f"{s}_us" for s in STAGES]
               + ["config_fingerprint"])
    _emit(args, rpt.build_report("run", cfg.as_dict(), rows, aggregates), columns)
    return EXIT_NO_PUPIL if len(ok) < len(rows) else EXIT_OK


# -- compare ------------------------------------------------------------------

def _compare_one(task):
    path, ref_cfg, cand_cfg, truth = task
    img = read_pgm(path)
    row = {"input": str(path), "seed": truth.get("seed") if truth else None, "status": "ok"}
    try:
        ref = run_pipeline(img, ref_cfg)
        cand = run_pipeline(img, cand_cfg)
    except NoPupilError as exc:
        row.update(status="no_pupil", error=str(exc))
        return row
    for stage in COMPARED_STAGES:
        a, b = ref.stages[stage], cand.stages[stage]
        if stage in _BINARY_STAGES:
            a, b = a * 255, b * 255
        row[f"psnr_{stage}"] = psnr(a, b)
        row[f"ssim_{stage}"] = ssim(a, b)
    row["psnr_db"] = row["psnr_smoothed"]
    row["ssim"] = row["ssim_smoothed"]
    row.update(exact_cx=ref.center[0], exact_cy=ref.center[1], exact_r=ref.radius,
               approx_cx=cand.center[0], approx_cy=cand.center[1], approx_r=cand.radius)
    row["center_delta_px"] = math.dist(ref.center, cand.center)
    if truth:
        row.update(gt_cx=truth["cx"], gt_cy=truth["cy"], gt_r=truth["r"])
        row["exact_center_error_px"] = math.dist(ref.center, (truth["cx"], truth["cy"]))
        row["exact_radius_error_rel"] = abs(ref.radius - truth["r"]) / truth["r"]
        row["approx_center_error_px"] = math.dist(cand.center, (truth["cx"], truth["cy"]))
        row["approx_radius_error_rel"] = abs(cand.radius - truth["r"]) / truth["r"]
    row.update({f"exact_{s}_us": _us(t) for s, t in ref.stage_timings.items()})
    row.update({f"approx_{s}_us": _us(t) for s, t in cand.stage_timings.items()})
    return row


def compare_columns() -> list[str]:
    cols = ["schema_version", "input", "seed", "status", "psnr_db", "ssim"]
    for s in COMPARED_STAGES:
        cols += [f"psnr_{s}", f"ssim_{s}"]
    cols += ["exact_cx", "exact_cy", "exact_r", "approx_cx", "approx_cy", "approx_r",
             "center_delta_px", "gt_cx", "gt_cy", "gt_r", "exact_center_error_px",
             "exact_radius_error_rel", "approx_center_error_px", "approx_radius_error_rel"]
    cols += [f"{v}_{s}_us" for v in ("exact", "approx") for s in STAGES]
    return cols + ["config_fingerprint"]


def compare_aggregates(rows: list[dict], center_tol=2.0, radius_tol=0.10) -> dict:
    ok = [r for r in rows if r["status"] == "ok"]
    agg = {"images": len(rows), "compared": len(ok)}
    for s in COMPARED_STAGES:
        agg[f"psnr_{s}"] = _stats([r[f"psnr_{s}"] for r in ok])
        agg[f"ssim_{s}"] = _stats([r[f"ssim_{s}"] for r in ok])
    agg["psnr_db"] = agg["psnr_smoothed"]
    agg["ssim"] = agg["ssim_smoothed"]
    agg["center_delta_px"] = _stats([r["center_delta_px"] for r in ok])
    agg["approx_center_within_tol"] = _fraction(
        [r["center_delta_px"] <= center_tol for r in ok])
    with_gt = [r for r in ok if "gt_r" in r]
    if with_gt:
        agg["exact_center_error_px"] = _stats([r["exact_center_error_px"] for r in with_gt])
        agg["exact_radius_error_rel"] = _stats([r["exact_radius_error_rel"] for r in with_gt])
        agg["exact_localized_within_tol"] = _fraction(
            [r["exact_center_error_px"] <= center_tol and r["exact_radius_error_rel"] <= radius_tol
             for r in with_gt])
    agg["tolerances"] = {"center_px": center_tol, "radius_rel": radius_tol}
    return agg


def cmd_compare(args) -> int:
    files = collect_inputs(args.inputs)
    ref_cfg = PipelineConfig.exact(args.threshold_intensity, args.threshold_gradient)
    cand_cfg = config_from_args(args)
    truth = ground_truth_for(files, args.ground_truth)
    rows = _map(_compare_one, [(f, ref_cfg, cand_cfg, truth.get(f)) for f in files], args.jobs)
    for row in rows:
        row["config_fingerprint"] = cand_cfg.fingerprint()
    ok = sum(r["status"] == "ok" for r in rows)
    cost = {
        "gaussian": cost_model(cand_cfg.gaussian_cfg, cand_cfg.intensity_threshold.word_width,
                               cand_cfg.intensity_threshold.ignored_lsbs).as_dict(),
        "prewitt": cost_model(cand_cfg.prewitt_cfg, cand_cfg.gradient_threshold.word_width,
                              cand_cfg.gradient_threshold.ignored_lsbs).as_dict(),
    }
    config = {"reference": ref_cfg.as_dict(), "candidate": cand_cfg.as_dict()}
    report = rpt.build_report("compare", config, rows, compare_aggregates(rows), cost=cost,
                              published_reference=rpt.PUBLISHED_REFERENCE)
    _emit(args, report, compare_columns())
    return EXIT_NO_PUPIL if ok < len(rows) else EXIT_OK


# -- characterize -------------------------------------------------------------

def cmd_characterize(args) -> int:
    kind = CellKind(args.cell)
    bits = 0 if kind is CellKind.EXACT else args.approx_bits
    cfg = AdderConfig.build(args.width, bits, kind if bits else CellKind.APPROX_LOA)
    stats = characterize_adder(cfg, args.discard_lsbs)
    comparator_width = args.comparator_width or args.width
    cost = cost_model(cfg, comparator_width, args.ignore_lsbs)
    row = {**stats.as_dict(), **cost.as_dict()}
    report = rpt.build_report("characterize", {"adder": cfg.describe(),
                                                "comparator_width": comparator_width,
                                                "ignore_lsbs": args.ignore_lsbs},
                              [row], {})
    if args.report is None and args.format == "csv":
        sys.stdout.write(rpt.to_csv([row]))
    else:
        _emit(args, report)
    return EXIT_OK


# -- synth --------------------------------------------------------------------

def cmd_synth(args) -> int:
    base = EyeSpec(width=args.size, height=args.size, noise_sigma=args.noise,
                   eyelid_fraction=args.eyelid, highlight_count=args.highlights)
    if args.pupil_radius is not None or args.iris_radius is not None:
        # fixed geometry; only the per-image seed varies
        base = replace(base, pupil_center=(args.size / 2, args.size / 2),
                       pupil_radius=args.pupil_radius or base.pupil_radius,
                       iris_radius=args.iris_radius or base.iris_radius)
        base.validate()
        rng = np.random.default_rng(args.seed)
        specs = [replace(base, seed=int(rng.integers(0, 2 ** 63))) for _ in range(args.count)]
    else:
        specs = corpus_specs(args.count, args.seed, base)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    digits = max(3, len(str(max(args.count - 1, 0))))
    with open(out / GROUND_TRUTH_FILE, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(GROUND_TRUTH_COLUMNS)
        for i, spec in enumerate(specs):
            img, gt = generate_eye(spec)
            name = f"eye_{i:0{digits}d}.pgm"
            write_pgm(out / name, img)
            writer.writerow([name, spec.seed, gt.cx, gt.cy, gt.radius])
    log.info("wrote %d images to %s", len(specs), out)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

def _pipeline_flags(p: argparse.ArgumentParser):
    p.add_argument("inputs", nargs="*", help="PGM files or directories of .pgm files")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="approx")
    p.add_argument("--gauss-approx-bits", type=int, default=5)
    p.add_argument("--gauss-cell", choices=["carryonly", "loa"], default="loa")
    p.add_argument("--prewitt-approx-bits", type=int, default=5)
    p.add_argument("--threshold-intensity", type=int, default=96)
    p.add_argument("--threshold-gradient", type=int, default=128)
    p.add_argument("--ignore-lsbs-intensity", type=int, default=5)
    p.add_argument("--ignore-lsbs-gradient", type=int, default=7)
    p.add_argument("--ground-truth", help=f"ground-truth CSV (default: {GROUND_TRUTH_FILE} "
                                          "next to each input)")
    p.add_argument("--report", help="report path; .csv for CSV, otherwise JSON (default stdout)")
    p.add_argument("--seed", type=int, default=None, help="seed recorded for inputs without one")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approxpupil", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="segment pupils and write edge map, mask and overlay PGMs")
    _pipeline_flags(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="exact vs approximate variant, PSNR/SSIM per stage")
    _pipeline_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("characterize", help="exhaustive adder error statistics and cost proxies")
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--cell", choices=[k.value for k in CellKind], default="loa")
    p.add_argument("--approx-bits", type=int, default=5)
    p.add_argument("--discard-lsbs", type=int, default=0,
                   help="ignore this many result LSBs when measuring error")
    p.add_argument("--comparator-width", type=int, default=None)
    p.add_argument("--ignore-lsbs", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--report")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("synth", help="generate a synthetic eye corpus with ground truth")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--noise", type=float, default=5.0)
    p.add_argument("--eyelid", type=float, default=0.0)
    p.add_argument("--highlights", type=int, default=0)
    p.add_argument("--pupil-radius", type=float, default=None)
    p.add_argument("--iris-radius", type=float, default=None)
    p.add_argument("--out", default="corpus")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ApproxPupilError as exc:
        print(f"approxpupil: error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except OSError as exc:
        print(f"approxpupil: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
