"""Command-line front end: carve, forge, dataset, eval.

Exit status: 0 on success, 1 on runtime failure, 2 on usage errors. All
flags are validated before anything is written.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import carver, dataset, forgery, metrics
from .raster import PixelMask, decode_image, decode_seam_mask, encode_image, encode_seam_mask


def _load_image(path: str):
    return decode_image(Path(path).read_bytes(), allow_lossy=True)


def _load_pixel_mask(path: str, kind: str) -> PixelMask:
    """Any image file works as a mask: nonzero (any channel) means set."""
    img = _load_image(path)
    return PixelMask(img.samples.sum(axis=2) > 0, kind=kind)


def _load_binary_grid(path: str) -> np.ndarray:
    img = _load_image(path)
    return img.samples.sum(axis=2) > 0


def _write_trajectories(result: forgery.ForgeryResult, path: Path) -> None:
    record = {
        "height": result.gt.height,
        "width": result.gt.width,
        "orientation": result.seams_removed[0].orientation if result.seams_removed else "vertical",
        "removed": [s.columns.tolist() for s in result.seams_removed],
        "inserted": [s.columns.tolist() for s in result.seams_inserted],
    }
    path.write_text(json.dumps(record) + "\n", encoding="utf-8")


def _cmd_carve(args) -> int:
    image = _load_image(args.input)
    k = math.floor(args.ratio * image.width + 0.5)
    if k < 1:
        raise ValueError(f"ratio {args.ratio} selects no seams at width {image.width}")
    removal = _load_pixel_mask(args.removal_mask, "removal") if args.removal_mask else None
    protective = _load_pixel_mask(args.protective_mask, "protective") if args.protective_mask else None
    if args.grow:
        out, _ = carver.insert_k_seams(image, k, args.variant, protective_mask=protective)
    else:
        out, _, _ = carver.remove_k_seams(
            image, k, args.variant, removal_mask=removal, protective_mask=protective
        )
    Path(args.out).write_bytes(encode_image(out))
    print(f"wrote {args.out} ({out.width}x{out.height})")
    return 0


def _cmd_forge(args) -> int:
    image = _load_image(args.input)
    if args.kind == "retarget":
        if args.ratio is None:
            raise ValueError("--kind retarget requires --ratio")
        result = forgery.retarget_forgery(image, args.ratio, args.variant, seed=args.seed)
    elif args.kind == "object_removal":
        if not args.removal_mask:
            raise ValueError("--kind object_removal requires --removal-mask")
        result = forgery.object_removal_forgery(
            image,
            _load_pixel_mask(args.removal_mask, "removal"),
            _load_pixel_mask(args.protective_mask, "protective") if args.protective_mask else None,
            variant=args.variant,
            seed=args.seed,
        )
    else:
        if not args.object_mask:
            raise ValueError("--kind object_displacement requires --object-mask")
        if args.shift is None:
            raise ValueError("--kind object_displacement requires --shift")
        result = forgery.object_displacement_forgery(
            image,
            _load_pixel_mask(args.object_mask, "object"),
            direction=args.direction,
            shift=args.shift,
            variant=args.variant,
            seed=args.seed,
        )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    forged_path = out_dir / f"{stem}_forged.png"
    mask_path = out_dir / f"{stem}_mask.png"
    traj_path = out_dir / f"{stem}_trajectories.json"
    forged_path.write_bytes(encode_image(result.forged))
    mask_path.write_bytes(encode_seam_mask(result.gt))
    _write_trajectories(result, traj_path)
    print(f"wrote {forged_path}, {mask_path}, {traj_path}")
    return 0


def _cmd_dataset(args) -> int:
    splits = tuple(float(x) for x in args.splits.split(","))
    if len(splits) != 3:
        raise ValueError("--splits expects three comma-separated fractions")
    config = dataset.DatasetConfig(
        tile_size=args.tile_size,
        strategy="non_overlapping" if args.non_overlapping else "random",
        tiles_per_source=args.tiles_per_source,
        ratio=args.ratio,
        variant=args.variant,
        splits=splits,  # type: ignore[arg-type]
        post=tuple(dataset.PostProcess.parse(s) for s in args.post or ()),
        seed=args.seed,
        include_pristine=args.include_pristine,
        jobs=args.jobs,
    )
    manifest = dataset.generate_dataset(args.sources, args.out, config)
    ok = sum(1 for e in manifest.entries if "error" not in e)
    failed = len(manifest.entries) - ok
    print(f"wrote {ok} entries to {args.out} ({failed} failed)")
    return 0 if failed == 0 else 1


def _select_gt(path: str, layer: str) -> np.ndarray:
    data = Path(path).read_bytes()
    try:
        mask = decode_seam_mask(data)
    except ValueError:
        return _load_binary_grid(path)
    if layer == "removed":
        return mask.removed
    if layer == "inserted":
        return mask.inserted
    return mask.removed | mask.inserted


def _cmd_eval(args) -> int:
    pred = _load_binary_grid(args.pred)
    gt = _select_gt(args.gt, args.layer)
    if pred.shape != gt.shape:
        raise ValueError(f"prediction {pred.shape} and ground truth {gt.shape} differ in size")
    reports = [metrics.derive_metrics(metrics.confusion_plain(pred, gt))]
    if args.buffer > 0:
        counts = metrics.confusion_buffered(pred, gt, args.buffer)
        reports.append(metrics.derive_metrics(counts, buffered=True, p=args.buffer))
    sls_value = None
    if args.trajectories:
        record = json.loads(Path(args.trajectories).read_text(encoding="utf-8"))
        key = "removed" if args.layer == "removed" else ("inserted" if args.layer == "inserted" else None)
        seam_lists = record[key] if key else record["removed"] + record["inserted"]
        trajs = [metrics.SeamTrajectory(np.asarray(c), width=record["width"]) for c in seam_lists]
        if trajs:
            sls_value = metrics.sls_image(trajs, pred)
    if args.format == "records":
        for report in reports:
            for line in report.records():
                print(line)
        if sls_value is not None:
            print(f"sls={sls_value:.6f}")
    else:
        for report in reports:
            tag = f"buffered (p={report.p})" if report.buffered else "plain"
            print(f"[{tag}]")
            print(
                f"  accuracy={report.accuracy:.4f} precision={report.precision:.4f} "
                f"recall={report.recall:.4f} f1={report.f1:.4f} mcc={report.mcc:.4f}"
            )
        if sls_value is not None:
            print(f"[sls]\n  sls={sls_value:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seamforge",
        description="Seam-carving forgery synthesis and seam-localization evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--variant", choices=carver.VARIANTS, default="forward")
        p.add_argument("--seed", type=int, default=0)

    p_carve = sub.add_parser("carve", help="resize an image by removing or inserting seams")
    p_carve.add_argument("input")
    p_carve.add_argument("--out", required=True)
    p_carve.add_argument("--ratio", type=float, required=True, help="fraction of width to carve")
    p_carve.add_argument("--grow", action="store_true", help="insert seams instead of removing")
    p_carve.add_argument("--removal-mask")
    p_carve.add_argument("--protective-mask")
    add_common(p_carve)
    p_carve.set_defaults(func=_cmd_carve)

    p_forge = sub.add_parser("forge", help="apply a forgery recipe and write image + GT mask")
    p_forge.add_argument("input")
    p_forge.add_argument("--out", required=True, help="output directory")
    p_forge.add_argument(
        "--kind", required=True, choices=("retarget", "object_removal", "object_displacement")
    )
    p_forge.add_argument("--ratio", type=float)
    p_forge.add_argument("--removal-mask")
    p_forge.add_argument("--protective-mask")
    p_forge.add_argument("--object-mask")
    p_forge.add_argument("--direction", choices=forgery.DIRECTIONS, default="left")
    p_forge.add_argument("--shift", type=int)
    add_common(p_forge)
    p_forge.set_defaults(func=_cmd_forge)

    p_data = sub.add_parser("dataset", help="batch-generate a forgery dataset with manifest")
    p_data.add_argument("sources", help="directory of source images")
    p_data.add_argument("--out", required=True)
    p_data.add_argument("--tile-size", type=int, default=512)
    p_data.add_argument("--tiles-per-source", type=int, default=1)
    p_data.add_argument("--non-overlapping", action="store_true")
    p_data.add_argument("--ratio", type=float, default=0.10)
    p_data.add_argument("--splits", default="0.7,0.15,0.15")
    p_data.add_argument("--post", action="append", help="jpeg:<quality> or rotate:<degrees>")
    p_data.add_argument("--jobs", type=int, default=1)
    p_data.add_argument("--include-pristine", action="store_true")
    add_common(p_data)
    p_data.set_defaults(func=_cmd_dataset)

    p_eval = sub.add_parser("eval", help="score a prediction mask against ground truth")
    p_eval.add_argument("--pred", required=True)
    p_eval.add_argument("--gt", required=True)
    p_eval.add_argument("--buffer", type=int, default=1)
    p_eval.add_argument("--layer", choices=("removed", "inserted", "union"), default="union")
    p_eval.add_argument("--trajectories", help="trajectories JSON written by forge")
    p_eval.add_argument("--format", choices=("human", "records"), default="human")
    p_eval.set_defaults(func=_cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"seamforge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
