"""Batch pipeline: tiling, group-aware splits, forgery, post-processing and
manifest persistence.

Output layout is fixed: <out>/images, <out>/masks and a line-delimited
<out>/manifest with one JSON record per entry in a stable field order, so
reruns with identical inputs produce byte-identical trees. All randomness
flows from one 64-bit seed through numpy SeedSequence children keyed by
(source index, tile index), which makes results independent of the worker
count.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .forgery import retarget_forgery
from .raster import (
    RasterImage,
    SeamMask,
    TileRegion,
    crop,
    decode_image,
    encode_image,
    encode_jpeg,
    encode_seam_mask,
)

_IMAGE_SUFFIXES = (".png", ".tif", ".tiff", ".jpg", ".jpeg")


@dataclass(frozen=True)
class PostProcess:
    """One post-processing step: JPEG recompression or rotation."""

    kind: str
    quality: int | None = None
    degrees: float | None = None

    def __post_init__(self):
        if self.kind == "jpeg":
            if self.quality is None or not 1 <= self.quality <= 100:
                raise ValueError("jpeg quality must be in [1, 100]")
        elif self.kind == "rotate":
            if self.degrees is None or not 0 <= self.degrees < 360:
                raise ValueError("rotation degrees must be in [0, 360)")
        else:
            raise ValueError(f"unknown post-process kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "PostProcess":
        """Parse 'jpeg:<quality>' or 'rotate:<degrees>'."""
        kind, _, arg = text.partition(":")
        if kind == "jpeg":
            return cls(kind="jpeg", quality=int(arg))
        if kind == "rotate":
            return cls(kind="rotate", degrees=float(arg))
        raise ValueError(f"cannot parse post-process step {text!r}")

    def label(self) -> str:
        return f"jpeg:{self.quality}" if self.kind == "jpeg" else f"rotate:{self.degrees:g}"


def _rotate_array(arr: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate counterclockwise about the center, keeping the input shape.

    Multiples of 90 degrees are exact grid permutations (square grids only
    for odd multiples); everything else is bilinear with edge replication
    for the exposed corners.
    """
    deg = degrees % 360.0
    h, w = arr.shape[:2]
    if deg % 90.0 == 0.0:
        k = int(deg // 90)
        if k % 2 == 0 or h == w:
            return np.rot90(arr, k=k, axes=(0, 1)).copy()
    theta = np.deg2rad(deg)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    src_r = np.clip(cy + (rr - cy) * cos_t + (cc - cx) * sin_t, 0.0, h - 1.0)
    src_c = np.clip(cx + (cc - cx) * cos_t - (rr - cy) * sin_t, 0.0, w - 1.0)
    r0 = np.floor(src_r).astype(np.int64)
    c0 = np.floor(src_c).astype(np.int64)
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, w - 1)
    fr = (src_r - r0)[..., np.newaxis] if arr.ndim == 3 else src_r - r0
    fc = (src_c - c0)[..., np.newaxis] if arr.ndim == 3 else src_c - c0
    return (
        arr[r0, c0] * (1 - fr) * (1 - fc)
        + arr[r0, c1] * (1 - fr) * fc
        + arr[r1, c0] * fr * (1 - fc)
        + arr[r1, c1] * fr * fc
    )


def postprocess(image: RasterImage, chain: list[PostProcess]) -> RasterImage:
    """Apply the chain in order; an empty chain is the identity.

    JPEG steps re-encode through a baseline encoder at the given quality
    (rendering at 8-bit depth); rotations resample per _rotate_array.
    """
    out = image
    for step in chain:
        if step.kind == "jpeg":
            out = decode_image(encode_jpeg(out, step.quality), allow_lossy=True)
        else:
            out = RasterImage(_rotate_array(out.samples, step.degrees), bit_depth=out.bit_depth)
    return out


def postprocess_mask(mask: SeamMask, chain: list[PostProcess]) -> SeamMask:
    """Keep ground truth aligned with geometric post-processing.

    Rotations move the seam locations, so the layers rotate with the image
    (thresholded at 0.5 off the resampled grid; approximate away from
    right angles). JPEG steps leave the mask untouched.
    """
    removed = mask.removed.astype(np.float64)
    inserted = mask.inserted.astype(np.float64)
    for step in chain:
        if step.kind == "rotate":
            removed = _rotate_array(removed, step.degrees)
            inserted = _rotate_array(inserted, step.degrees)
    return SeamMask(removed=removed >= 0.5, inserted=inserted >= 0.5)


def extract_tiles(
    image: RasterImage,
    size: int,
    strategy: str = "non_overlapping",
    n: int | None = None,
    seed: int = 0,
) -> list[TileRegion]:
    """Tile origins: seeded uniform draws, or a row-major exhaustive grid."""
    if size > min(image.height, image.width):
        raise ValueError(f"tile size {size} exceeds image {image.height}x{image.width}")
    if strategy == "non_overlapping":
        return [
            TileRegion(origin_row=r, origin_col=c, size=size)
            for r in range(0, image.height - size + 1, size)
            for c in range(0, image.width - size + 1, size)
        ]
    if strategy == "random":
        if n is None or n < 1:
            raise ValueError("random tiling needs n >= 1")
        rng = np.random.default_rng(seed)
        origins = rng.integers(0, (image.height - size + 1, image.width - size + 1), size=(n, 2))
        return [TileRegion(origin_row=int(r), origin_col=int(c), size=size) for r, c in origins]
    raise ValueError(f"unknown tiling strategy {strategy!r}")


def assign_splits(
    groups: list[str],
    ratios: tuple[float, float, float] = (0.7, 0.15, 0.15),
    seed: int = 0,
) -> dict[str, str]:
    """Shuffle groups with a seeded generator and partition by cumulative
    ratio; every member of a group lands in the same split."""
    if not groups:
        raise ValueError("no groups to split")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    order = sorted(set(groups))
    rng = np.random.default_rng(seed)
    rng.shuffle(order)
    n = len(order)
    c1 = round(n * ratios[0])
    c2 = round(n * (ratios[0] + ratios[1]))
    mapping: dict[str, str] = {}
    for i, g in enumerate(order):
        mapping[g] = "train" if i < c1 else ("val" if i < c2 else "test")
    return mapping


@dataclass(frozen=True)
class DatasetConfig:
    tile_size: int = 512
    strategy: str = "random"
    tiles_per_source: int = 1
    ratio: float = 0.10
    variant: str = "forward"
    splits: tuple[float, float, float] = (0.7, 0.15, 0.15)
    post: tuple[PostProcess, ...] = ()
    seed: int = 0
    include_pristine: bool = False
    jobs: int = 1


@dataclass
class DatasetManifest:
    entries: list[dict] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e) + "\n" for e in self.entries)

    def write(self, path: Path) -> None:
        path.write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def read(cls, path: Path) -> "DatasetManifest":
        lines = path.read_text(encoding="utf-8").splitlines()
        return cls(entries=[json.loads(line) for line in lines if line])


def _tile_seed(master: int, source_index: int, tile_index: int) -> int:
    seq = np.random.SeedSequence([master, source_index, tile_index])
    return int(seq.generate_state(1, np.uint64)[0])


def _process_source(args: tuple) -> list[dict]:
    src_index, source_id, path, split, out_dir, config = args
    out_dir = Path(out_dir)
    entries: list[dict] = []
    try:
        image = decode_image(Path(path).read_bytes(), allow_lossy=True)
        tiles = extract_tiles(
            image,
            config.tile_size,
            strategy=config.strategy,
            n=config.tiles_per_source if config.strategy == "random" else None,
            seed=_tile_seed(config.seed, src_index, 0),
        )
    except Exception as exc:
        return [{"source": source_id, "error": str(exc)}]

    chain = list(config.post)
    for tile_index, region in enumerate(tiles):
        stem = f"{source_id}_t{tile_index:03d}"
        entry = {
            "source": source_id,
            "tile": {"row": region.origin_row, "col": region.origin_col, "size": region.size},
            "split": split,
        }
        try:
            tile = crop(image, region)
            seed = _tile_seed(config.seed, src_index, tile_index + 1)
            result = retarget_forgery(tile, config.ratio, config.variant, seed=seed)
            image_path = _write_processed(result.forged, chain, out_dir / "images" / stem)
            mask = postprocess_mask(result.gt, chain)
            mask_path = out_dir / "masks" / f"{stem}_mask.png"
            mask_path.write_bytes(encode_seam_mask(mask))
            entry.update(
                {
                    "recipe": result.recipe.to_record(),
                    "image": str(image_path.relative_to(out_dir)),
                    "mask": str(mask_path.relative_to(out_dir)),
                    "post": [s.label() for s in chain],
                    "seed": seed,
                }
            )
            if config.include_pristine:
                p_path = _write_processed(tile, chain, out_dir / "images" / f"{stem}_pristine")
                entries.append(
                    {
                        "source": source_id,
                        "tile": entry["tile"],
                        "split": split,
                        "recipe": "pristine",
                        "image": str(p_path.relative_to(out_dir)),
                        "mask": None,
                        "post": [s.label() for s in chain],
                        "seed": seed,
                    }
                )
        except Exception as exc:
            entry["error"] = str(exc)
        entries.append(entry)
    return entries


def _write_processed(image: RasterImage, chain: list[PostProcess], stem_path: Path) -> Path:
    """Apply the chain and persist; a trailing JPEG step is stored as the
    actual baseline bitstream, everything else as lossless PNG."""
    if chain and chain[-1].kind == "jpeg":
        staged = postprocess(image, chain[:-1])
        data = encode_jpeg(staged, chain[-1].quality)
        path = stem_path.with_name(stem_path.name + ".jpg")
        path.write_bytes(data)
        return path
    final = postprocess(image, chain)
    path = stem_path.with_name(stem_path.name + ".png")
    path.write_bytes(encode_image(final))
    return path


def generate_dataset(sources: Path | str, out_dir: Path | str, config: DatasetConfig) -> DatasetManifest:
    """Forge every tile of every source image and persist the results.

    Fully reproducible from (sources, config): reruns and different worker
    counts yield byte-identical manifests and tiles. Per-entry failures are
    recorded in the manifest and do not stop the pipeline.
    """
    sources = Path(sources)
    out_dir = Path(out_dir)
    paths = sorted(p for p in sources.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "masks").mkdir(parents=True, exist_ok=True)

    manifest = DatasetManifest()
    if not paths:
        warnings.warn(f"no source images found under {sources}")
        manifest.write(out_dir / "manifest")
        return manifest

    split_of = assign_splits([p.stem for p in paths], config.splits, seed=config.seed)
    tasks = [
        (i, p.stem, str(p), split_of[p.stem], str(out_dir), config)
        for i, p in enumerate(paths)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_process_source, tasks))
    else:
        results = [_process_source(t) for t in tasks]
    for chunk in results:
        manifest.entries.extend(chunk)
    manifest.write(out_dir / "manifest")
    return manifest
