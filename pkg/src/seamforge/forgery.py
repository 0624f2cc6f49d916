"""Forgery recipes: ratio retargeting, object removal, object displacement.

Every recipe preserves the input dimensions (seams removed are later
reinserted) and returns the forged image together with its pixel-exact
ground-truth seam mask and per-seam trajectories in final-image coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .carver import (
    NO_TOKEN,
    CarvingSession,
    InsertionEvent,
    MergeEvent,
    ProvenanceGrid,
    RemovalEvent,
    Seam,
    VARIANTS,
    transpose_for_horizontal,
)
from .raster import PixelMask, RasterImage, SeamMask

DIRECTIONS = ("left", "right", "up", "down")


class InfeasibleForgeryError(ValueError):
    """The requested edit cannot be realized on this image/mask geometry."""


@dataclass(frozen=True)
class ForgeryRecipe:
    """Parameters of one forgery; masks are carried for provenance only."""

    kind: str
    variant: str = "forward"
    ratio: float | None = None
    direction: str | None = None
    shift: int | None = None
    seed: int = 0
    masks: tuple[PixelMask, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in ("retarget", "object_removal", "object_displacement"):
            raise ValueError(f"unknown forgery kind {self.kind!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.kind == "retarget":
            if self.ratio is None or not 0.0 < self.ratio <= 0.5:
                raise ValueError("retarget ratio must lie in (0, 0.5]")
        if self.kind == "object_displacement":
            if self.shift is None or self.shift < 1:
                raise ValueError("displacement shift must be >= 1")
            if self.direction not in DIRECTIONS:
                raise ValueError(f"displacement direction must be one of {DIRECTIONS}")
            if not any(m.kind == "object" for m in self.masks):
                raise ValueError("displacement requires an object mask")

    def to_record(self) -> dict:
        """Scalar fields for manifest serialization (mask grids excluded)."""
        rec: dict = {"kind": self.kind, "variant": self.variant}
        if self.ratio is not None:
            rec["ratio"] = self.ratio
        if self.direction is not None:
            rec["direction"] = self.direction
        if self.shift is not None:
            rec["shift"] = self.shift
        rec["seed"] = self.seed
        return rec


@dataclass(frozen=True)
class ForgeryResult:
    """Forged image, its ground truth, and final-coordinate seam trajectories.

    provenance maps every forged pixel back to the input image (or marks it
    synthesized), which is what makes postconditions like "no masked pixel
    survives" and "the object moved by exactly shift" directly checkable.
    """

    forged: RasterImage
    gt: SeamMask
    seams_removed: list[Seam]
    seams_inserted: list[Seam]
    recipe: ForgeryRecipe
    provenance: ProvenanceGrid


def build_gt_masks(prov: ProvenanceGrid, events) -> SeamMask:
    """Ground-truth seam layers from provenance plus the edit log.

    The removed layer marks every surviving pixel that was the immediate
    left/right neighbor of a removed pixel at its moment of removal (and the
    synthesized output pixels of merge events); the inserted layer marks all
    surviving inserted-seam pixels. Both are in final-image coordinates.
    """
    h, w = prov.tokens.shape
    removed = np.zeros((h, w), dtype=bool)
    inserted = np.zeros((h, w), dtype=bool)

    flat = prov.tokens.ravel()
    order = np.argsort(flat)
    sorted_tokens = flat[order]
    if len(sorted_tokens) > 1 and (np.diff(sorted_tokens) == 0).any():
        raise ValueError("inconsistent provenance: duplicate tokens")

    def mark(layer: np.ndarray, tokens: np.ndarray) -> None:
        tokens = tokens[tokens != NO_TOKEN]
        if tokens.size == 0:
            return
        idx = np.searchsorted(sorted_tokens, tokens)
        idx = np.minimum(idx, len(sorted_tokens) - 1)
        alive = sorted_tokens[idx] == tokens
        pos = order[idx[alive]]
        layer[pos // w, pos % w] = True

    for ev in events:
        if isinstance(ev, RemovalEvent):
            mark(removed, ev.left_tokens)
            mark(removed, ev.right_tokens)
        elif isinstance(ev, InsertionEvent):
            n = len(ev.trajectory)
            mark(inserted, -(1 + ev.synth_base + np.arange(n, dtype=np.int64)))
        elif isinstance(ev, MergeEvent):
            n = len(ev.trajectory)
            mark(removed, -(1 + ev.synth_base + np.arange(n, dtype=np.int64)))
        else:
            raise ValueError(f"unknown event type {type(ev).__name__}")
    return SeamMask(removed=removed, inserted=inserted)


def _finalize(session: CarvingSession, recipe: ForgeryRecipe, origin: RasterImage) -> ForgeryResult:
    forged = session.image
    if (forged.height, forged.width) != (origin.height, origin.width):
        raise InfeasibleForgeryError(
            f"forgery changed dimensions: {origin.height}x{origin.width} -> "
            f"{forged.height}x{forged.width}"
        )
    gt = build_gt_masks(session.provenance, session.events)
    seams_removed = [
        Seam(columns=ev.trajectory.copy())
        for ev in session.events
        if isinstance(ev, (RemovalEvent, MergeEvent))
    ]
    seams_inserted = [
        Seam(columns=ev.trajectory.copy())
        for ev in session.events
        if isinstance(ev, InsertionEvent)
    ]
    return ForgeryResult(
        forged=forged,
        gt=gt,
        seams_removed=seams_removed,
        seams_inserted=seams_inserted,
        recipe=recipe,
        provenance=session.provenance,
    )


def retarget_forgery(
    image: RasterImage,
    ratio: float,
    variant: str = "forward",
    seed: int = 0,
) -> ForgeryResult:
    """Remove round(ratio * width) optimal seams, then reinsert as many.

    Ties in the rounding go half away from zero. The output has the input's
    exact dimensions; the ground truth covers the full edit history.
    """
    recipe = ForgeryRecipe(kind="retarget", variant=variant, ratio=ratio, seed=seed)
    k = math.floor(ratio * image.width + 0.5)
    if k < 1:
        raise InfeasibleForgeryError(f"ratio {ratio} removes no seams at width {image.width}")
    session = CarvingSession(image)
    session.carve_remove(k, variant)
    session.carve_insert(k, variant)
    return _finalize(session, recipe, image)


def object_removal_forgery(
    image: RasterImage,
    removal_mask: PixelMask,
    protective_mask: PixelMask | None = None,
    variant: str = "forward",
    seed: int = 0,
) -> ForgeryResult:
    """Carve seams through the masked object until none of it survives.

    Seams are attracted through the removal mask (LOW_BIAS) and repelled
    from the protective mask (HIGH_BIAS); the same number of seams is then
    reinserted with the protective mask still active. Mask membership is
    tracked through provenance, not by warping the mask.
    """
    _check_mask_dims(image, removal_mask, "removal")
    if protective_mask is not None:
        _check_mask_dims(image, protective_mask, "protective")
        if (removal_mask.bits & protective_mask.bits).any():
            raise ValueError("removal and protective masks overlap")
    recipe = ForgeryRecipe(
        kind="object_removal",
        variant=variant,
        seed=seed,
        masks=tuple(m for m in (removal_mask, protective_mask) if m is not None),
    )
    session = CarvingSession(image)
    removals = 0
    remaining = session.mask_pixels_remaining(removal_mask)
    while remaining > 0:
        if session.width < 2 or removals >= image.width - 1:
            raise InfeasibleForgeryError("image width exhausted before mask was removed")
        seam = session.find_seam(variant, removal_mask=removal_mask, protective_mask=protective_mask)
        if variant == "merge":
            session.merge(seam)
        else:
            session.remove(seam)
        removals += 1
        now = session.mask_pixels_remaining(removal_mask)
        if now >= remaining:
            raise InfeasibleForgeryError("no progress removing masked pixels (mask blocked?)")
        remaining = now
    session.carve_insert(removals, variant, protective_mask=protective_mask)
    return _finalize(session, recipe, image)


def object_displacement_forgery(
    image: RasterImage,
    object_mask: PixelMask,
    direction: str,
    shift: int,
    variant: str = "forward",
    seed: int = 0,
) -> ForgeryResult:
    """Shift the masked object by removing seams on one side and inserting
    on the other.

    The removal side gets a full-height LOW_BIAS corridor between the
    object's bounding box and the image border; the object itself carries
    HIGH_BIAS in both phases, so its pixels survive bit-identically with a
    uniform coordinate offset of exactly +-shift.
    """
    _check_mask_dims(image, object_mask, "object")
    recipe = ForgeryRecipe(
        kind="object_displacement",
        variant=variant,
        direction=direction,
        shift=shift,
        seed=seed,
        masks=(PixelMask(object_mask.bits, kind="object"),),
    )
    if not object_mask.bits.any():
        raise InfeasibleForgeryError("object mask is empty")
    if shift < 1:
        raise InfeasibleForgeryError("shift must be >= 1")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")

    if direction in ("up", "down"):
        t_img = transpose_for_horizontal(image)
        t_mask = PixelMask(object_mask.bits.T.copy(), kind="object")
        t_dir = "left" if direction == "up" else "right"
        t_result = object_displacement_forgery(t_img, t_mask, t_dir, shift, variant, seed)
        return ForgeryResult(
            forged=transpose_for_horizontal(t_result.forged),
            gt=SeamMask(removed=t_result.gt.removed.T.copy(), inserted=t_result.gt.inserted.T.copy()),
            seams_removed=[Seam(s.columns.copy(), orientation="horizontal") for s in t_result.seams_removed],
            seams_inserted=[Seam(s.columns.copy(), orientation="horizontal") for s in t_result.seams_inserted],
            recipe=recipe,
            provenance=t_result.provenance.transpose(),
        )

    obj_cols = np.flatnonzero(object_mask.bits.any(axis=0))
    col_min, col_max = int(obj_cols[0]), int(obj_cols[-1])
    left_gap = col_min
    right_gap = image.width - 1 - col_max
    removal_gap = left_gap if direction == "left" else right_gap
    insert_gap = right_gap if direction == "left" else left_gap
    if removal_gap < shift:
        raise InfeasibleForgeryError(
            f"only {removal_gap} columns available on the removal side for shift {shift}"
        )
    if insert_gap < shift:
        raise InfeasibleForgeryError(
            f"only {insert_gap} columns available on the insertion side for shift {shift}"
        )

    cols = np.arange(image.width)
    if direction == "left":
        removal_band = cols < col_min
        insert_band = cols > col_max
    else:
        removal_band = cols > col_max
        insert_band = cols < col_min
    removal_corridor = PixelMask(np.broadcast_to(removal_band, object_mask.bits.shape).copy(), kind="removal")
    insert_corridor = PixelMask(np.broadcast_to(insert_band, object_mask.bits.shape).copy(), kind="removal")
    protect = PixelMask(object_mask.bits, kind="protective")

    session = CarvingSession(image)
    session.carve_remove(shift, variant, removal_mask=removal_corridor, protective_mask=protect)
    session.carve_insert(shift, variant, removal_mask=insert_corridor, protective_mask=protect)

    _verify_displacement(session, object_mask, direction, shift, image.width)
    return _finalize(session, recipe, image)


def _verify_displacement(
    session: CarvingSession,
    object_mask: PixelMask,
    direction: str,
    shift: int,
    origin_width: int,
) -> None:
    current = session.gather_mask(object_mask)
    if int(current.sum()) != int(object_mask.bits.sum()):
        raise InfeasibleForgeryError("object pixels were lost during displacement")
    tokens = session.provenance.tokens[current]
    final_cols = np.flatnonzero(current.ravel()) % session.width
    orig_cols = tokens % origin_width
    expected = -shift if direction == "left" else shift
    if not np.array_equal(final_cols - orig_cols, np.full_like(orig_cols, expected)):
        raise InfeasibleForgeryError("object displacement is not a uniform column shift")


def _check_mask_dims(image: RasterImage, mask: PixelMask, label: str) -> None:
    if not mask.matches(image):
        raise ValueError(
            f"{label} mask {mask.height}x{mask.width} does not match image "
            f"{image.height}x{image.width}"
        )
