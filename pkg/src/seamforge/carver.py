"""Optimal-seam search, seam removal/insertion/merging, provenance tracking.

A CarvingSession threads an image and its per-pixel provenance through an
arbitrary edit sequence, logging one event per edit. Provenance maps every
current pixel back to its coordinate in the session's origin image, or to a
negative token for synthesized (inserted or merged) pixels. Ground-truth
mask construction and seam trajectories both read off this log.

All operations are pure at the module-function level; a session is a value
that is mutated only through its own methods.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .energy import HIGH_BIAS, LOW_BIAS, ForwardCosts, _backward, _forward, _saliency
from .raster import PixelMask, RasterImage

VARIANTS = ("backward", "forward", "saliency", "merge")

# Sentinel for "no neighbor on this side" in removal adjacency records.
NO_TOKEN = np.iinfo(np.int64).min


@dataclass(frozen=True)
class Seam:
    """One top-to-bottom pixel path: a column index per row.

    Seams found by the DP always satisfy 8-connectivity (adjacent columns
    differ by at most 1). Trajectories of batch-inserted seams, tracked
    through later edits, are represented with the same type but may violate
    that bound; is_connected() reports it.
    """

    columns: np.ndarray
    orientation: str = "vertical"
    cost: float | None = None

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.int64)
        if cols.ndim != 1:
            raise ValueError("seam columns must be a 1-D sequence")
        object.__setattr__(self, "columns", cols)
        if self.orientation not in ("vertical", "horizontal"):
            raise ValueError(f"unknown orientation {self.orientation!r}")

    def __len__(self) -> int:
        return len(self.columns)

    def is_connected(self) -> bool:
        return bool(np.all(np.abs(np.diff(self.columns)) <= 1))


@dataclass(frozen=True)
class CumulativeMatrix:
    """DP table of minimum cumulative costs plus the argmin parent offsets."""

    values: np.ndarray
    parent: np.ndarray


@dataclass(frozen=True)
class ProvenanceGrid:
    """Origin coordinate of every current pixel.

    tokens[r, c] >= 0 encodes origin coordinates as row * origin_width + col;
    negative tokens mark synthesized pixels (one id per pixel, allocated in
    creation order). next_synth carries the allocation counter so grids can
    be threaded through the functional API.
    """

    tokens: np.ndarray
    origin_height: int
    origin_width: int
    next_synth: int = 0

    @classmethod
    def identity(cls, height: int, width: int) -> "ProvenanceGrid":
        tokens = np.arange(height * width, dtype=np.int64).reshape(height, width)
        return cls(tokens=tokens, origin_height=height, origin_width=width)

    @property
    def synthesized(self) -> np.ndarray:
        return self.tokens < 0

    def origin_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-pixel origin (rows, cols); -1 entries mark synthesized pixels."""
        rows = np.where(self.tokens >= 0, self.tokens // self.origin_width, -1)
        cols = np.where(self.tokens >= 0, self.tokens % self.origin_width, -1)
        return rows, cols

    def transpose(self) -> "ProvenanceGrid":
        """Provenance of the transposed image: origin coordinates swap."""
        tok = self.tokens
        rows = tok // self.origin_width
        cols = tok % self.origin_width
        swapped = np.where(tok >= 0, cols * self.origin_height + rows, tok)
        return ProvenanceGrid(
            tokens=swapped.T.copy(),
            origin_height=self.origin_width,
            origin_width=self.origin_height,
            next_synth=self.next_synth,
        )


@dataclass
class RemovalEvent:
    kind = "remove"
    removed_tokens: np.ndarray
    left_tokens: np.ndarray
    right_tokens: np.ndarray
    trajectory: np.ndarray


@dataclass
class InsertionEvent:
    kind = "insert"
    synth_base: int
    trajectory: np.ndarray
    parent_tokens: np.ndarray  # (height, 2): seam pixel and averaging partner


@dataclass
class MergeEvent:
    kind = "merge"
    synth_base: int
    trajectory: np.ndarray
    parent_tokens: np.ndarray  # (height, 2): the merged pair


def cumulative_matrix(
    energy: np.ndarray,
    mode: str = "backward",
    fc: ForwardCosts | None = None,
) -> CumulativeMatrix:
    """Minimum cumulative-cost table for the requested recurrence.

    backward and saliency share the plain recurrence (min over the three
    predecessors); forward adds the direction-matched forward cost to each
    predecessor and requires fc. Ties prefer the straight-up parent, then
    up-left, then up-right.
    """
    energy = np.ascontiguousarray(energy, dtype=np.float64)
    if energy.ndim != 2 or energy.size == 0:
        raise ValueError("energy must be a non-empty 2-D grid")
    if mode in ("backward", "saliency"):
        if fc is not None:
            raise ValueError(f"forward costs are meaningless in {mode} mode")
        values, parent = _kernels.cumulative_backward(energy)
    elif mode == "forward":
        if fc is None:
            raise ValueError("forward mode requires forward costs")
        values, parent = _kernels.cumulative_forward(
            energy,
            np.ascontiguousarray(fc.c_left, dtype=np.float64),
            np.ascontiguousarray(fc.c_up, dtype=np.float64),
            np.ascontiguousarray(fc.c_right, dtype=np.float64),
        )
    else:
        raise ValueError(f"unknown cumulative mode {mode!r}")
    return CumulativeMatrix(values=values, parent=parent)


def optimal_seam(matrix: CumulativeMatrix) -> Seam:
    """Backtrack the minimum last-row entry into a full seam.

    The last-row argmin takes the smallest column on ties; the seam cost is
    exactly that minimum.
    """
    cols, cost = _backtrack(matrix.values, matrix.parent)
    return Seam(columns=cols, cost=cost)


def _backtrack(values: np.ndarray, parent: np.ndarray) -> tuple[np.ndarray, float]:
    h = values.shape[0]
    cols = np.empty(h, dtype=np.int64)
    cols[h - 1] = int(np.argmin(values[h - 1]))
    for row in range(h - 1, 0, -1):
        cols[row - 1] = cols[row] + parent[row, cols[row]]
    return cols, float(values[h - 1, cols[h - 1]])


def _contract(arr: np.ndarray, cols: np.ndarray) -> np.ndarray:
    h, w = arr.shape[:2]
    keep = np.ones((h, w), dtype=bool)
    keep[np.arange(h), cols] = False
    if arr.ndim == 3:
        return arr[keep].reshape(h, w - 1, arr.shape[2])
    return arr[keep].reshape(h, w - 1)


def _expand(arr: np.ndarray, cols: np.ndarray, new_values: np.ndarray) -> np.ndarray:
    """Insert new_values after the seam column of each row."""
    h, w = arr.shape[:2]
    j = np.arange(w + 1)[np.newaxis, :]
    src = j - (j > cols[:, np.newaxis])
    if arr.ndim == 3:
        out = np.take_along_axis(arr, src[:, :, np.newaxis], axis=1)
    else:
        out = np.take_along_axis(arr, src, axis=1)
    out[np.arange(h), cols + 1] = new_values
    return out


class CarvingSession:
    """An image plus provenance and an edit log, mutated seam by seam."""

    def __init__(self, image: RasterImage, provenance: ProvenanceGrid | None = None):
        self._samples = np.array(image.samples, dtype=np.float64, copy=True)
        self._bit_depth = image.bit_depth
        if provenance is None:
            provenance = ProvenanceGrid.identity(image.height, image.width)
        if provenance.tokens.shape != self._samples.shape[:2]:
            raise ValueError("provenance shape does not match image")
        self._tokens = np.array(provenance.tokens, dtype=np.int64, copy=True)
        self._origin_h = provenance.origin_height
        self._origin_w = provenance.origin_width
        self._next_synth = provenance.next_synth
        self._sal_map: np.ndarray | None = None
        self.events: list[RemovalEvent | InsertionEvent | MergeEvent] = []

    @property
    def height(self) -> int:
        return self._samples.shape[0]

    @property
    def width(self) -> int:
        return self._samples.shape[1]

    @property
    def image(self) -> RasterImage:
        return RasterImage(self._samples.copy(), bit_depth=self._bit_depth)

    @property
    def provenance(self) -> ProvenanceGrid:
        return ProvenanceGrid(
            tokens=self._tokens.copy(),
            origin_height=self._origin_h,
            origin_width=self._origin_w,
            next_synth=self._next_synth,
        )

    # -- mask handling -------------------------------------------------

    def gather_mask(self, mask: PixelMask) -> np.ndarray:
        """Project an origin-coordinate mask onto the current grid.

        Synthesized pixels never belong to a mask. This is how masks stay
        exact through any edit sequence: no warping, just provenance lookup.
        """
        if mask.bits.shape != (self._origin_h, self._origin_w):
            raise ValueError(
                f"mask shape {mask.bits.shape} does not match origin "
                f"({self._origin_h}, {self._origin_w})"
            )
        out = np.zeros(self._tokens.shape, dtype=bool)
        valid = self._tokens >= 0
        out[valid] = mask.bits.ravel()[self._tokens[valid]]
        return out

    def mask_pixels_remaining(self, mask: PixelMask) -> int:
        return int(self.gather_mask(mask).sum())

    # -- seam search ----------------------------------------------------

    def find_seam(
        self,
        variant: str = "forward",
        removal_mask: PixelMask | None = None,
        protective_mask: PixelMask | None = None,
    ) -> Seam:
        """Optimal seam of the current image under the given energy variant."""
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if variant == "backward":
            base = _backward(self._samples)
            fc = None
        elif variant == "saliency":
            base = self._saliency_map().copy()
            fc = None
        else:  # forward drives both the forward and merge variants
            base = np.zeros(self._samples.shape[:2], dtype=np.float64)
            fc = _forward(self._samples)
        attract = self.gather_mask(removal_mask) if removal_mask is not None else None
        protect = self.gather_mask(protective_mask) if protective_mask is not None else None
        if attract is not None and protect is not None and (attract & protect).any():
            raise ValueError("removal and protective masks overlap")
        if attract is not None:
            base[attract] = LOW_BIAS
        if protect is not None:
            base[protect] = HIGH_BIAS
        mode = "forward" if fc is not None else ("saliency" if variant == "saliency" else "backward")
        return optimal_seam(cumulative_matrix(base, mode=mode, fc=fc))

    def _saliency_map(self) -> np.ndarray:
        # Computed once per session and edited in lockstep with the image,
        # so repeated carving never recomputes it.
        if self._sal_map is None:
            self._sal_map = _saliency(self._samples)
        return self._sal_map

    # -- edits -----------------------------------------------------------

    def _check_seam(self, seam: Seam) -> np.ndarray:
        cols = seam.columns
        if len(cols) != self.height:
            raise ValueError(f"seam length {len(cols)} != image height {self.height}")
        if cols.min() < 0 or cols.max() >= self.width:
            raise ValueError("seam column out of range")
        return cols

    def remove(self, seam: Seam) -> None:
        """Drop the seam pixel from every row; width shrinks by one."""
        if self.width < 2:
            raise ValueError("cannot remove a seam from a single-column image")
        cols = self._check_seam(seam)
        h, w = self.height, self.width
        rows = np.arange(h)
        removed = self._tokens[rows, cols]
        left = np.where(cols > 0, self._tokens[rows, np.maximum(cols - 1, 0)], NO_TOKEN)
        right = np.where(cols < w - 1, self._tokens[rows, np.minimum(cols + 1, w - 1)], NO_TOKEN)

        self._samples = _contract(self._samples, cols)
        self._tokens = _contract(self._tokens, cols)
        if self._sal_map is not None:
            self._sal_map = _contract(self._sal_map, cols)
        self._shift_after_contraction(cols)
        self.events.append(
            RemovalEvent(
                removed_tokens=removed,
                left_tokens=left,
                right_tokens=right,
                trajectory=np.minimum(cols, self.width - 1),
            )
        )

    def insert(self, seam: Seam) -> Seam:
        """Insert the average of each seam pixel and its right neighbor.

        The new pixel lands immediately after the seam pixel; at the last
        column the left neighbor is averaged instead. Returns the positions
        of the inserted pixels in the enlarged image.
        """
        if self.width < 2:
            raise ValueError("cannot insert a seam into a single-column image")
        cols = self._check_seam(seam)
        h, w = self.height, self.width
        rows = np.arange(h)
        partner = np.where(cols < w - 1, cols + 1, cols - 1)
        new_values = (self._samples[rows, cols] + self._samples[rows, partner]) / 2.0
        parents = np.stack([self._tokens[rows, cols], self._tokens[rows, partner]], axis=1)

        base = self._next_synth
        self._next_synth += h
        synth = -(1 + base + rows.astype(np.int64))

        self._samples = _expand(self._samples, cols, new_values)
        self._tokens = _expand(self._tokens, cols, synth)
        if self._sal_map is not None:
            sal_new = (self._sal_map[rows, cols] + self._sal_map[rows, partner]) / 2.0
            self._sal_map = _expand(self._sal_map, cols, sal_new)
        self._shift_after_expansion(cols)
        inserted = cols + 1
        self.events.append(
            InsertionEvent(synth_base=base, trajectory=inserted.copy(), parent_tokens=parents)
        )
        return Seam(columns=inserted)

    def merge(self, seam: Seam) -> None:
        """Replace the seam pixel and its right neighbor by their mean.

        At the last column the pair is taken to the left. Width shrinks by
        one and the merged pixel is synthesized with two parents.
        """
        if self.width < 2:
            raise ValueError("cannot merge seams in a single-column image")
        cols = self._check_seam(seam)
        h, w = self.height, self.width
        rows = np.arange(h)
        pos = np.where(cols < w - 1, cols, cols - 1)
        merged = (self._samples[rows, pos] + self._samples[rows, pos + 1]) / 2.0
        parents = np.stack([self._tokens[rows, pos], self._tokens[rows, pos + 1]], axis=1)

        base = self._next_synth
        self._next_synth += h
        synth = -(1 + base + rows.astype(np.int64))

        self._samples[rows, pos] = merged
        self._tokens[rows, pos] = synth
        if self._sal_map is not None:
            self._sal_map[rows, pos] = (self._sal_map[rows, pos] + self._sal_map[rows, pos + 1]) / 2.0
            self._sal_map = _contract(self._sal_map, pos + 1)
        self._samples = _contract(self._samples, pos + 1)
        self._tokens = _contract(self._tokens, pos + 1)
        self._shift_after_contraction(pos + 1)
        self.events.append(MergeEvent(synth_base=base, trajectory=pos.copy(), parent_tokens=parents))

    def _shift_after_contraction(self, cols: np.ndarray) -> None:
        limit = self.width - 1
        for ev in self.events:
            t = ev.trajectory
            t -= t > cols
            np.minimum(t, limit, out=t)

    def _shift_after_expansion(self, cols: np.ndarray) -> None:
        for ev in self.events:
            t = ev.trajectory
            t += t > cols

    # -- bulk operations --------------------------------------------------

    def carve_remove(
        self,
        k: int,
        variant: str = "forward",
        removal_mask: PixelMask | None = None,
        protective_mask: PixelMask | None = None,
    ) -> list[Seam]:
        """Remove (or, for the merge variant, merge) k optimal seams."""
        if k < 0:
            raise ValueError("k must be non-negative")
        if k >= self.width:
            raise ValueError(f"cannot carve {k} seams from width {self.width}")
        seams = []
        for _ in range(k):
            seam = self.find_seam(variant, removal_mask, protective_mask)
            if variant == "merge":
                self.merge(seam)
            else:
                self.remove(seam)
            seams.append(seam)
        return seams

    def carve_insert(
        self,
        k: int,
        variant: str = "forward",
        removal_mask: PixelMask | None = None,
        protective_mask: PixelMask | None = None,
    ) -> list[Seam]:
        """Insert k seams, selected as the k lowest-cost disjoint seams.

        Selection runs successive removals on a scratch copy (the standard
        duplicate-avoidance technique); the scratch provenance pins each
        selected seam to exact current-image pixels, so insertion positions
        need no manual offset arithmetic beyond tracking prior insertions.
        The masks, if given, bias the selection only.
        """
        if k < 0:
            raise ValueError("k must be non-negative")
        if k > self.width:
            raise ValueError(f"cannot select {k} insertion seams at width {self.width}")
        if k == 0:
            return []
        scratch = CarvingSession(self.image)
        scratch_attract = None
        if removal_mask is not None:
            scratch_attract = PixelMask(self.gather_mask(removal_mask), kind="removal")
        scratch_protect = None
        if protective_mask is not None:
            scratch_protect = PixelMask(self.gather_mask(protective_mask), kind="protective")
        select_variant = "forward" if variant == "merge" else variant
        scratch.carve_remove(
            min(k, self.width - 1),
            select_variant,
            removal_mask=scratch_attract,
            protective_mask=scratch_protect,
        )

        pending = []
        for ev in scratch.events:
            pending.append((ev.removed_tokens % scratch._origin_w).astype(np.int64))
        if k == self.width:
            # every column is a seam; the one survivor is the last (and most
            # expensive) of the k disjoint selections
            pending.append((scratch._tokens[:, 0] % scratch._origin_w).astype(np.int64))

        inserted = []
        for j, cols in enumerate(pending):
            inserted.append(self.insert(Seam(columns=cols)))
            for later in pending[j + 1 :]:
                later += later > cols
        return inserted


# -- functional wrappers ---------------------------------------------------


def remove_seam(
    image: RasterImage, seam: Seam, prov: ProvenanceGrid | None = None
) -> tuple[RasterImage, ProvenanceGrid]:
    """Remove one seam; returns the narrowed image and updated provenance."""
    session = CarvingSession(image, prov)
    session.remove(seam)
    return session.image, session.provenance


def insert_seam(
    image: RasterImage, seam: Seam, prov: ProvenanceGrid | None = None
) -> tuple[RasterImage, ProvenanceGrid, Seam]:
    """Insert one averaged seam; also returns the inserted pixel positions."""
    session = CarvingSession(image, prov)
    inserted = session.insert(seam)
    return session.image, session.provenance, inserted


def merge_seam(
    image: RasterImage, seam: Seam, prov: ProvenanceGrid | None = None
) -> tuple[RasterImage, ProvenanceGrid]:
    """Merge one two-pixel seam element per row into its mean."""
    session = CarvingSession(image, prov)
    session.merge(seam)
    return session.image, session.provenance


def remove_k_seams(
    image: RasterImage,
    k: int,
    variant: str = "forward",
    removal_mask: PixelMask | None = None,
    protective_mask: PixelMask | None = None,
) -> tuple[RasterImage, list[Seam], ProvenanceGrid]:
    """Carve k optimal seams out of the image (merge variant merges them)."""
    session = CarvingSession(image)
    seams = session.carve_remove(k, variant, removal_mask, protective_mask)
    return session.image, seams, session.provenance


def insert_k_seams(
    image: RasterImage,
    k: int,
    variant: str = "forward",
    protective_mask: PixelMask | None = None,
) -> tuple[RasterImage, list[Seam]]:
    """Insert the k lowest-cost disjoint seams into the image.

    The returned seams are the inserted-pixel trajectories in the final
    (fully enlarged) image.
    """
    session = CarvingSession(image)
    session.carve_insert(k, variant, protective_mask=protective_mask)
    trajectories = [Seam(columns=ev.trajectory.copy()) for ev in session.events if ev.kind == "insert"]
    return session.image, trajectories


def transpose_for_horizontal(image: RasterImage) -> RasterImage:
    """Swap rows and columns so horizontal-seam work runs the vertical path."""
    return RasterImage(np.transpose(image.samples, (1, 0, 2)).copy(), bit_depth=image.bit_depth)
