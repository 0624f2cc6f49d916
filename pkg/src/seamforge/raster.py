"""Image, mask and tile primitives shared by every other module.

Pixel samples are kept as unit-normalized float64 regardless of the declared
bit depth, so downstream energy functions behave identically for 8-bit RGB
and 16-bit grayscale inputs. All containers handled here are lossless (PNG,
TIFF); lossy input has to be allowed explicitly by the caller.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

SUPPORTED_BIT_DEPTHS = (8, 16)
LOSSLESS_FORMATS = ("PNG", "TIFF")

# Seam-mask color convention: removed seams red, inserted seams green,
# overlap yellow, untouched pixels black.
_COLOR_BACKGROUND = (0, 0, 0)
_COLOR_REMOVED = (255, 0, 0)
_COLOR_INSERTED = (0, 255, 0)
_COLOR_OVERLAP = (255, 255, 0)


class UnsupportedImageError(ValueError):
    """Raised for containers, channel counts or depths we refuse to handle."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RasterImage:
    """Multi-channel raster with unit-normalized samples.

    samples has shape (height, width, channels), dtype float64, values in
    [0, 1]. channels is 1 or 3; bit_depth is the depth of the container the
    image came from (or will be written to).
    """

    samples: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise UnsupportedImageError(f"expected HxWx{{1,3}} samples, got shape {arr.shape}")
        if self.bit_depth not in SUPPORTED_BIT_DEPTHS:
            raise UnsupportedImageError(f"unsupported bit depth {self.bit_depth}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("samples must lie in [0, 1]")
        object.__setattr__(self, "samples", _freeze(arr))

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    def quantized(self) -> np.ndarray:
        """Samples scaled and rounded to the declared integer depth."""
        scale = (1 << self.bit_depth) - 1
        dtype = np.uint8 if self.bit_depth == 8 else np.uint16
        return np.rint(self.samples * scale).astype(dtype)


@dataclass(frozen=True)
class PixelMask:
    """Binary mask annotating an image; kind is removal, protective or object."""

    bits: np.ndarray
    kind: str = "removal"

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {bits.shape}")
        if self.kind not in ("removal", "protective", "object"):
            raise ValueError(f"unknown mask kind {self.kind!r}")
        object.__setattr__(self, "bits", _freeze(bits))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def matches(self, image: RasterImage) -> bool:
        return (self.height, self.width) == (image.height, image.width)


@dataclass(frozen=True)
class SeamMask:
    """Ground-truth seam layers in final-image coordinates.

    removed marks surviving pixels that were adjacent to a removed seam,
    inserted marks synthesized pixels. The layers may overlap.
    """

    removed: np.ndarray
    inserted: np.ndarray

    def __post_init__(self):
        removed = np.asarray(self.removed, dtype=bool)
        inserted = np.asarray(self.inserted, dtype=bool)
        if removed.ndim != 2 or removed.shape != inserted.shape:
            raise ValueError("removed/inserted layers must be same-shape 2-D grids")
        object.__setattr__(self, "removed", _freeze(removed))
        object.__setattr__(self, "inserted", _freeze(inserted))

    @property
    def height(self) -> int:
        return self.removed.shape[0]

    @property
    def width(self) -> int:
        return self.removed.shape[1]


@dataclass(frozen=True)
class TileRegion:
    """Square crop window; must lie fully inside the image it is applied to."""

    origin_row: int
    origin_col: int
    size: int

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("tile size must be positive")
        if self.origin_row < 0 or self.origin_col < 0:
            raise ValueError("tile origin must be non-negative")


def decode_image(data: bytes, allow_lossy: bool = False) -> RasterImage:
    """Decode an encoded image file into a RasterImage.

    Accepts 8-bit single/three-channel and 16-bit single-channel images in
    lossless containers (PNG, TIFF). JPEG input is only accepted when
    allow_lossy is True. Palette images are expanded to RGB; alpha channels
    are rejected so every output sample has explicit provenance.
    """
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise UnsupportedImageError(f"cannot decode image: {exc}") from exc

    fmt = (img.format or "").upper()
    if fmt not in LOSSLESS_FORMATS:
        if fmt == "JPEG" and allow_lossy:
            pass
        else:
            raise UnsupportedImageError(f"unsupported container {fmt or 'unknown'}")

    if img.mode == "P":
        img = img.convert("RGB")
    if img.mode in ("RGBA", "LA", "PA"):
        raise UnsupportedImageError(f"alpha channels are not supported (mode {img.mode})")

    if img.mode in ("L", "RGB"):
        arr = np.asarray(img, dtype=np.float64) / 255.0
        return RasterImage(arr, bit_depth=8)
    if img.mode in ("I;16", "I;16B", "I"):
        arr = np.asarray(img, dtype=np.int64)
        if arr.min() < 0 or arr.max() > 65535:
            raise UnsupportedImageError("integer image exceeds 16-bit range")
        return RasterImage(arr.astype(np.float64) / 65535.0, bit_depth=16)
    raise UnsupportedImageError(f"unsupported image mode {img.mode}")


def encode_image(image: RasterImage, container: str = "png") -> bytes:
    """Encode a RasterImage losslessly at its declared bit depth."""
    container = container.upper()
    if container not in LOSSLESS_FORMATS:
        raise UnsupportedImageError(f"unsupported container {container}")
    q = image.quantized()
    if image.bit_depth == 8:
        if image.channels == 1:
            pil = Image.fromarray(q[:, :, 0], "L")
        else:
            pil = Image.fromarray(q, "RGB")
    else:
        if image.channels != 1:
            raise UnsupportedImageError("16-bit images must be single-channel")
        pil = Image.fromarray(q[:, :, 0])
    buf = io.BytesIO()
    pil.save(buf, format=container)
    return buf.getvalue()


def encode_jpeg(image: RasterImage, quality: int) -> bytes:
    """Encode as baseline JPEG at the given quality (8-bit rendition)."""
    if not 1 <= quality <= 100:
        raise ValueError(f"JPEG quality must be in [1, 100], got {quality}")
    arr = np.rint(image.samples * 255.0).astype(np.uint8)
    pil = Image.fromarray(arr[:, :, 0] if image.channels == 1 else arr)
    buf = io.BytesIO()
    pil.save(buf, format="JPEG", quality=quality)
    return buf.getvalue()


def encode_seam_mask(mask: SeamMask) -> bytes:
    """Encode a SeamMask as an 8-bit RGB PNG.

    Removed pixels are pure red, inserted pure green, overlap yellow and
    background black; decode_seam_mask inverts the encoding exactly.
    """
    rgb = np.zeros((mask.height, mask.width, 3), dtype=np.uint8)
    rgb[mask.removed, 0] = 255
    rgb[mask.inserted, 1] = 255
    buf = io.BytesIO()
    Image.fromarray(rgb, "RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_seam_mask(data: bytes) -> SeamMask:
    """Invert encode_seam_mask; rejects any pixel outside the color convention."""
    img = Image.open(io.BytesIO(data))
    img.load()
    if img.mode != "RGB":
        raise UnsupportedImageError(f"seam mask must be 8-bit RGB, got mode {img.mode}")
    arr = np.asarray(img)
    if arr[:, :, 2].any() or not np.isin(arr[:, :, :2], (0, 255)).all():
        raise ValueError("pixel outside the seam-mask color convention")
    return SeamMask(removed=arr[:, :, 0] == 255, inserted=arr[:, :, 1] == 255)


def crop(image: RasterImage, region: TileRegion) -> RasterImage:
    """Extract the exact subgrid under region; no resampling."""
    r, c, s = region.origin_row, region.origin_col, region.size
    if r + s > image.height or c + s > image.width:
        raise ValueError(
            f"region {s}x{s}@({r},{c}) exceeds image bounds {image.height}x{image.width}"
        )
    return RasterImage(image.samples[r : r + s, c : c + s].copy(), bit_depth=image.bit_depth)


def crop_mask(mask: SeamMask, region: TileRegion) -> SeamMask:
    """Crop a SeamMask with the same window semantics as crop()."""
    r, c, s = region.origin_row, region.origin_col, region.size
    if r + s > mask.height or c + s > mask.width:
        raise ValueError("region exceeds mask bounds")
    return SeamMask(
        removed=mask.removed[r : r + s, c : c + s].copy(),
        inserted=mask.inserted[r : r + s, c : c + s].copy(),
    )
