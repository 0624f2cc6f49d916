import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seamforge import (
    RasterImage,
    SeamMask,
    TileRegion,
    UnsupportedImageError,
    crop,
    decode_image,
    decode_seam_mask,
    encode_image,
    encode_seam_mask,
)

class TestDecodeEncode:
    def test_8bit_rgb_header_passthrough(self, rng):
        img = RasterImage(rng.random((32, 48, 3)))
        decoded = decode_image(encode_image(img))
        assert (decoded.height, decoded.width, decoded.channels, decoded.bit_depth) == (32, 48, 3, 8)

    def test_16bit_max_sample_normalizes_to_one(self):
        arr = np.zeros((4, 4), dtype=np.uint16)
        arr[0, 0] = 65535
        import io
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(arr).save(buf, format="PNG")
        decoded = decode_image(buf.getvalue())
        assert decoded.bit_depth == 16
        assert decoded.channels == 1
        assert decoded.samples[0, 0, 0] == 1.0

    def test_lossless_roundtrip_byte_identical(self, rng):
        img = RasterImage(rng.random((16, 16, 3)))
        encoded = encode_image(img)
        assert encode_image(decode_image(encoded)) == encoded
        assert np.abs(decode_image(encoded).samples - img.samples).max() <= 1.0 / 255

    def test_16bit_roundtrip_within_quantum(self, rng):
        img = RasterImage(rng.random((8, 8, 1)), bit_depth=16)
        decoded = decode_image(encode_image(img))
        assert np.abs(decoded.samples - img.samples).max() <= 1.0 / 65535

    def test_tiff_roundtrip(self, rng):
        img = RasterImage(rng.random((8, 8, 1)), bit_depth=16)
        decoded = decode_image(encode_image(img, container="tiff"))
        assert decoded.bit_depth == 16
        assert np.abs(decoded.samples - img.samples).max() <= 1.0 / 65535

    def test_jpeg_rejected_unless_allowed(self, rng):
        from seamforge.raster import encode_jpeg

        img = RasterImage(rng.random((16, 16, 3)))
        data = encode_jpeg(img, 90)
        with pytest.raises(UnsupportedImageError):
            decode_image(data)
        decoded = decode_image(data, allow_lossy=True)
        assert decoded.width == 16

    def test_alpha_rejected(self):
        import io
        from PIL import Image

        buf = io.BytesIO()
        Image.new("RGBA", (4, 4)).save(buf, format="PNG")
        with pytest.raises(UnsupportedImageError):
            decode_image(buf.getvalue())

    def test_corrupt_stream_rejected(self):
        with pytest.raises(UnsupportedImageError):
            decode_image(b"not an image")

    def test_samples_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            RasterImage(np.full((2, 2, 1), 1.5))


class TestSeamMaskCodec:
    def test_single_removed_pixel_is_red(self):
        removed = np.zeros((3, 3), dtype=bool)
        removed[0, 0] = True
        mask = SeamMask(removed=removed, inserted=np.zeros((3, 3), dtype=bool))
        import io
        from PIL import Image

        arr = np.asarray(Image.open(io.BytesIO(encode_seam_mask(mask))))
        assert tuple(arr[0, 0]) == (255, 0, 0)
        assert tuple(arr[1, 1]) == (0, 0, 0)

    def test_all_zero_mask_is_black(self):
        mask = SeamMask(removed=np.zeros((4, 4), dtype=bool), inserted=np.zeros((4, 4), dtype=bool))
        import io
        from PIL import Image

        arr = np.asarray(Image.open(io.BytesIO(encode_seam_mask(mask))))
        assert not arr.any()

    def test_overlap_is_yellow(self):
        layer = np.ones((1, 1), dtype=bool)
        mask = SeamMask(removed=layer, inserted=layer.copy())
        import io
        from PIL import Image

        arr = np.asarray(Image.open(io.BytesIO(encode_seam_mask(mask))))
        assert tuple(arr[0, 0]) == (255, 255, 0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_roundtrip_random_masks(self, seed):
        rng = np.random.default_rng(seed)
        removed = rng.random((9, 7)) < 0.3
        inserted = rng.random((9, 7)) < 0.3
        mask = SeamMask(removed=removed, inserted=inserted)
        back = decode_seam_mask(encode_seam_mask(mask))
        assert np.array_equal(back.removed, mask.removed)
        assert np.array_equal(back.inserted, mask.inserted)

    def test_offconvention_pixel_rejected(self):
        import io
        from PIL import Image

        arr = np.zeros((2, 2, 3), dtype=np.uint8)
        arr[0, 0] = (12, 200, 3)
        buf = io.BytesIO()
        Image.fromarray(arr).save(buf, format="PNG")
        with pytest.raises(ValueError):
            decode_seam_mask(buf.getvalue())


class TestCrop:
    def test_full_image_identity(self, rng):
        img = RasterImage(rng.random((12, 12, 3)))
        out = crop(img, TileRegion(0, 0, 12))
        assert np.array_equal(out.samples, img.samples)

    def test_exact_subgrid(self, rng):
        img = RasterImage(rng.random((32, 32, 1)))
        out = crop(img, TileRegion(10, 20, 4))
        assert np.array_equal(out.samples, img.samples[10:14, 20:24])

    def test_out_of_bounds_rejected(self, rng):
        img = RasterImage(rng.random((8, 8, 1)))
        with pytest.raises(ValueError):
            crop(img, TileRegion(5, 5, 4))


def test_images_are_immutable(rng):
    img = RasterImage(rng.random((4, 4, 1)))
    with pytest.raises(ValueError):
        img.samples[0, 0, 0] = 0.0
