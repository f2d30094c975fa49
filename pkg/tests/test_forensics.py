import io as _io

import numpy as np
import pytest
from PIL import Image

from xrayforge.forensics import error_level_analysis, noise_residual
from xrayforge.io import from_uint8, to_uint8


def jpeg_roundtrip(img, quality):
    buf = _io.BytesIO()
    Image.fromarray(to_uint8(img), mode="RGB").save(buf, format="JPEG", quality=quality)
    buf.seek(0)
    return from_uint8(np.asarray(Image.open(buf).convert("RGB")))


def smooth_image(rng, h=64, w=64):
    """Low-frequency random image; compresses cleanly at high quality."""
    coarse = rng.random((h // 8, w // 8, 3))
    img = np.repeat(np.repeat(coarse, 8, axis=0), 8, axis=1)
    return np.clip(img, 0.0, 1.0)


class TestNoiseResidual:
    def test_constant_image_zero_map(self):
        img = np.full((32, 32, 3), 0.6)
        assert np.array_equal(noise_residual(img).data, np.zeros((32, 32)))

    def test_salt_pixel_oracle(self):
        # flat 0.25 with one +0.5 outlier: the 3x3 median at the outlier is
        # still 0.25, so the residual there is 0.5 in every channel
        img = np.full((32, 32, 3), 0.25)
        img[10, 12, :] = 0.75
        out = noise_residual(img, amplification=1.0)
        assert out.data[10, 12] == pytest.approx(0.5, abs=1e-12)
        far = out.data.copy()
        far[9:12, 11:14] = 0.0
        assert far.max() == 0.0

    def test_amplification_linearity(self, rng):
        img = np.clip(rng.random((32, 32, 3)), 0.1, 0.9)
        half = noise_residual(img, amplification=0.5).data
        full = noise_residual(img, amplification=1.0).data
        # amplification 1 keeps everything below clamp for [0,1] inputs here
        assert np.abs(full - 2.0 * half).max() < 1e-12

    def test_translation_equivariance_interior(self, rng):
        base = np.full((40, 40, 3), 0.5)
        patch = rng.random((6, 6, 3))
        a = base.copy()
        a[10:16, 10:16] = patch
        b = base.copy()
        b[14:20, 17:23] = patch  # shifted by (4, 7)
        ma = noise_residual(a).data
        mb = noise_residual(b).data
        assert np.array_equal(ma[8:18, 8:18], mb[12:22, 15:25])

    def test_range_and_kind(self, rng):
        out = noise_residual(rng.random((24, 24, 3)), amplification=50.0)
        assert out.kind == "noise"
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0


class TestErrorLevelAnalysis:
    def test_constant_image_near_zero(self):
        img = np.full((32, 32, 3), 0.5)
        out = error_level_analysis(img, quality=90)
        assert out.data.max() <= 0.02

    def test_recompressed_image_darker_than_composite(self, rng):
        clean = smooth_image(rng)
        settled = jpeg_roundtrip(clean, 90)
        fresh = np.clip(rng.random((64, 64, 3)), 0.0, 1.0)
        settled_mean = error_level_analysis(settled, quality=90).data.mean()
        fresh_mean = error_level_analysis(fresh, quality=90).data.mean()
        assert settled_mean < fresh_mean

    def test_pasted_low_quality_patch_stands_out(self, rng):
        host = jpeg_roundtrip(smooth_image(rng), 95)
        donor = jpeg_roundtrip(rng.random((64, 64, 3)), 60)
        composite = host.copy()
        composite[20:44, 20:44] = donor[20:44, 20:44]
        out = error_level_analysis(composite, quality=95).data
        inside = out[20:44, 20:44].mean()
        outside_mask = np.ones((64, 64), dtype=bool)
        outside_mask[20:44, 20:44] = False
        assert inside > out[outside_mask].mean()

    def test_block_aligned_translation_equivariance(self, rng):
        # JPEG is blockwise (16x16 MCUs with chroma subsampling), so content
        # moved by a whole MCU produces the same blocks and error levels
        base = np.full((64, 64, 3), 0.5)
        patch = rng.random((8, 8, 3))
        a = base.copy()
        a[16:24, 16:24] = patch
        b = base.copy()
        b[16:24, 32:40] = patch
        ma = error_level_analysis(a, quality=80).data
        mb = error_level_analysis(b, quality=80).data
        assert np.array_equal(ma[16:24, 16:24], mb[16:24, 32:40])

    def test_quality_bounds(self):
        with pytest.raises(ValueError):
            error_level_analysis(np.full((16, 16, 3), 0.5), quality=0)

    def test_range_and_kind(self, rng):
        out = error_level_analysis(rng.random((32, 32, 3)), quality=70, scale=100.0)
        assert out.kind == "ela"
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0
