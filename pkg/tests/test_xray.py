"""Blending and boundary-map identities.

The numeric examples are frozen from hand computation with the stated
kernel and equations; see each test for the derivation.
"""

import numpy as np
import pytest

from xrayforge import alpha_blend, compute_xray, is_trivial, soften_mask
from xrayforge.errors import DimensionMismatchError

from conftest import random_soft_mask


class TestAlphaBlend:
    def test_mask_all_one_returns_fg_exactly(self):
        rng = np.random.default_rng(0)
        fg = rng.random((20, 24, 3))
        bg = rng.random((20, 24, 3))
        out = alpha_blend(fg, bg, np.ones((20, 24)))
        assert np.array_equal(out, fg)

    def test_mask_all_zero_returns_bg_exactly(self):
        rng = np.random.default_rng(1)
        fg = rng.random((20, 24, 3))
        bg = rng.random((20, 24, 3))
        out = alpha_blend(fg, bg, np.zeros((20, 24)))
        assert np.array_equal(out, bg)

    def test_constant_midpoint(self):
        # 0.5 * 0.8 + 0.5 * 0.2 = 0.5
        fg = np.full((16, 16, 3), 0.8)
        bg = np.full((16, 16, 3), 0.2)
        out = alpha_blend(fg, bg, np.full((16, 16), 0.5))
        assert np.allclose(out, 0.5, atol=1e-15)

    def test_complement_duality(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            fg = rng.random((12, 12, 3))
            bg = rng.random((12, 12, 3))
            m = rng.random((12, 12))
            a = alpha_blend(fg, bg, m)
            b = alpha_blend(bg, fg, 1.0 - m)
            assert np.abs(a - b).max() < 1e-12

    def test_output_within_bounds(self):
        rng = np.random.default_rng(3)
        out = alpha_blend(rng.random((16, 16, 3)), rng.random((16, 16, 3)),
                          rng.random((16, 16)))
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            alpha_blend(np.zeros((16, 16, 3)), np.zeros((16, 18, 3)), np.zeros((16, 16)))
        with pytest.raises(DimensionMismatchError):
            alpha_blend(np.zeros((16, 16, 3)), np.zeros((16, 16, 3)), np.zeros((16, 18)))


class TestSoftenMask:
    def test_all_zero_stays_zero(self):
        assert np.array_equal(soften_mask(np.zeros((16, 16))), np.zeros((16, 16)))

    def test_all_one_stays_one(self):
        assert np.allclose(soften_mask(np.ones((16, 16))), 1.0, atol=1e-15)

    def test_vertical_step_first_inside_column(self):
        # step 0|1 along x; at the first 1-column the horizontal pass sees
        # (0, 1, 1) -> 0.25*0 + 0.5*1 + 0.25*1 = 0.75; the vertical pass
        # then averages a constant column, leaving 0.75
        mask = np.zeros((16, 16))
        mask[:, 8:] = 1.0
        out = soften_mask(mask)
        assert np.allclose(out[:, 8], 0.75, atol=1e-15)
        # last 0-column mirror: (0, 0, 1) -> 0.25
        assert np.allclose(out[:, 7], 0.25, atol=1e-15)
        # columns away from the step unchanged
        assert np.allclose(out[:, :7], 0.0, atol=1e-15)
        assert np.allclose(out[:, 9:], 1.0, atol=1e-15)

    def test_matches_explicit_3x3_kernel(self, rng):
        mask = rng.random((20, 20))
        kernel = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]]) / 16.0
        padded = np.pad(mask, 1, mode="edge")
        expect = np.zeros_like(mask)
        for dy in range(3):
            for dx in range(3):
                expect += kernel[dy, dx] * padded[dy:dy + 20, dx:dx + 20]
        assert np.abs(soften_mask(mask) - expect).max() < 1e-12

    def test_range_preserved(self, rng):
        for _ in range(20):
            out = soften_mask(rng.random((17, 23)))
            assert out.min() >= 0.0 and out.max() <= 1.0


class TestComputeXray:
    def test_zero_mask_gives_zero(self):
        assert np.array_equal(compute_xray(np.zeros((16, 16))), np.zeros((16, 16)))

    def test_half_gives_one(self):
        # peak of 4 * M * (1 - M): 4 * 0.5 * 0.5 = 1
        assert compute_xray(np.array([[0.5]]))[0, 0] == 1.0

    def test_quarter_gives_three_quarters(self):
        # 4 * 0.25 * 0.75 = 0.75
        assert compute_xray(np.array([[0.25]]))[0, 0] == pytest.approx(0.75, abs=1e-15)

    def test_symmetry_under_complement(self, rng):
        for _ in range(50):
            m = random_soft_mask(rng, 16, 16)
            assert np.array_equal(compute_xray(m), compute_xray(1.0 - m))

    def test_binary_mask_gives_exact_zero(self, rng):
        m = (rng.random((32, 32)) < 0.5).astype(np.float64)
        assert np.array_equal(compute_xray(m), np.zeros((32, 32)))

    def test_range(self, rng):
        for _ in range(50):
            x = compute_xray(random_soft_mask(rng, 16, 16))
            assert x.min() >= 0.0 and x.max() <= 1.0

    def test_zero_exactly_where_binary(self, rng):
        m = random_soft_mask(rng, 24, 24)
        x = compute_xray(m)
        binary = (m == 0.0) | (m == 1.0)
        assert np.array_equal(x == 0.0, binary)


class TestIsTrivial:
    def test_all_zero_tol_zero(self):
        assert is_trivial(np.zeros((16, 16)), tol=0.0)

    def test_single_pixel_above_tol(self):
        x = np.zeros((16, 16))
        x[3, 3] = 0.5
        assert not is_trivial(x, tol=0.1)

    def test_below_tol(self):
        x = np.full((16, 16), 0.05)
        assert is_trivial(x, tol=0.1)

    def test_boundary_inclusive(self):
        assert is_trivial(np.full((4, 4), 0.1), tol=0.1)

    def test_negative_tol_rejected(self):
        with pytest.raises(ValueError):
            is_trivial(np.zeros((4, 4)), tol=-1.0)
