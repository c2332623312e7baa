import math

import numpy as np
import pytest

from dualshadow import edges

from oracles import (
    boundary_4,
    boundary_8,
    central_difference,
    dilate_chebyshev,
    naive_convolve_loops,
    naive_sobel_magnitude,
    oracle_edge_mask,
)


def square_mask(size=32, lo=12, hi=20):
    m = np.zeros((size, size), dtype=np.uint8)
    m[lo:hi, lo:hi] = 1
    return m


def polygon_mask(seed, size=32):
    from dualshadow.data_io import Lcg64, _convex_polygon_mask
    return _convex_polygon_mask(Lcg64(seed), size, 6)


class TestGaussianKernel:
    def test_sigma_one_shape_and_normalization(self):
        k = edges.gaussian_kernel(1.0)
        assert k.shape == (7, 7)
        assert abs(k.sum() - 1.0) < 1e-12

    def test_symmetry_and_center_max(self):
        k = edges.gaussian_kernel(1.0)
        assert np.array_equal(k, k[::-1, :])
        assert np.array_equal(k, k[:, ::-1])
        assert np.array_equal(k, np.rot90(k))
        assert k[3, 3] == k.max()

    def test_center_weight_matches_scalar_formula(self):
        sigma = 2.0
        k = edges.gaussian_kernel(sigma)
        r = math.ceil(3 * sigma)
        total = sum(
            math.exp(-(dx * dx + dy * dy) / (2 * sigma * sigma))
            for dx in range(-r, r + 1) for dy in range(-r, r + 1))
        assert abs(k[r, r] - 1.0 / total) < 1e-12

    def test_rejects_nonpositive_sigma(self):
        for s in (0.0, -1.0):
            with pytest.raises(ValueError):
                edges.gaussian_kernel(s)


class TestConvolve:
    def test_constant_image_preserved(self):
        img = np.full((10, 12), 0.7)
        out = edges.convolve(img, edges.gaussian_kernel(1.0))
        assert np.abs(out - 0.7).max() < 1e-12

    def test_impulse_reproduces_kernel(self):
        img = np.zeros((15, 15))
        img[7, 7] = 1.0
        k = edges.gaussian_kernel(1.0)
        out = edges.convolve(img, k)
        assert np.array_equal(out[4:11, 4:11], k)

    def test_matches_quadruple_loop_oracle(self):
        rng = np.random.default_rng(0)
        img = rng.random((16, 16))
        k = edges.gaussian_kernel(1.5)
        assert np.abs(edges.convolve(img, k) - naive_convolve_loops(img, k)).max() < 1e-12

    def test_rejects_even_kernel(self):
        with pytest.raises(ValueError):
            edges.convolve(np.zeros((8, 8)), np.ones((2, 2)))

    def test_rejects_oversized_kernel(self):
        with pytest.raises(ValueError):
            edges.convolve(np.zeros((3, 3)), np.ones((7, 7)) / 49)


class TestSobelMagnitude:
    def test_constant_masks_have_zero_gradient(self):
        for v in (0.0, 1.0):
            out = edges.sobel_magnitude(np.full((9, 9), v))
            assert np.all(out == 0.0)

    def test_vertical_step_magnitude(self):
        mask = np.zeros((12, 12))
        mask[:, 6:] = 1.0
        out = edges.sobel_magnitude(mask)
        assert np.all(out[:, 5] == 4.0)
        assert np.all(out[:, 6] == 4.0)
        assert np.all(out[:, :5] == 0.0)
        assert np.all(out[:, 7:] == 0.0)

    def test_matches_stencil_oracle(self):
        rng = np.random.default_rng(1)
        mask = (rng.random((16, 16)) > 0.5).astype(np.float64)
        got = edges.sobel_magnitude(mask)
        assert np.abs(got - naive_sobel_magnitude(mask)).max() < 1e-12


class TestEdgeMask:
    def test_constant_masks_give_empty_edges(self):
        assert not edges.edge_mask(np.zeros((16, 16), np.uint8), 1.0).any()
        assert not edges.edge_mask(np.ones((16, 16), np.uint8), 1.0).any()

    def test_square_equals_dilated_boundary(self):
        mask = square_mask()
        got = edges.edge_mask(mask, 1.0)
        r = math.ceil(3 * 1.0)
        expected = dilate_chebyshev(boundary_8(mask), r)
        assert np.array_equal(got.astype(bool), expected)

    def test_matches_blur_of_sobel_oracle_bit_exact(self):
        for seed in (3, 4):
            mask = polygon_mask(seed)
            for sigma in (1.0, 2.0):
                got = edges.edge_mask(mask, sigma)
                want = oracle_edge_mask(mask, sigma, edges.gaussian_kernel(sigma))
                assert np.array_equal(got, want)

    def test_complement_invariance(self):
        mask = polygon_mask(7)
        assert np.array_equal(edges.edge_mask(mask, 2.0),
                              edges.edge_mask((1 - mask).astype(np.uint8), 2.0))

    def test_support_sandwiched_by_boundary_dilations(self):
        for seed in (11, 12, 13):
            mask = polygon_mask(seed)
            if not boundary_4(mask).any():
                continue
            got = edges.edge_mask(mask, 2.0).astype(bool)
            b4 = boundary_4(mask)
            r = math.ceil(3 * 2.0)
            assert np.all(got[b4])  # contains the exact boundary set
            assert not np.any(got & ~dilate_chebyshev(b4, r + 1))

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            edges.edge_mask(square_mask(), 0.0)

    def test_rejects_nonbinary_mask(self):
        with pytest.raises(ValueError):
            edges.edge_mask(np.full((8, 8), 0.5), 1.0)


class TestEdgeLoss:
    def test_identical_images(self):
        rng = np.random.default_rng(2)
        img = rng.uniform(0.05, 0.95, (10, 10, 3))
        mask = square_mask(10, 3, 7)
        loss, grad = edges.edge_loss(img, img, mask)
        assert loss <= 1e-8 * mask.sum() * (1.0 + 1e-12)
        assert np.all(grad == 0.0)

    def test_zero_mask_gives_zero_loss(self):
        rng = np.random.default_rng(3)
        a = rng.uniform(0, 1, (8, 8, 3))
        b = rng.uniform(0, 1, (8, 8, 3))
        loss, grad = edges.edge_loss(a, b, np.zeros((8, 8), np.uint8))
        assert loss == 0.0
        assert np.all(grad == 0.0)

    def test_single_pixel_hand_value(self):
        gt = np.zeros((5, 5, 3))
        out = np.zeros((5, 5, 3))
        out[2, 2] = (0.3, 0.0, 0.4)
        mask = np.zeros((5, 5), np.uint8)
        mask[2, 2] = 1
        loss, _ = edges.edge_loss(gt, out, mask)
        assert abs(loss - 0.5) < 1e-7

    def test_symmetry_in_images(self):
        rng = np.random.default_rng(4)
        a = rng.uniform(0, 1, (9, 9, 3))
        b = rng.uniform(0, 1, (9, 9, 3))
        m = square_mask(9, 2, 7)
        assert edges.edge_loss(a, b, m)[0] == edges.edge_loss(b, a, m)[0]

    def test_nonnegative(self):
        rng = np.random.default_rng(5)
        a = rng.uniform(0, 1, (8, 8, 3))
        b = rng.uniform(0, 1, (8, 8, 3))
        m = (rng.random((8, 8)) > 0.5).astype(np.uint8)
        assert edges.edge_loss(a, b, m)[0] >= 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            edges.edge_loss(np.zeros((4, 4, 3)), np.zeros((5, 4, 3)),
                            np.zeros((4, 4), np.uint8))

    @pytest.mark.parametrize("seed", [31, 32, 33])
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        gt = rng.uniform(0.05, 0.95, (8, 8, 3))
        out = rng.uniform(0.05, 0.95, (8, 8, 3))
        mask = (rng.random((8, 8)) > 0.4).astype(np.uint8)
        _, grad = edges.edge_loss(gt, out, mask)
        fd = central_difference(lambda im: edges.edge_loss(gt, im, mask)[0], out)

        resid = np.sqrt(((out - gt) ** 2).sum(axis=2))
        keep = np.broadcast_to((resid >= 1e-3)[:, :, None], grad.shape)
        scale = np.maximum(np.maximum(np.abs(grad), np.abs(fd)), 1e-8)
        rel = np.abs(grad - fd) / scale
        assert rel[keep].max() < 1e-4
