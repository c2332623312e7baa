import numpy as np
import pytest

from dualshadow import fusion
from dualshadow.data_io import SynthParams, synthesize_triplet


def rand_pair(seed, shape=(12, 12, 3)):
    rng = np.random.default_rng(seed)
    return rng.random(shape), rng.random(shape)


class TestFusionWeights:
    def test_valid_pair(self):
        w = fusion.FusionWeights(0.3, 0.7)
        assert w.p_hard == 0.3

    @pytest.mark.parametrize("pair", [(1.2, -0.2), (0.6, 0.3), (-0.1, 1.1)])
    def test_invalid_pairs_rejected(self, pair):
        with pytest.raises(ValueError):
            fusion.FusionWeights(*pair)


class TestClassify:
    def test_empty_mask_gives_even_weights(self):
        img = np.full((10, 10, 3), 0.5)
        w = fusion.classify_shadow_softness(img, np.zeros((10, 10), np.uint8))
        assert (w.p_hard, w.p_soft) == (0.5, 0.5)

    def test_hard_shadow_detected(self):
        trip = synthesize_triplet(SynthParams(base_seed=1, attenuation=0.4,
                                              penumbra_sigma=0.0))
        w = fusion.classify_shadow_softness(trip.shadow_img, trip.mask)
        assert w.p_hard > 0.9

    def test_soft_shadow_detected(self):
        trip = synthesize_triplet(SynthParams(base_seed=1, attenuation=0.4,
                                              penumbra_sigma=8.0))
        w = fusion.classify_shadow_softness(trip.shadow_img, trip.mask)
        assert w.p_soft > 0.9

    @pytest.mark.parametrize("seed", [0, 4, 9])
    def test_monotone_in_penumbra(self, seed):
        softs = []
        for sigma in (0.0, 1.0, 2.0, 4.0, 8.0):
            trip = synthesize_triplet(SynthParams(base_seed=seed, attenuation=0.4,
                                                  penumbra_sigma=sigma))
            softs.append(fusion.classify_shadow_softness(trip.shadow_img, trip.mask).p_soft)
        assert all(a <= b for a, b in zip(softs, softs[1:]))

    def test_weights_always_valid(self):
        rng = np.random.default_rng(6)
        img = rng.random((16, 16, 3))
        mask = (rng.random((16, 16)) > 0.5).astype(np.uint8)
        w = fusion.classify_shadow_softness(img, mask)
        assert 0.0 <= w.p_hard <= 1.0
        assert abs(w.p_hard + w.p_soft - 1.0) <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fusion.classify_shadow_softness(np.zeros((4, 4, 3)), np.zeros((5, 5), np.uint8))


class TestFuseOutputs:
    def test_degenerate_weight_is_bit_identical(self):
        h, s = rand_pair(0)
        out = fusion.fuse_outputs(h, s, fusion.FusionWeights(1.0, 0.0))
        assert np.array_equal(out, h)

    def test_midpoint(self):
        h = np.full((6, 6, 3), 0.2)
        s = np.full((6, 6, 3), 0.6)
        out = fusion.fuse_outputs(h, s, fusion.FusionWeights(0.5, 0.5))
        assert np.abs(out - 0.4).max() < 1e-15

    def test_equal_inputs_fixed_point(self):
        h, _ = rand_pair(1)
        for p in (0.0, 0.25, 0.9):
            out = fusion.fuse_outputs(h, h.copy(), fusion.FusionWeights(p, 1.0 - p))
            assert np.abs(out - h).max() < 1e-15

    def test_convex_bounds(self):
        h, s = rand_pair(2)
        for p in (0.1, 0.5, 0.77):
            out = fusion.fuse_outputs(h, s, fusion.FusionWeights(p, 1.0 - p))
            assert np.all(out >= np.minimum(h, s) - 1e-12)
            assert np.all(out <= np.maximum(h, s) + 1e-12)

    def test_swap_symmetry_exact(self):
        h, s = rand_pair(3)
        a = fusion.fuse_outputs(h, s, fusion.FusionWeights(0.3, 0.7))
        b = fusion.fuse_outputs(s, h, fusion.FusionWeights(0.7, 0.3))
        assert np.array_equal(a, b)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fusion.fuse_outputs(np.zeros((4, 4, 3)), np.zeros((4, 5, 3)),
                                fusion.FusionWeights(0.5, 0.5))


def test_calibration_midpoint_matches_defaults():
    g0, s = fusion.calibrate_classifier(seeds=range(10))
    assert abs(g0 - fusion.DEFAULT_G0) < 0.02
    assert s == fusion.DEFAULT_S
