"""Dual-path output fusion and the shadow-softness classifier proxy.

The trained classifier is replaced by a deterministic stand-in: the mean
Sobel gradient of image luminance over the mask-boundary pixels, squashed
through a logistic.  G0 is the midpoint of the corpus-mean boundary
gradients of the seeded synthetic scenes at penumbra sigma 0 (hard,
mean 1.200) and sigma 8 (soft, mean 0.286); see calibrate_classifier().
"""

from dataclasses import dataclass

import numpy as np

from ._common import as_image, as_mask, check_same_shape, luminance
from .edges import mask_boundary, sobel_magnitude

DEFAULT_G0 = 0.74
DEFAULT_S = 0.05


@dataclass
class FusionWeights:
    """Probability pair (p_hard, p_soft); nonnegative, sums to 1."""

    p_hard: float
    p_soft: float

    def __post_init__(self):
        if not (0.0 <= self.p_hard <= 1.0 and 0.0 <= self.p_soft <= 1.0):
            raise ValueError("fusion weights must lie in [0, 1]")
        if abs(self.p_hard + self.p_soft - 1.0) > 1e-9:
            raise ValueError("fusion weights must sum to 1")


def mean_boundary_gradient(img, mask):
    """Mean Sobel luminance gradient over the exact mask-boundary pixels."""
    img = as_image(img)
    mask = as_mask(mask)
    check_same_shape(img, mask[..., None], "image/mask")
    boundary = mask_boundary(mask)
    if not boundary.any():
        return None
    grad = sobel_magnitude(luminance(img))
    return float(grad[boundary].mean())


def classify_shadow_softness(img, mask, g0=DEFAULT_G0, s=DEFAULT_S):
    """Hard/soft probability pair from boundary gradient sharpness.

    Returns (0.5, 0.5) when the mask has no boundary (no evidence).
    """
    g = mean_boundary_gradient(img, mask)
    if g is None:
        return FusionWeights(0.5, 0.5)
    p_hard = float(1.0 / (1.0 + np.exp(-(g - g0) / s)))
    return FusionWeights(p_hard, 1.0 - p_hard)


def fuse_outputs(hard_out, soft_out, weights):
    """Pixelwise convex combination p_hard*hard + p_soft*soft, clamped to [0,1]."""
    hard_out = as_image(hard_out, "hard_out")
    soft_out = as_image(soft_out, "soft_out")
    check_same_shape(hard_out, soft_out, "hard/soft outputs")
    out = weights.p_hard * hard_out + weights.p_soft * soft_out
    return np.clip(out, 0.0, 1.0)


def calibrate_classifier(seeds=range(10), sigma_hard=0.0, sigma_soft=8.0,
                         attenuation=0.4, s=DEFAULT_S):
    """Recompute (g0, s) against the synthetic corpus.

    g0 is the midpoint of the corpus-mean boundary gradients at the hard
    and soft penumbra settings; s is passed through.  Used once to pin the
    module defaults.
    """
    from .data_io import SynthParams, synthesize_triplet

    means = []
    for sigma in (sigma_hard, sigma_soft):
        vals = []
        for seed in seeds:
            trip = synthesize_triplet(SynthParams(
                base_seed=seed, attenuation=attenuation, penumbra_sigma=sigma))
            vals.append(mean_boundary_gradient(trip.shadow_img, trip.mask))
        means.append(float(np.mean(vals)))
    g_hard, g_soft = means
    return 0.5 * (g_hard + g_soft), s
