"""Shadow-boundary mask (Gaussian of Sobel, thresholded) and the edge loss."""

import numpy as np

from . import _kernels
from ._common import as_image, as_mask, check_same_shape

SOBEL_GX = np.array([[-1.0, 0.0, 1.0],
                     [-2.0, 0.0, 2.0],
                     [-1.0, 0.0, 1.0]])
SOBEL_GY = SOBEL_GX.T.copy()

EDGE_THRESHOLD = 1e-6
LOSS_EPS_SQ = 1e-16
DEFAULT_SIGMA = 2.0


def gaussian_kernel(sigma):
    """Normalized 2-D Gaussian kernel with radius ceil(3*sigma)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = int(np.ceil(3.0 * sigma))
    d = np.arange(-r, r + 1, dtype=np.float64)
    dx, dy = np.meshgrid(d, d)
    weights = np.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def convolve(img, kernel):
    """Same-size 2-D correlation with reflect-101 border handling."""
    img = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if img.ndim != 2 or kernel.ndim != 2:
        raise ValueError("convolve expects 2-D image and kernel")
    kh, kw = kernel.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError("kernel dimensions must be odd")
    if kh >= 2 * img.shape[0] or kw >= 2 * img.shape[1]:
        raise ValueError("kernel must be smaller than twice the image extent")
    return _kernels.conv2d_reflect(np.ascontiguousarray(img),
                                   np.ascontiguousarray(kernel))


def sobel_magnitude(field):
    """Sobel gradient magnitude sqrt(Gx^2 + Gy^2) of a single-channel field."""
    field = np.asarray(field, dtype=np.float64)
    gx = convolve(field, SOBEL_GX)
    gy = convolve(field, SOBEL_GY)
    return np.sqrt(gx * gx + gy * gy)


def mask_boundary(mask):
    """Pixels with at least one 4-neighbor of opposite value (both sides)."""
    m = as_mask(mask)
    diff = np.zeros(m.shape, dtype=bool)
    diff[:-1, :] |= m[:-1, :] != m[1:, :]
    diff[1:, :] |= m[1:, :] != m[:-1, :]
    diff[:, :-1] |= m[:, :-1] != m[:, 1:]
    diff[:, 1:] |= m[:, 1:] != m[:, :-1]
    return diff


def edge_mask(mask, sigma=DEFAULT_SIGMA):
    """Eq-style boundary band: gaussian_blur(sobel_magnitude(mask)) > 1e-6."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    m = as_mask(mask).astype(np.float64)
    blurred = convolve(sobel_magnitude(m), gaussian_kernel(sigma))
    return (blurred > EDGE_THRESHOLD).astype(np.uint8)


def edge_loss(i_gt, i_out, m_edge):
    """Boundary-weighted reconstruction loss.

    loss = sum_p m(p) * sqrt(sum_c (gt - out)^2 + 1e-16), summed over
    pixels; gradient is with respect to i_out.
    """
    i_gt = as_image(i_gt, "i_gt")
    i_out = as_image(i_out, "i_out")
    m = as_mask(m_edge, "m_edge")
    check_same_shape(i_gt, i_out, "i_gt/i_out")
    check_same_shape(i_gt, m[..., None], "images/mask")

    diff = i_out - i_gt
    norms = np.sqrt((diff * diff).sum(axis=2) + LOSS_EPS_SQ)
    mf = m.astype(np.float64)
    loss = float((mf * norms).sum())
    grad = (mf / norms)[..., None] * diff
    return loss, grad
