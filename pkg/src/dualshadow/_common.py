"""Small shared helpers: array validation and luminance."""

import numpy as np

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def as_image(img, name="image"):
    """Validate an H x W x 3 float image with finite values in [0, 1]."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"{name} must be HxWx3, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"{name} must have at least one pixel")
    if not np.isfinite(img).all():
        raise ValueError(f"{name} contains non-finite values")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return img


def as_mask(mask, name="mask"):
    """Validate an H x W binary mask; returns uint8 in {0, 1}."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError(f"{name} must be HxW, got shape {mask.shape}")
    m = mask.astype(np.uint8)
    if not np.isin(m, (0, 1)).all() or not np.array_equal(m, mask):
        raise ValueError(f"{name} must be strictly binary")
    return m


def check_same_shape(a, b, what="inputs"):
    if a.shape[:2] != b.shape[:2]:
        raise ValueError(f"{what} dimensions differ: {a.shape[:2]} vs {b.shape[:2]}")


def luminance(img):
    """Rec.601 luma of an RGB image."""
    r, g, b = LUMA_WEIGHTS
    return r * img[:, :, 0] + g * img[:, :, 1] + b * img[:, :, 2]
