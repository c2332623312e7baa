"""Shadow-free chromaticity via entropy minimization.

Pipeline: sum-normalized chromaticity -> log chromaticity -> projection
onto the plane orthogonal to (1,1,1) -> 1-D projection sweep over integer
angles 1..180 -> keep the minimum-entropy direction -> illumination
compensation from the brightest pixels -> back to a chromaticity map.
Also provides the L1 chromaticity loss with its analytic gradient.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._common import as_image, check_same_shape

EPS = 1e-6

# Orthonormal basis (rows) of the plane orthogonal to (1,1,1).
PLANE_BASIS = np.array([
    [1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0), 0.0],
    [1.0 / np.sqrt(6.0), 1.0 / np.sqrt(6.0), -2.0 / np.sqrt(6.0)],
])

ANGLES_DEG = np.arange(1, 181)


@dataclass
class EntropyResult:
    """Minimum-entropy projection direction and the full sweep curve."""

    angle_deg: int
    entropy: float
    per_angle_entropy: np.ndarray  # entropies for angles 1..180


def cos_sin_deg(angle_deg):
    """(cos, sin) of an angle in degrees, exact at multiples of 90.

    float sin(pi) is ~1.2e-16, which would leave machine-noise residue in
    projections the math says are exactly constant; the sweep relies on
    those being exact.
    """
    a = angle_deg % 360
    if a == 0:
        return 1.0, 0.0
    if a == 90:
        return 0.0, 1.0
    if a == 180:
        return -1.0, 0.0
    if a == 270:
        return 0.0, -1.0
    rad = np.deg2rad(angle_deg)
    return float(np.cos(rad)), float(np.sin(rad))


_COS_TABLE = np.array([cos_sin_deg(a)[0] for a in ANGLES_DEG])
_SIN_TABLE = np.array([cos_sin_deg(a)[1] for a in ANGLES_DEG])


def normalize_rgb(img):
    """Sum-normalized chromaticity: (c + eps) / (sum + 3*eps) per pixel.

    Components are strictly positive and sum to 1; a black pixel maps to
    (1/3, 1/3, 1/3).
    """
    img = as_image(img)
    total = img.sum(axis=2, keepdims=True)
    return (img + EPS) / (total + 3.0 * EPS)


def log_chromaticity(chroma):
    """Elementwise natural log of a chromaticity map."""
    chroma = np.asarray(chroma, dtype=np.float64)
    if chroma.min() <= 0.0:
        raise ValueError("chromaticity components must be positive")
    return np.log(chroma)


def to_plane_2d(logchroma):
    """Project per-pixel log chromaticity onto the plane orthogonal to (1,1,1)."""
    logchroma = np.asarray(logchroma, dtype=np.float64)
    return logchroma @ PLANE_BASIS.T


def lift_from_plane(plane):
    """Lift plane coordinates back to 3-D log space (zero (1,1,1) component)."""
    plane = np.asarray(plane, dtype=np.float64)
    return plane @ PLANE_BASIS


def project_1d(plane, angle_deg):
    """Project plane coordinates onto the direction angle_deg (degrees).

    Returns one scalar per pixel (flattened row-major).
    """
    if not 1 <= int(angle_deg) <= 180 or int(angle_deg) != angle_deg:
        raise ValueError(f"angle must be an integer in [1, 180], got {angle_deg}")
    plane = np.asarray(plane, dtype=np.float64)
    c, s = cos_sin_deg(int(angle_deg))
    return (c * plane[..., 0] + s * plane[..., 1]).ravel()


def shannon_entropy(samples):
    """Shannon entropy (nats) of a 1-D sample set.

    Histogram: samples trimmed to the central 90% by value, Scott's-rule
    bin width 3.5*sigma*n^(-1/3); empty bins contribute nothing; constant
    input gives 0.
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ValueError("samples must be non-empty")
    return float(_kernels.sample_entropy(samples))


def min_entropy_angle(plane):
    """Sweep integer angles 1..180 and return the minimum-entropy direction.

    Ties break to the smallest angle.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim < 2 or plane.shape[-1] != 2:
        raise ValueError(f"plane map must be ...x2, got shape {plane.shape}")
    x = np.ascontiguousarray(plane[..., 0], dtype=np.float64).ravel()
    y = np.ascontiguousarray(plane[..., 1], dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError("need at least 2 pixels for the entropy sweep")
    entropies = np.asarray(_kernels.entropy_sweep(x, y, _COS_TABLE, _SIN_TABLE))
    best = int(np.argmin(entropies))
    return EntropyResult(
        angle_deg=int(ANGLES_DEG[best]),
        entropy=float(entropies[best]),
        per_angle_entropy=entropies,
    )


def shadow_free_chromaticity(img, brightest_fraction=0.01, return_entropy=False):
    """Shadow-free chromaticity map of an RGB image.

    Projects every pixel's plane coordinates onto the minimum-entropy
    direction, then compensates the color shift by the mean offset of the
    brightest pixels (by channel sum) before lifting back to chromaticity.
    With return_entropy=True also returns the EntropyResult of the sweep.
    """
    img = as_image(img)
    if not 0.0 < brightest_fraction <= 1.0:
        raise ValueError("brightest_fraction must be in (0, 1]")
    chi = to_plane_2d(log_chromaticity(normalize_rgb(img)))

    result = min_entropy_angle(chi)
    c, s = cos_sin_deg(result.angle_deg)
    direction = np.array([c, s])
    proj = chi[..., 0] * c + chi[..., 1] * s  # (H, W)

    sums = img.sum(axis=2).ravel()
    n_bright = max(1, int(np.floor(brightest_fraction * sums.size)))
    bright = np.argsort(-sums, kind="stable")[:n_bright]
    chi_flat = chi.reshape(-1, 2)
    proj_flat = proj.ravel()
    offset = chi_flat[bright].mean(axis=0) - proj_flat[bright].mean() * direction

    lifted = proj[..., None] * direction + offset
    rho = lift_from_plane(lifted)
    expd = np.exp(rho)
    out = expd / expd.sum(axis=2, keepdims=True)
    if return_entropy:
        return out, result
    return out


def chromaticity_loss(output, target_chroma):
    """Mean L1 distance between normalize_rgb(output) and a target chromaticity.

    Returns (loss, gradient) where the gradient is the analytic derivative
    with respect to the output image (subgradient 0 at the |.| kinks).
    """
    output = as_image(output, "output")
    target_chroma = np.asarray(target_chroma, dtype=np.float64)
    check_same_shape(output, target_chroma, "output/target")

    total = output.sum(axis=2, keepdims=True)
    denom = total + 3.0 * EPS
    norm = (output + EPS) / denom

    resid = norm - target_chroma
    n_terms = resid.size
    loss = float(np.abs(resid).sum() / n_terms)

    # d norm_c / d out_d = delta_cd / denom - (out_c + eps) / denom^2
    sign = np.sign(resid)
    # diagonal term + the shared -sum(sign_c * (out_c+eps)) / denom^2 term
    shared = (sign * (output + EPS)).sum(axis=2, keepdims=True) / (denom * denom)
    grad = (sign / denom - shared) / n_terms
    return loss, grad
