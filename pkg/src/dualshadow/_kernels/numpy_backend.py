"""Pure-numpy implementations of the hot per-pixel kernels.

This is the fallback backend (``DUALSHADOW_BACKEND=numpy``) and the
reference for what the numba backend must compute.  conv2d_reflect and
bilinear_resize accumulate in the same per-element order as the numba
loops, so those two are bit-identical across backends.  The entropy
kernels use numpy's pairwise mean/std and may differ from the numba
backend by ~1 ulp in the histogram statistics.
"""

import numpy as np

NAME = "numpy"

# Histogram construction shared by both backends: drop n//20 samples from
# each end, Scott's-rule bin width on the trimmed std, near-constant guard.
TRIM_DIVISOR = 20
SCOTT_FACTOR = 3.5
CONST_RANGE_TOL = 1e-12


def conv2d_reflect(img, kern):
    """2-D correlation with reflect-101 borders, same-size output."""
    h, w = img.shape
    kh, kw = kern.shape
    ry, rx = kh // 2, kw // 2
    pad = np.pad(img, ((ry, ry), (rx, rx)), mode="reflect")
    out = np.zeros((h, w), dtype=np.float64)
    for ky in range(kh):
        for kx in range(kw):
            out += kern[ky, kx] * pad[ky:ky + h, kx:kx + w]
    return out


def conv2d_nchw(x, weights, bias, stride, pad):
    """NCHW convolution (correlation) with zero padding."""
    c, h, w = x.shape
    o, ci, kh, kw = weights.shape
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(1, 2))
    win = win[:, ::stride, ::stride]
    out = np.tensordot(weights, win, axes=([1, 2, 3], [0, 3, 4]))
    return out + bias[:, None, None]


def bilinear_resize(x, out_h, out_w):
    """Per-channel bilinear resize, align_corners=False, edge-clamped."""
    c, h, w = x.shape
    if out_h == h and out_w == w:
        return x.copy()
    sy = h / out_h
    sx = w / out_w
    yc = (np.arange(out_h, dtype=np.float64) + 0.5) * sy - 0.5
    xc = (np.arange(out_w, dtype=np.float64) + 0.5) * sx - 0.5
    y0 = np.floor(yc)
    x0 = np.floor(xc)
    fy = yc - y0
    fx = xc - x0
    y0i = np.clip(y0.astype(np.int64), 0, h - 1)
    y1i = np.clip(y0.astype(np.int64) + 1, 0, h - 1)
    x0i = np.clip(x0.astype(np.int64), 0, w - 1)
    x1i = np.clip(x0.astype(np.int64) + 1, 0, w - 1)
    v00 = x[:, y0i[:, None], x0i[None, :]]
    v01 = x[:, y0i[:, None], x1i[None, :]]
    v10 = x[:, y1i[:, None], x0i[None, :]]
    v11 = x[:, y1i[:, None], x1i[None, :]]
    fxb = fx[None, None, :]
    fyb = fy[None, :, None]
    top = v00 + fxb * (v01 - v00)
    bot = v10 + fxb * (v11 - v10)
    return top + fyb * (bot - top)


def sample_entropy(samples):
    """Shannon entropy (nats) of the trimmed Scott-rule histogram."""
    n = samples.size
    s = np.sort(samples)
    k = n // TRIM_DIVISOR
    t = s[k:n - k]
    m = t.size
    lo = t[0]
    hi = t[-1]
    scale = max(1.0, abs(lo), abs(hi))
    if hi - lo <= CONST_RANGE_TOL * scale:
        return 0.0
    sigma = float(t.std())
    if sigma <= 0.0:
        return 0.0
    width = SCOTT_FACTOR * sigma * float(m) ** (-1.0 / 3.0)
    nbins = int(np.ceil((hi - lo) / width))
    idx = ((t - lo) / width).astype(np.int64)
    idx[idx >= nbins] = nbins - 1
    counts = np.bincount(idx, minlength=nbins)
    p = counts[counts > 0] / m
    return float(-(p * np.log(p)).sum())


def entropy_sweep(x, y, cos_t, sin_t):
    """Entropy of the 1-D projection x*cos+y*sin for every angle."""
    out = np.empty(cos_t.size, dtype=np.float64)
    for i in range(cos_t.size):
        out[i] = sample_entropy(cos_t[i] * x + sin_t[i] * y)
    return out
