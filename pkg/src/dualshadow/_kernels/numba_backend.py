"""numba @njit implementations of the hot kernels.

Loop bodies mirror numpy_backend element for element: conv2d_reflect
accumulates over kernel taps in (ky, kx) order and bilinear_resize uses
the identical blend expression, so both are bit-identical to the numpy
fallback.  The entropy kernels compute mean/std sequentially and may
differ from numpy's pairwise reductions by ~1 ulp.
"""

import numpy as np
from numba import njit

NAME = "numba"

TRIM_DIVISOR = 20
SCOTT_FACTOR = 3.5
CONST_RANGE_TOL = 1e-12


@njit(cache=True)
def conv2d_reflect(img, kern):
    h, w = img.shape
    kh, kw = kern.shape
    ry, rx = kh // 2, kw // 2
    out = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for ky in range(kh):
                yy = y + ky - ry
                if yy < 0:
                    yy = -yy
                elif yy >= h:
                    yy = 2 * h - 2 - yy
                for kx in range(kw):
                    xx = x + kx - rx
                    if xx < 0:
                        xx = -xx
                    elif xx >= w:
                        xx = 2 * w - 2 - xx
                    acc += kern[ky, kx] * img[yy, xx]
            out[y, x] = acc
    return out


@njit(cache=True)
def conv2d_nchw(x, weights, bias, stride, pad):
    c, h, w = x.shape
    o = weights.shape[0]
    kh = weights.shape[2]
    kw = weights.shape[3]
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    out = np.empty((o, oh, ow), dtype=np.float64)
    for oc in range(o):
        for y in range(oh):
            for xo in range(ow):
                acc = bias[oc]
                for ic in range(c):
                    for ky in range(kh):
                        yy = y * stride + ky - pad
                        if yy < 0 or yy >= h:
                            continue
                        for kx in range(kw):
                            xx = xo * stride + kx - pad
                            if 0 <= xx < w:
                                acc += weights[oc, ic, ky, kx] * x[ic, yy, xx]
                out[oc, y, xo] = acc
    return out


@njit(cache=True)
def bilinear_resize(x, out_h, out_w):
    c, h, w = x.shape
    if out_h == h and out_w == w:
        return x.copy()
    sy = h / out_h
    sx = w / out_w
    out = np.empty((c, out_h, out_w), dtype=np.float64)
    for i in range(out_h):
        yc = (i + 0.5) * sy - 0.5
        y0 = np.floor(yc)
        fy = yc - y0
        y0i = min(max(int(y0), 0), h - 1)
        y1i = min(max(int(y0) + 1, 0), h - 1)
        for j in range(out_w):
            xc = (j + 0.5) * sx - 0.5
            x0 = np.floor(xc)
            fx = xc - x0
            x0i = min(max(int(x0), 0), w - 1)
            x1i = min(max(int(x0) + 1, 0), w - 1)
            for ch in range(c):
                v00 = x[ch, y0i, x0i]
                v01 = x[ch, y0i, x1i]
                v10 = x[ch, y1i, x0i]
                v11 = x[ch, y1i, x1i]
                top = v00 + fx * (v01 - v00)
                bot = v10 + fx * (v11 - v10)
                out[ch, i, j] = top + fy * (bot - top)
    return out


@njit(cache=True)
def sample_entropy(samples):
    n = samples.size
    s = np.sort(samples.copy())
    k = n // TRIM_DIVISOR
    t = s[k:n - k]
    m = t.size
    lo = t[0]
    hi = t[-1]
    scale = max(1.0, abs(lo), abs(hi))
    if hi - lo <= CONST_RANGE_TOL * scale:
        return 0.0
    mean = 0.0
    for i in range(m):
        mean += t[i]
    mean /= m
    var = 0.0
    for i in range(m):
        d = t[i] - mean
        var += d * d
    var /= m
    sigma = np.sqrt(var)
    if sigma <= 0.0:
        return 0.0
    width = SCOTT_FACTOR * sigma * float(m) ** (-1.0 / 3.0)
    nbins = int(np.ceil((hi - lo) / width))
    counts = np.zeros(nbins, dtype=np.int64)
    for i in range(m):
        j = int((t[i] - lo) / width)
        if j >= nbins:
            j = nbins - 1
        counts[j] += 1
    ent = 0.0
    for j in range(nbins):
        if counts[j] > 0:
            p = counts[j] / m
            ent -= p * np.log(p)
    return ent


@njit(cache=True)
def entropy_sweep(x, y, cos_t, sin_t):
    out = np.empty(cos_t.size, dtype=np.float64)
    proj = np.empty(x.size, dtype=np.float64)
    for i in range(cos_t.size):
        c = cos_t[i]
        s = sin_t[i]
        for j in range(x.size):
            proj[j] = c * x[j] + s * y[j]
        out[i] = sample_entropy(proj)
    return out
