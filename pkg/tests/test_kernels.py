"""Backend parity: the numba kernels must agree with the numpy fallback."""

import numpy as np
import pytest

from dualshadow._kernels import backend_name, numpy_backend

try:
    from dualshadow._kernels import numba_backend
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable")


def test_backend_selected():
    assert backend_name() in ("numba", "numpy")


@needs_numba
def test_conv2d_reflect_bit_identical():
    rng = np.random.default_rng(0)
    img = rng.random((20, 17))
    for k in (1, 3, 7):
        kern = rng.random((k, k))
        a = numpy_backend.conv2d_reflect(img, kern)
        b = numba_backend.conv2d_reflect(img, kern)
        assert np.array_equal(a, b)


@needs_numba
def test_bilinear_resize_bit_identical():
    rng = np.random.default_rng(1)
    x = rng.random((3, 7, 9))
    for oh, ow in ((7, 9), (14, 18), (3, 4), (20, 5)):
        a = numpy_backend.bilinear_resize(x, oh, ow)
        b = numba_backend.bilinear_resize(x, oh, ow)
        assert np.array_equal(a, b)


@needs_numba
def test_conv2d_nchw_agree():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(3, 10, 11))
    w = rng.normal(size=(4, 3, 3, 3))
    b = rng.normal(size=4)
    for stride in (1, 2):
        a = numpy_backend.conv2d_nchw(x, w, b, stride, 1)
        c = numba_backend.conv2d_nchw(x, w, b, stride, 1)
        assert a.shape == c.shape
        assert np.abs(a - c).max() < 1e-12


@needs_numba
def test_sample_entropy_agree():
    rng = np.random.default_rng(3)
    for n in (10, 1000, 10_000):
        s = rng.normal(size=n)
        a = numpy_backend.sample_entropy(s)
        b = numba_backend.sample_entropy(s)
        assert abs(a - b) < 1e-9
    const = np.full(100, 1.23)
    assert numpy_backend.sample_entropy(const) == numba_backend.sample_entropy(const) == 0.0


@needs_numba
def test_entropy_sweep_agree():
    rng = np.random.default_rng(4)
    x = rng.normal(size=900)
    y = 0.4 * x + rng.normal(size=900)
    angles = np.arange(1, 181, dtype=np.float64)
    cos_t = np.cos(np.deg2rad(angles))
    sin_t = np.sin(np.deg2rad(angles))
    a = numpy_backend.entropy_sweep(x, y, cos_t, sin_t)
    b = numba_backend.entropy_sweep(x, y, cos_t, sin_t)
    assert np.abs(a - b).max() < 1e-9
    assert np.argmin(a) == np.argmin(b)
