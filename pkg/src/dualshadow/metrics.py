"""Region-wise shadow-removal evaluation: RMSE (LAB MAE), PSNR, SSIM.

"RMSE" follows the shadow-removal literature's convention: per-channel
mean absolute error in CIE-LAB.  The all-region row is the pixel-count
weighted aggregate over all pixels, not the mean of the two region
values.  Region SSIM masks 11x11 window centers by the region; a region
with no valid window centers yields NaN for that cell.
"""

from dataclasses import dataclass

import numpy as np

from ._common import as_image, as_mask, check_same_shape, luminance

PSNR_CAP_DB = 99.0
PSNR_MSE_FLOOR = 1e-10

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

CSV_COLUMNS = ["rmse_s", "rmse_ns", "rmse_all",
               "ssim_s", "ssim_ns", "ssim_all",
               "psnr_s", "psnr_ns", "psnr_all"]

# sRGB (D65) linear -> XYZ
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_WHITE = np.array([0.95047, 1.0, 1.08883])
_LAB_DELTA = 6.0 / 29.0


@dataclass
class EvalReport:
    """Metric x region grid plus region pixel counts."""

    rmse_shadow: float
    rmse_non_shadow: float
    rmse_all: float
    ssim_shadow: float
    ssim_non_shadow: float
    ssim_all: float
    psnr_shadow: float
    psnr_non_shadow: float
    psnr_all: float
    shadow_pixels: int
    non_shadow_pixels: int

    def csv_row(self):
        vals = [self.rmse_shadow, self.rmse_non_shadow, self.rmse_all,
                self.ssim_shadow, self.ssim_non_shadow, self.ssim_all,
                self.psnr_shadow, self.psnr_non_shadow, self.psnr_all]
        return ",".join(f"{v:.6f}" for v in vals)

    def text_lines(self):
        lines = []
        for metric in ("rmse", "ssim", "psnr"):
            for region, attr in (("shadow", "shadow"), ("non_shadow", "non_shadow"),
                                 ("all", "all")):
                lines.append(f"{metric}_{region} = {getattr(self, f'{metric}_{attr}'):.6f}")
        lines.append(f"shadow_pixels = {self.shadow_pixels}")
        lines.append(f"non_shadow_pixels = {self.non_shadow_pixels}")
        return lines


def rgb_to_lab(img):
    """sRGB in [0,1] -> CIE-LAB (D65), standard constants."""
    img = as_image(img)
    linear = np.where(img <= 0.04045, img / 12.92, ((img + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _LAB_DELTA ** 3, np.cbrt(t), t / (3.0 * _LAB_DELTA ** 2) + 4.0 / 29.0)
    fx, fy, fz = f[..., 0], f[..., 1], f[..., 2]
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * fy - 16.0
    lab[..., 1] = 500.0 * (fx - fy)
    lab[..., 2] = 200.0 * (fy - fz)
    return lab


def _region_selector(shape, region):
    if region is None or (isinstance(region, str) and region == "all"):
        return np.ones(shape, dtype=bool)
    return as_mask(region).astype(bool)


def rmse_region(pred, gt, region=None):
    """Per-channel LAB MAE averaged over region pixels and the 3 channels."""
    pred = as_image(pred, "pred")
    gt = as_image(gt, "gt")
    check_same_shape(pred, gt, "pred/gt")
    sel = _region_selector(pred.shape[:2], region)
    if not sel.any():
        raise ValueError("region is empty")
    diff = np.abs(rgb_to_lab(pred) - rgb_to_lab(gt))
    return float(diff[sel].mean())


def psnr(pred, gt, region=None):
    """10*log10(1/MSE) over [0,1] images, capped at 99 dB for tiny MSE."""
    pred = as_image(pred, "pred")
    gt = as_image(gt, "gt")
    check_same_shape(pred, gt, "pred/gt")
    sel = _region_selector(pred.shape[:2], region)
    if not sel.any():
        raise ValueError("region is empty")
    diff = pred - gt
    mse = float((diff * diff)[sel].mean())
    if mse < PSNR_MSE_FLOOR:
        return PSNR_CAP_DB
    return float(10.0 * np.log10(1.0 / mse))


def _gaussian_window(size, sigma):
    d = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    dx, dy = np.meshgrid(d, d)
    w = np.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
    return w / w.sum()


def ssim_map(pred, gt):
    """Per-window SSIM on luminance over all valid 11x11 window positions."""
    pred = as_image(pred, "pred")
    gt = as_image(gt, "gt")
    check_same_shape(pred, gt, "pred/gt")
    h, w = pred.shape[:2]
    if min(h, w) < SSIM_WINDOW:
        raise ValueError(f"image too small for SSIM: need {SSIM_WINDOW}x{SSIM_WINDOW}")

    x = luminance(pred)
    y = luminance(gt)
    win = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)

    def wfilter(a):
        view = np.lib.stride_tricks.sliding_window_view(a, (SSIM_WINDOW, SSIM_WINDOW))
        return np.tensordot(view, win, axes=([2, 3], [0, 1]))

    mu_x = wfilter(x)
    mu_y = wfilter(y)
    sxx = wfilter(x * x) - mu_x * mu_x
    syy = wfilter(y * y) - mu_y * mu_y
    sxy = wfilter(x * y) - mu_x * mu_y

    c1 = SSIM_K1 ** 2
    c2 = SSIM_K2 ** 2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * sxy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2)
    return num / den


def ssim(pred, gt):
    """Mean single-scale SSIM over valid window positions."""
    return float(ssim_map(pred, gt).mean())


def region_report(pred, gt, mask):
    """Fill the metric x region grid for shadow / non-shadow / all."""
    pred = as_image(pred, "pred")
    gt = as_image(gt, "gt")
    m = as_mask(mask)
    check_same_shape(pred, gt, "pred/gt")
    check_same_shape(pred, m[..., None], "images/mask")
    shadow = m.astype(bool)
    if not shadow.any() or shadow.all():
        raise ValueError("both shadow and non-shadow regions must be non-empty")

    smap = ssim_map(pred, gt)
    half = SSIM_WINDOW // 2
    centers = shadow[half:shadow.shape[0] - half, half:shadow.shape[1] - half]

    def region_ssim(sel):
        return float(smap[sel].mean()) if sel.any() else float("nan")

    return EvalReport(
        rmse_shadow=rmse_region(pred, gt, m),
        rmse_non_shadow=rmse_region(pred, gt, (1 - m).astype(np.uint8)),
        rmse_all=rmse_region(pred, gt),
        ssim_shadow=region_ssim(centers),
        ssim_non_shadow=region_ssim(~centers),
        ssim_all=float(smap.mean()),
        psnr_shadow=psnr(pred, gt, m),
        psnr_non_shadow=psnr(pred, gt, (1 - m).astype(np.uint8)),
        psnr_all=psnr(pred, gt),
        shadow_pixels=int(shadow.sum()),
        non_shadow_pixels=int((~shadow).sum()),
    )
