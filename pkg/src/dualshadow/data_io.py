"""Dataset I/O and the deterministic synthetic shadow generator.

PNG round-trip convention: float [0,1] -> 8-bit with round-half-to-even,
8-bit -> float as v/255.  The synthesizer is a pure function of its
parameters; all randomness comes from an explicit 64-bit LCG (Knuth MMIX
constants), not a platform RNG.
"""

import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import edges
from .chroma import PLANE_BASIS

MANIFEST_HEADER = "# dualshadow-manifest v1"

_LCG_MULT = 6364136223846793003
_LCG_INC = 1442695040888963407
_MASK64 = (1 << 64) - 1


@dataclass
class Triplet:
    """Shadow image, binary shadow mask, and shadow-free image."""

    shadow_img: np.ndarray
    mask: np.ndarray
    free_img: np.ndarray
    id: str


@dataclass
class TripletRef:
    """Lazy manifest record: paths are relative to the manifest location."""

    id: str
    shadow_path: str
    mask_path: str
    free_path: str
    width: int
    height: int


@dataclass
class SynthParams:
    base_seed: int
    image_size: int = 128
    polygon_vertices: int = 6
    attenuation: float = 0.55
    penumbra_sigma: float = 0.0
    chroma_shift: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.image_size < 8:
            raise ValueError("image_size must be at least 8")
        if self.polygon_vertices < 3:
            raise ValueError("polygon_vertices must be at least 3")
        if not 0.0 < self.attenuation < 1.0:
            raise ValueError("attenuation must lie in (0, 1)")
        if self.penumbra_sigma < 0.0:
            raise ValueError("penumbra_sigma must be non-negative")


class Lcg64:
    """64-bit linear congruential generator (Knuth MMIX multiplier)."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK64
        self.next_u64()
        self.next_u64()

    def next_u64(self):
        self.state = (self.state * _LCG_MULT + _LCG_INC) & _MASK64
        return self.state

    def next_float(self):
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def floats(self, n):
        return np.array([self.next_float() for _ in range(n)])


# ---------------------------------------------------------------------------
# PNG I/O


def save_image(img, path):
    arr = np.rint(np.asarray(img, dtype=np.float64) * 255.0).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path)


def load_image(path):
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return arr / 255.0


def save_mask(mask, path):
    arr = (np.asarray(mask, dtype=np.uint8) * 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)


def load_mask(path):
    """Load an 8-bit grayscale mask, binarized at threshold 128."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return (arr >= 128).astype(np.uint8)


# ---------------------------------------------------------------------------
# Dataset layouts


def load_triplets(root_path, layout="istd"):
    """Load dataset triplets; returns (triplets, report).

    istd layout: subdirectories A (shadow), B (mask), C (shadow-free) with
    matching filenames.  pairs layout: a flat directory of
    <id>_shadow.png / <id>_mask.png / <id>_free.png files.  Missing or
    unreadable items are skipped and noted in the report.
    """
    if layout not in ("istd", "pairs"):
        raise ValueError(f"unknown layout {layout!r}")
    if not os.path.isdir(root_path):
        raise FileNotFoundError(f"dataset root not found: {root_path}")

    if layout == "istd":
        items = _istd_items(root_path)
    else:
        items = _pairs_items(root_path)

    triplets, report = [], []
    for trip_id, shadow_p, mask_p, free_p in items:
        missing = [p for p in (shadow_p, mask_p, free_p) if not os.path.isfile(p)]
        if missing:
            report.append(f"{trip_id}: missing {', '.join(os.path.basename(m) for m in missing)}")
            continue
        try:
            shadow = load_image(shadow_p)
            mask = load_mask(mask_p)
            free = load_image(free_p)
        except Exception as exc:  # unreadable PNG
            report.append(f"{trip_id}: unreadable ({exc})")
            continue
        if shadow.shape[:2] != mask.shape or shadow.shape != free.shape:
            report.append(f"{trip_id}: dimension mismatch")
            continue
        triplets.append(Triplet(shadow, mask, free, trip_id))
    return triplets, report


def _istd_items(root):
    a_dir = os.path.join(root, "A")
    names = sorted(f for f in os.listdir(a_dir)) if os.path.isdir(a_dir) else []
    return [
        (os.path.splitext(f)[0],
         os.path.join(root, "A", f),
         os.path.join(root, "B", f),
         os.path.join(root, "C", f))
        for f in names if f.lower().endswith(".png")
    ]


def _pairs_items(root):
    suffix = "_shadow.png"
    names = sorted(f for f in os.listdir(root) if f.endswith(suffix))
    out = []
    for f in names:
        trip_id = f[: -len(suffix)]
        out.append((trip_id,
                    os.path.join(root, f),
                    os.path.join(root, f"{trip_id}_mask.png"),
                    os.path.join(root, f"{trip_id}_free.png")))
    return out


# ---------------------------------------------------------------------------
# Manifests


def write_manifest(refs, path):
    """Write triplet references as a line-oriented TSV manifest."""
    lines = [MANIFEST_HEADER]
    for r in refs:
        lines.append("\t".join([r.id, r.shadow_path, r.mask_path, r.free_path,
                                str(r.width), str(r.height)]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_manifest(path):
    """Read a manifest back into (lazy) triplet references."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != MANIFEST_HEADER:
        raise ValueError(f"{path}: line 1: missing manifest header")
    refs = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise ValueError(f"{path}: line {i}: expected 6 tab-separated fields, got {len(parts)}")
        try:
            width, height = int(parts[4]), int(parts[5])
        except ValueError:
            raise ValueError(f"{path}: line {i}: non-integer dimensions") from None
        refs.append(TripletRef(parts[0], parts[1], parts[2], parts[3], width, height))
    return refs


def load_from_manifest(path):
    """Resolve manifest references into triplets; gaps go to the report."""
    refs = read_manifest(path)
    base = os.path.dirname(os.path.abspath(path))
    triplets, report = [], []
    for r in refs:
        paths = [os.path.join(base, p) for p in (r.shadow_path, r.mask_path, r.free_path)]
        missing = [p for p in paths if not os.path.isfile(p)]
        if missing:
            report.append(f"{r.id}: missing {', '.join(os.path.basename(m) for m in missing)}")
            continue
        try:
            triplets.append(Triplet(load_image(paths[0]), load_mask(paths[1]),
                                    load_image(paths[2]), r.id))
        except Exception as exc:
            report.append(f"{r.id}: unreadable ({exc})")
    return triplets, report


def write_triplet(triplet, out_dir):
    """Write a triplet's three PNGs into out_dir; returns its TripletRef."""
    os.makedirs(out_dir, exist_ok=True)
    names = {k: f"{triplet.id}_{k}.png" for k in ("shadow", "mask", "free")}
    save_image(triplet.shadow_img, os.path.join(out_dir, names["shadow"]))
    save_mask(triplet.mask, os.path.join(out_dir, names["mask"]))
    save_image(triplet.free_img, os.path.join(out_dir, names["free"]))
    h, w = triplet.mask.shape
    return TripletRef(triplet.id, names["shadow"], names["mask"], names["free"], w, h)


# ---------------------------------------------------------------------------
# Synthetic shadow generator


def _smooth_noise(rng, size, grid):
    """Bilinearly upsampled lattice noise in [-1, 1]."""
    vals = rng.floats(grid * grid).reshape(grid, grid) * 2.0 - 1.0
    t = np.linspace(0.0, grid - 1.0, size)
    i0 = np.minimum(t.astype(np.int64), grid - 2)
    f = t - i0
    a = vals[np.ix_(i0, i0)]
    b = vals[np.ix_(i0, i0 + 1)]
    c = vals[np.ix_(i0 + 1, i0)]
    d = vals[np.ix_(i0 + 1, i0 + 1)]
    fr = f[:, None]
    fc = f[None, :]
    return a + fc * (b - a) + fr * (c - a) + fr * fc * (a - b - c + d)


def _convex_polygon_mask(rng, size, n_vertices):
    """Rasterize a seeded convex polygon (affine image of a circle)."""
    cx = size * (0.40 + 0.20 * rng.next_float())
    cy = size * (0.40 + 0.20 * rng.next_float())
    sx = size * (0.30 + 0.12 * rng.next_float())
    sy = size * (0.30 + 0.12 * rng.next_float())
    phi = 2.0 * np.pi * rng.next_float()
    # one vertex per angular sector keeps the polygon well-spread
    jitter = rng.floats(n_vertices)
    angles = 2.0 * np.pi * (np.arange(n_vertices) + 0.85 * jitter) / n_vertices
    ux = np.cos(angles) * sx
    uy = np.sin(angles) * sy
    vx = cx + np.cos(phi) * ux - np.sin(phi) * uy
    vy = cy + np.sin(phi) * ux + np.cos(phi) * uy

    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    inside = np.ones((size, size), dtype=bool)
    for i in range(n_vertices):
        j = (i + 1) % n_vertices
        cross = (vx[j] - vx[i]) * (ys - vy[i]) - (vy[j] - vy[i]) * (xs - vx[i])
        inside &= cross >= 0.0
    return inside.astype(np.uint8)


PALETTE_SIZE = 16
PALETTE_PLANE_SPREAD = 0.14  # palette log-chroma offsets drawn in [-spread/2, spread/2]^2
TINT_AMPLITUDE = 0.0005


def synthesize_triplet(params):
    """Deterministically generate a (shadow, mask, free) triplet.

    The free image is a seeded low-frequency color field quantized to a
    small palette of nearby-but-distinct chromaticities with multiplicative
    luminance noise (entropy minimization needs several surface colors to
    split; a single smooth color cluster carries no recoverable shift
    direction).  The shadow applies a per-channel attenuation field inside
    a convex polygon.  A nonzero chroma_shift additionally displaces
    log-chromaticity plane coordinates inside the shadow (realized as
    per-channel scaling); penumbra_sigma Gaussian-blurs the attenuation
    field itself.
    """
    if not isinstance(params, SynthParams):
        params = SynthParams(**params)
    size = params.image_size
    rng = Lcg64(params.base_seed)

    lums = 0.35 + 0.30 * rng.floats(PALETTE_SIZE)
    offsets = (rng.floats(2 * PALETTE_SIZE).reshape(PALETTE_SIZE, 2) - 0.5) \
        * PALETTE_PLANE_SPREAD
    base_chroma = np.exp(offsets @ PLANE_BASIS)
    base_chroma /= base_chroma.sum(axis=1, keepdims=True)
    palette = 3.0 * lums[:, None] * base_chroma  # (K, 3)

    field = _smooth_noise(rng, size, 17)
    cuts = np.quantile(field, np.arange(1, PALETTE_SIZE) / PALETTE_SIZE)
    region = np.searchsorted(cuts, field)

    lum_noise = 0.16 * _smooth_noise(rng, size, 5) + 0.06 * _smooth_noise(rng, size, 13)
    tint = np.stack([TINT_AMPLITUDE * _smooth_noise(rng, size, 13) for _ in range(3)],
                    axis=2)
    free = palette[region] * (1.0 + lum_noise)[:, :, None] * np.exp(tint)
    free = np.clip(free, 0.0, 1.0)

    mask = _convex_polygon_mask(rng, size, params.polygon_vertices)

    shift = np.asarray(params.chroma_shift, dtype=np.float64)
    factors = params.attenuation * np.exp(PLANE_BASIS.T @ shift)
    fields = np.where(mask[:, :, None].astype(bool), factors[None, None, :], 1.0)
    if params.penumbra_sigma > 0.0:
        kern = edges.gaussian_kernel(params.penumbra_sigma)
        fields = np.stack([edges.convolve(fields[:, :, c], kern) for c in range(3)], axis=2)

    shadow = np.clip(free * fields, 0.0, 1.0)
    return Triplet(shadow, mask, free, f"synth-{params.base_seed:08d}")
