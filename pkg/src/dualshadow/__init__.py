"""Hard/soft shadow-removal toolkit.

Closed-form core of a dual-path shadow-removal method: shadow-free
chromaticity via entropy minimization, shadow-boundary edge masks and the
edge loss, probabilistic dual-path fusion, a forward-only reference of the
nested-skip fusion network, region-wise evaluation metrics, dataset I/O
and a deterministic synthetic shadow generator.
"""

from ._kernels import backend_name
from .chroma import (
    EntropyResult,
    chromaticity_loss,
    log_chromaticity,
    min_entropy_angle,
    normalize_rgb,
    project_1d,
    shadow_free_chromaticity,
    shannon_entropy,
    to_plane_2d,
)
from .data_io import (
    SynthParams,
    Triplet,
    TripletRef,
    load_triplets,
    read_manifest,
    synthesize_triplet,
    write_manifest,
)
from .edges import edge_loss, edge_mask, gaussian_kernel, sobel_magnitude
from .fusion import FusionWeights, classify_shadow_softness, fuse_outputs
from .metrics import EvalReport, psnr, region_report, rgb_to_lab, rmse_region, ssim
from .netgraph import (
    BNSpec,
    ConvSpec,
    bilinear_resize,
    build_unetpp_graph,
    conv_bn_relu,
    mish,
    multi_featfusion_pool,
    scse_forward,
    shape_propagate,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "EntropyResult", "chromaticity_loss", "log_chromaticity", "min_entropy_angle",
    "normalize_rgb", "project_1d", "shadow_free_chromaticity", "shannon_entropy",
    "to_plane_2d",
    "SynthParams", "Triplet", "TripletRef", "load_triplets", "read_manifest",
    "synthesize_triplet", "write_manifest",
    "edge_loss", "edge_mask", "gaussian_kernel", "sobel_magnitude",
    "FusionWeights", "classify_shadow_softness", "fuse_outputs",
    "EvalReport", "psnr", "region_report", "rgb_to_lab", "rmse_region", "ssim",
    "BNSpec", "ConvSpec", "bilinear_resize", "build_unetpp_graph", "conv_bn_relu",
    "mish", "multi_featfusion_pool", "scse_forward", "shape_propagate",
]
