"""Forward-only reference of the generator's fusion machinery.

Covers the two-map fusion pool (bilinear align + channel concat +
Conv-BN-ReLU), the nested dense-skip encoder-decoder graph with residual
Conv-BN-Mish-scSE nodes, shape propagation, and a deterministic
fixed-seed forward pass.  No training, no gradients.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels


@dataclass
class ConvSpec:
    """Convolution weights (out, in, k, k) with bias, stride and padding."""

    weights: np.ndarray
    bias: np.ndarray
    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 4:
            raise ValueError("conv weights must be (out, in, k, k)")
        if self.weights.shape[2] != self.weights.shape[3] or self.weights.shape[2] % 2 == 0:
            raise ValueError("kernel must be square with odd size")
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError("bias shape must match out_channels")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    @property
    def in_channels(self):
        return self.weights.shape[1]

    @property
    def out_channels(self):
        return self.weights.shape[0]

    @property
    def kernel_size(self):
        return self.weights.shape[2]


@dataclass
class BNSpec:
    """Inference-mode batch-norm statistics (per channel)."""

    mean: np.ndarray
    var: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    eps: float = 1e-5

    def __post_init__(self):
        for name in ("mean", "var", "gamma", "beta"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if (self.var < 0).any():
            raise ValueError("variance must be non-negative")

    @staticmethod
    def identity(channels):
        return BNSpec(np.zeros(channels), np.ones(channels),
                      np.ones(channels), np.zeros(channels))


def as_feature_map(x, name="feature map"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[0] < 1:
        raise ValueError(f"{name} must be CxHxW with C >= 1, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError(f"{name} contains non-finite values")
    return x


def _conv(x, conv):
    if x.shape[0] != conv.in_channels:
        raise ValueError(
            f"channel mismatch: input has {x.shape[0]}, conv expects {conv.in_channels}")
    return _kernels.conv2d_nchw(np.ascontiguousarray(x), conv.weights, conv.bias,
                                conv.stride, conv.padding)


def _bn(y, bn):
    scale = (bn.gamma / np.sqrt(bn.var + bn.eps))[:, None, None]
    return scale * (y - bn.mean[:, None, None]) + bn.beta[:, None, None]


def conv_bn_relu(x, conv, bn):
    """max(0, gamma*(Conv(x)-mu)/sqrt(var+eps) + beta), inference-mode BN."""
    x = as_feature_map(x)
    return np.maximum(_bn(_conv(x, conv), bn), 0.0)


def mish(x):
    """x * tanh(softplus(x)), numerically stable for large |x|."""
    arr = np.asarray(x, dtype=np.float64)
    sp = np.where(arr > 20.0, arr, np.log1p(np.exp(np.minimum(arr, 20.0))))
    out = arr * np.tanh(sp)
    return float(out) if out.ndim == 0 else out


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def scse_forward(x, channel_weights, spatial_conv):
    """Concurrent spatial and channel squeeze-excitation: cSE + sSE."""
    x = as_feature_map(x)
    w1, w2 = channel_weights
    w1 = np.asarray(w1, dtype=np.float64)
    w2 = np.asarray(w2, dtype=np.float64)
    c = x.shape[0]
    if w1.shape[1] != c or w2.shape[0] != c or w1.shape[0] != w2.shape[1]:
        raise ValueError("channel-gate weight shapes inconsistent with input")
    if spatial_conv.in_channels != c or spatial_conv.out_channels != 1:
        raise ValueError("spatial gate must be a 1-output conv over all channels")

    gap = x.mean(axis=(1, 2))
    cgate = _sigmoid(w2 @ np.maximum(w1 @ gap, 0.0))
    cse = x * cgate[:, None, None]
    sgate = _sigmoid(_conv(x, spatial_conv))
    sse = x * sgate
    return cse + sse


def bilinear_resize(x, out_h, out_w):
    """Per-channel bilinear resize (align_corners=False, edge-clamped)."""
    x = as_feature_map(x)
    if out_h < 1 or out_w < 1:
        raise ValueError("target size must be at least 1x1")
    return _kernels.bilinear_resize(np.ascontiguousarray(x), int(out_h), int(out_w))


def multi_featfusion_pool(a, b, conv, bn):
    """Align b to a's spatial size, concat channels (a first), Conv-BN-ReLU."""
    a = as_feature_map(a, "a")
    b = as_feature_map(b, "b")
    if conv.in_channels != a.shape[0] + b.shape[0]:
        raise ValueError(
            f"conv expects {conv.in_channels} channels, concat has {a.shape[0] + b.shape[0]}")
    b_aligned = bilinear_resize(b, a.shape[1], a.shape[2])
    return conv_bn_relu(np.concatenate([a, b_aligned], axis=0), conv, bn)


# ---------------------------------------------------------------------------
# Nested dense-skip graph


@dataclass
class NodeSpec:
    conv: ConvSpec
    bn: BNSpec
    scse_channel: tuple
    scse_spatial: ConvSpec
    skip: Optional[ConvSpec]  # 1x1 residual projection; None = identity


class UnetPPGraph:
    """Triangular nested-skip graph.

    Node (r, 0) receives a stride-2 conv of (r-1, 0); node (r, j>=1)
    receives the upsampled output of (r+1, j-1) plus dense skips from
    (r, 0..j-1).  The output node is the top row's last node.  Channel
    width at row r is base_channels * 2^r.
    """

    def __init__(self, rows, base_channels, in_channels, nodes, edges, seed):
        self.rows = rows
        self.base_channels = base_channels
        self.in_channels = in_channels
        self.nodes = nodes
        self.edges = edges
        self.seed = seed

    @property
    def output_node(self):
        return (0, self.rows[0] - 1)

    def node_ids(self):
        return sorted(self.nodes.keys())

    def row_channels(self, r):
        return self.base_channels * (2 ** r)


def _random_conv(rng, out_ch, in_ch, k, stride, padding):
    scale = np.sqrt(2.0 / (in_ch * k * k))
    return ConvSpec(rng.standard_normal((out_ch, in_ch, k, k)) * scale,
                    np.zeros(out_ch), stride=stride, padding=padding)


def _random_bn(rng, channels):
    return BNSpec(mean=0.05 * rng.standard_normal(channels),
                  var=(1.0 + 0.1 * rng.standard_normal(channels)) ** 2,
                  gamma=1.0 + 0.1 * rng.standard_normal(channels),
                  beta=0.05 * rng.standard_normal(channels))


def build_unetpp_graph(rows=(6, 5, 4, 3, 2, 1), base_channels=32, in_channels=3, seed=0):
    """Construct the graph with fixed-seed random weights."""
    rows = [int(r) for r in rows]
    n = len(rows)
    if n < 1 or rows != list(range(rows[0], rows[0] - n, -1)) or rows[-1] != 1:
        raise ValueError(
            f"rows must decrease by 1 down to a single final node, got {rows}")

    edges = []
    for r in range(1, n):
        edges.append(((r - 1, 0), (r, 0), "down"))
    for r in range(n):
        for j in range(1, rows[r]):
            edges.append(((r + 1, j - 1), (r, j), "up"))
            for i in range(j):
                edges.append(((r, i), (r, j), "skip"))

    rng = np.random.default_rng(seed)
    nodes = {}
    for r in range(n):
        out_ch = base_channels * (2 ** r)
        for j in range(rows[r]):
            if j == 0:
                in_ch = in_channels if r == 0 else base_channels * (2 ** (r - 1))
                stride = 1 if r == 0 else 2
            else:
                in_ch = base_channels * (2 ** (r + 1)) + j * out_ch
                stride = 1
            conv = _random_conv(rng, out_ch, in_ch, 3, stride, 1)
            bn = _random_bn(rng, out_ch)
            hidden = max(1, out_ch // 2)
            w1 = rng.standard_normal((hidden, out_ch)) * np.sqrt(2.0 / out_ch)
            w2 = rng.standard_normal((out_ch, hidden)) * np.sqrt(2.0 / hidden)
            spatial = _random_conv(rng, 1, out_ch, 1, 1, 0)
            if in_ch != out_ch or stride != 1:
                skip = _random_conv(rng, out_ch, in_ch, 1, stride, 0)
            else:
                skip = None
            nodes[(r, j)] = NodeSpec(conv, bn, (w1, w2), spatial, skip)

    return UnetPPGraph(rows, base_channels, in_channels, nodes, edges, seed)


def shape_propagate(graph, input_h, input_w):
    """Assign (channels, height, width) to every node; validates divisibility."""
    if input_h < 1 or input_w < 1:
        raise ValueError("input size must be at least 1x1")
    n = len(graph.rows)
    dims = [(int(input_h), int(input_w))]
    for r in range(1, n):
        ph, pw = dims[r - 1]
        if ph % 2 or pw % 2:
            raise ValueError(
                f"node ({r},0): cannot halve odd input {ph}x{pw}; "
                f"input size must be divisible by {2 ** (n - 1)}")
        dims.append((ph // 2, pw // 2))

    shapes = {}
    for (r, j) in graph.nodes:
        shapes[(r, j)] = (graph.row_channels(r), dims[r][0], dims[r][1])

    # wiring consistency: every edge's endpoint sizes must agree after resizing
    for src, dst, kind in graph.edges:
        sh, sw = shapes[src][1:]
        dh, dw = shapes[dst][1:]
        ok = (kind == "down" and (sh, sw) == (2 * dh, 2 * dw)) or \
             (kind == "up" and (2 * sh, 2 * sw) == (dh, dw)) or \
             (kind == "skip" and (sh, sw) == (dh, dw))
        if not ok:
            raise ValueError(f"node {dst}: input from {src} disagrees on spatial size")
    return shapes


def _node_forward(spec, inputs):
    cat = inputs[0] if len(inputs) == 1 else np.concatenate(inputs, axis=0)
    body = scse_forward(mish(_bn(_conv(cat, spec.conv), spec.bn)),
                        spec.scse_channel, spec.scse_spatial)
    identity = cat if spec.skip is None else _conv(cat, spec.skip)
    return body + identity


def forward(graph, x):
    """Run the graph on a CxHxW input; returns {node_id: FeatureMap}."""
    x = as_feature_map(x, "input")
    if x.shape[0] != graph.in_channels:
        raise ValueError(
            f"input has {x.shape[0]} channels, graph expects {graph.in_channels}")
    shape_propagate(graph, x.shape[1], x.shape[2])

    n = len(graph.rows)
    outputs = {(0, 0): _node_forward(graph.nodes[(0, 0)], [x])}
    for r in range(1, n):
        outputs[(r, 0)] = _node_forward(graph.nodes[(r, 0)], [outputs[(r - 1, 0)]])
    for j in range(1, graph.rows[0]):
        for r in range(n):
            if j >= graph.rows[r]:
                continue
            target_h, target_w = outputs[(r, 0)].shape[1:]
            up = bilinear_resize(outputs[(r + 1, j - 1)], target_h, target_w)
            inputs = [up] + [outputs[(r, i)] for i in range(j)]
            outputs[(r, j)] = _node_forward(graph.nodes[(r, j)], inputs)
    return outputs
