"""Command-line surface: every pipeline stage as a composable subcommand.

Exit codes: 0 success, 1 validation/usage errors, 2 I/O errors.
"""

import argparse
import hashlib
import os
import sys

import numpy as np

from . import chroma, data_io, edges, fusion, metrics, netgraph
from ._kernels import backend_name
from .config import Config, load_config


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _build_parser():
    parser = _Parser(prog="dualshadow",
                     description="Hard/soft shadow-removal toolkit: chromaticity, "
                                 "edge masks, fusion, network checks, metrics.")
    parser.add_argument("--config", metavar="PATH", help="flat key=value config file")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("chroma", help="shadow-free chromaticity of an image")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--angle-report", metavar="PATH",
                   help="write the 180-entry entropy curve as CSV")
    p.set_defaults(func=_cmd_chroma)

    p = sub.add_parser("edgemask", help="shadow-boundary mask of a shadow mask")
    p.add_argument("mask")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--sigma", type=float, help="Gaussian sigma (default from config)")
    p.set_defaults(func=_cmd_edgemask)

    p = sub.add_parser("loss", help="edge or chromaticity loss between two images")
    p.add_argument("kind", choices=("edge", "chroma"))
    p.add_argument("reference", help="ground truth (edge) / shadow input (chroma)")
    p.add_argument("output_img")
    p.add_argument("--mask", help="shadow mask PNG (required for edge loss)")
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser("classify", help="hard/soft shadow probabilities")
    p.add_argument("image")
    p.add_argument("mask")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("fuse", help="weighted fusion of two path outputs")
    p.add_argument("hard")
    p.add_argument("soft")
    p.add_argument("--weights", required=True, metavar="H,S")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("eval", help="region-wise RMSE/SSIM/PSNR report")
    p.add_argument("pred")
    p.add_argument("gt")
    p.add_argument("mask")
    p.add_argument("--csv", action="store_true",
                   help="emit one CSV row: " + ",".join(metrics.CSV_COLUMNS))
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("netcheck", help="graph shape table and forward checksums")
    p.add_argument("--rows", default="6,5,4,3,2,1")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--base", type=int, default=32, help="base channel count")
    p.add_argument("--seed", type=int,
                   help="run the fixed-seed forward pass and print checksums")
    p.set_defaults(func=_cmd_netcheck)

    p = sub.add_parser("synth", help="deterministic synthetic shadow triplet")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--penumbra", type=float, help="penumbra blur sigma")
    p.add_argument("--attenuation", type=float)
    p.add_argument("--chroma-shift", metavar="C1,C2", default="0,0")
    p.add_argument("--size", type=int)
    p.add_argument("--vertices", type=int)
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    p.set_defaults(func=_cmd_synth)

    return parser


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _parse_pair(text, what):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"{what} must be two comma-separated numbers, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ValueError(f"cannot parse {what} {text!r}") from None


def _cmd_chroma(args, cfg):
    img = data_io.load_image(args.input)
    result, entropy = chroma.shadow_free_chromaticity(
        img, cfg.brightest_fraction, return_entropy=True)
    _ensure_parent(args.output)
    data_io.save_image(result, args.output)
    print(f"angle = {entropy.angle_deg}")
    print(f"entropy = {entropy.entropy:.9f}")
    if args.angle_report:
        _ensure_parent(args.angle_report)
        with open(args.angle_report, "w", encoding="utf-8") as fh:
            fh.write("angle,entropy\n")
            for a, e in zip(chroma.ANGLES_DEG, entropy.per_angle_entropy):
                fh.write(f"{a},{e:.12g}\n")
    return 0


def _cmd_edgemask(args, cfg):
    sigma = cfg.edge_sigma if args.sigma is None else args.sigma
    mask = data_io.load_mask(args.mask)
    result = edges.edge_mask(mask, sigma)
    _ensure_parent(args.output)
    data_io.save_mask(result, args.output)
    print(f"edge_pixels = {int(result.sum())}")
    return 0


def _cmd_loss(args, cfg):
    ref = data_io.load_image(args.reference)
    out = data_io.load_image(args.output_img)
    if args.kind == "edge":
        if not args.mask:
            raise ValueError("--mask is required for the edge loss")
        m_edge = edges.edge_mask(data_io.load_mask(args.mask), cfg.edge_sigma)
        loss, grad = edges.edge_loss(ref, out, m_edge)
    else:
        target = chroma.shadow_free_chromaticity(ref, cfg.brightest_fraction)
        loss, grad = chroma.chromaticity_loss(out, target)
    print(f"loss = {loss:.9f}")
    print(f"grad_norm = {float(np.sqrt((grad * grad).sum())):.9f}")
    return 0


def _cmd_classify(args, cfg):
    img = data_io.load_image(args.image)
    mask = data_io.load_mask(args.mask)
    w = fusion.classify_shadow_softness(img, mask, cfg.classifier_g0, cfg.classifier_s)
    print(f"p_hard = {w.p_hard:.6f}")
    print(f"p_soft = {w.p_soft:.6f}")
    return 0


def _cmd_fuse(args, cfg):
    h, s = _parse_pair(args.weights, "--weights")
    w = fusion.FusionWeights(h, s)
    hard = data_io.load_image(args.hard)
    soft = data_io.load_image(args.soft)
    _ensure_parent(args.output)
    data_io.save_image(fusion.fuse_outputs(hard, soft, w), args.output)
    return 0


def _cmd_eval(args, cfg):
    pred = data_io.load_image(args.pred)
    gt = data_io.load_image(args.gt)
    mask = data_io.load_mask(args.mask)
    report = metrics.region_report(pred, gt, mask)
    if args.csv:
        print(report.csv_row())
    else:
        for line in report.text_lines():
            print(line)
    return 0


def _cmd_netcheck(args, cfg):
    try:
        rows = [int(r) for r in args.rows.split(",")]
    except ValueError:
        raise ValueError(f"cannot parse --rows {args.rows!r}") from None
    graph = netgraph.build_unetpp_graph(rows, base_channels=args.base,
                                        seed=0 if args.seed is None else args.seed)
    shapes = netgraph.shape_propagate(graph, args.size, args.size)

    kinds = [k for _, _, k in graph.edges]
    print(f"backend: {backend_name()}")
    print(f"rows: {','.join(str(r) for r in graph.rows)}")
    print(f"nodes: {len(graph.nodes)}")
    print(f"edges: {len(graph.edges)} (down={kinds.count('down')}, "
          f"up={kinds.count('up')}, skip={kinds.count('skip')})")
    print(f"input: {graph.in_channels}x{args.size}x{args.size}")

    outputs = None
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        x = rng.random((graph.in_channels, args.size, args.size))
        outputs = netgraph.forward(graph, x)

    for node in graph.node_ids():
        c, h, w = shapes[node]
        line = f"({node[0]},{node[1]}) {c}x{h}x{w}"
        if outputs is not None:
            digest = hashlib.sha256(outputs[node].tobytes()).hexdigest()[:12]
            line += f" checksum={digest}"
        print(line)
    out_node = graph.output_node
    print(f"output: ({out_node[0]},{out_node[1]})")
    return 0


def _cmd_synth(args, cfg):
    shift = _parse_pair(args.chroma_shift, "--chroma-shift")
    params = data_io.SynthParams(
        base_seed=args.seed,
        image_size=cfg.synth_size if args.size is None else args.size,
        polygon_vertices=cfg.synth_vertices if args.vertices is None else args.vertices,
        attenuation=cfg.synth_attenuation if args.attenuation is None else args.attenuation,
        penumbra_sigma=cfg.synth_penumbra if args.penumbra is None else args.penumbra,
        chroma_shift=shift,
    )
    triplet = data_io.synthesize_triplet(params)
    ref = data_io.write_triplet(triplet, args.output)
    # keep a manifest of everything currently in the directory
    refs = []
    for trip_id, shadow_p, mask_p, free_p in data_io._pairs_items(args.output):
        m = data_io.load_mask(mask_p)
        refs.append(data_io.TripletRef(trip_id, os.path.basename(shadow_p),
                                       os.path.basename(mask_p), os.path.basename(free_p),
                                       m.shape[1], m.shape[0]))
    data_io.write_manifest(refs, os.path.join(args.output, "manifest.txt"))
    print(f"wrote {ref.id} ({ref.width}x{ref.height}) to {args.output}")
    return 0


def main(argv=None):
    """Entry point; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config) if args.config else Config()
        return args.func(args, cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
