"""Command-line front end: ``hlsrestruct <subcommand> ...``.

Every subcommand reads its inputs from files and flags only and writes a
JSON report (``"schema": 1``). Failures exit nonzero with a one-line message
on stderr, plus a JSON error object on stdout under ``--json``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import codegen, cycle_model, dataflow, dse, formats, huffman, stencil
from .errors import HLSRestructError, InvalidInputError

SCHEMA_VERSION = 1


def _emit(report: dict, path=None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _profile(arg):
    if arg.endswith(".json"):
        with open(arg) as fh:
            return cycle_model.CalibrationProfile.from_dict(json.load(fh))
    return cycle_model.get_profile(arg)


def cmd_huffman(args) -> dict:
    table = formats.read_freq_csv(args.freqs)
    if args.mode == "reference":
        if args.arrays:
            raise InvalidInputError("--arrays is only available in restructured mode")
        lengths = huffman.build_tree_reference(table)
        num_internal = len(table) - 1
    else:
        arrays = huffman.build_tree_restructured(table, backend=args.backend)
        lengths = huffman.compute_bit_lengths(arrays, table)
        num_internal = arrays.num_internal
        if args.arrays:
            formats.write_arrays_csv(args.arrays, arrays)
    if args.lengths:
        formats.write_lengths_csv(args.lengths, lengths, table)
    kraft = huffman.kraft_sum(lengths)
    return {
        "schema": SCHEMA_VERSION,
        "command": "huffman",
        "mode": args.mode,
        "n": len(table),
        "num_internal": num_internal,
        "weighted_length": huffman.weighted_length(lengths, table),
        "max_length": max(lengths.values()),
        "kraft_sum": str(kraft),
    }


def _kernel(arg):
    if arg in stencil.KERNELS:
        return stencil.KERNELS[arg]
    if arg.endswith(".json"):
        return stencil.load_coeffs(arg)
    raise InvalidInputError(f"unknown kernel {arg!r}: use {sorted(stencil.KERNELS)} or a .json file")


def cmd_conv(args) -> dict:
    image = formats.read_pgm(args.image)
    gx, gy = _kernel(args.kernel)
    pushes = None
    if args.mode == "streaming":
        raw, pushes = stencil.convolve_streaming(image, gx, gy, "raw", backend=args.backend)
        display, _ = stencil.convolve_streaming(image, gx, gy, "display", backend=args.backend)
    else:
        raw = stencil.convolve_reference(image, gx, gy, "raw", backend=args.backend)
        display = stencil.convolve_reference(image, gx, gy, "display", backend=args.backend)
    if args.out:
        formats.write_pgm(args.out, display)
    if args.raw:
        formats.write_raw_csv(args.raw, raw)
    return {
        "schema": SCHEMA_VERSION,
        "command": "conv",
        "mode": args.mode,
        "kernel": args.kernel,
        "width": image.width,
        "height": image.height,
        "pushes": pushes,
        "latency": image.width + 1 if pushes is not None else None,
    }


def _schedule(args, style):
    if args.design == "huffman":
        return cycle_model.LoopSchedule("huffman", style, n=args.n)
    return cycle_model.LoopSchedule("conv", style, width=args.width, height=args.height)


def cmd_estimate(args) -> dict:
    est = cycle_model.estimate_cycles(_schedule(args, args.style), _profile(args.profile))
    return est.report(args.freq_mhz)


def cmd_compare(args) -> dict:
    if args.design == "huffman":
        sizes = {"n": args.n}
    else:
        sizes = {"width": args.width, "height": args.height}
    freqs = args.freq_mhz or [100.0, 100.0]
    if len(freqs) == 1:
        freqs = freqs * 2
    rep = cycle_model.compare(args.design, sizes, _profile(args.profile), tuple(freqs), tuple(args.styles))
    return rep.report()


def cmd_codegen(args) -> dict:
    with open(args.params) as fh:
        params = json.load(fh)
    gen = codegen.instantiate(args.template, params)
    written = gen.write(args.out)
    return {
        "schema": SCHEMA_VERSION,
        "command": "codegen",
        "template": args.template,
        "files": [str(p) for p in written],
    }


def cmd_dse(args) -> dict:
    space = dse.SearchSpace.load(args.space)
    points = dse.explore(space, _profile(args.profile))
    frontier = dse.pareto(points)
    if args.out:
        dse.write_csv(points, frontier, args.out)
    return {
        "schema": SCHEMA_VERSION,
        "command": "dse",
        "template": space.template,
        "points": len(points),
        "frontier": [dict(p.params, cycles=p.cycles, bram=p.bram) for p in frontier],
    }


def _bindings(items, what):
    out = {}
    for item in items or []:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise InvalidInputError(f"{what} binding {item!r} must look like NAME=FILE")
        out[name] = path
    return out


def cmd_graph(args) -> dict:
    graph = dataflow.StreamGraph.load(args.spec)
    in_files = _bindings(args.inputs, "--in")
    out_files = _bindings(args.outputs, "--out")
    tokens = {}
    shape = None
    for name, path in in_files.items():
        tokens[name], s = formats.read_tokens(path)
        shape = shape or s
    stats = {}
    outputs = dataflow.run_functional(graph, tokens, schedule=args.schedule, seed=args.seed, stats=stats)
    unknown = set(out_files) - set(outputs)
    if unknown:
        raise InvalidInputError(f"graph has no outputs named {sorted(unknown)}")
    for name, path in out_files.items():
        formats.write_tokens(path, outputs[name], shape)
    est = dataflow.estimate_graph_cycles(graph, tokens={k: len(v) for k, v in tokens.items()})
    run = stats["run"]
    return {
        "schema": SCHEMA_VERSION,
        "command": "graph",
        "pattern": graph.pattern.name,
        "tokens_in": {k: len(v) for k, v in tokens.items()},
        "tokens_out": {k: len(v) for k, v in outputs.items()},
        "firings": run.firings,
        "max_occupancy": run.max_occupancy,
        "cycles": est.total_cycles,
        "latency": est.latency,
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print errors as JSON on stdout")
    common.add_argument("--report", help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(prog="hlsrestruct", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("huffman", parents=[common], help="Huffman code lengths from a sorted frequency table")
    p.add_argument("--freqs", required=True, help="CSV with header symbol,freq sorted by freq")
    p.add_argument("--mode", choices=("reference", "restructured"), default="restructured")
    p.add_argument("--lengths", help="write symbol,length CSV")
    p.add_argument("--arrays", help="write node arrays CSV (restructured mode)")
    p.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto")
    p.set_defaults(func=cmd_huffman)

    p = sub.add_parser("conv", parents=[common], help="3x3 convolution of a P5 PGM image")
    p.add_argument("--image", required=True)
    p.add_argument("--mode", choices=("reference", "streaming"), default="streaming")
    p.add_argument("--kernel", default="sobel-standard", help="sobel-standard, sobel-paper or a coefficient JSON file")
    p.add_argument("--out", help="write display-mode PGM")
    p.add_argument("--raw", help="write raw responses as row,col,value CSV")
    p.add_argument("--backend", choices=("auto", "compiled", "python", "instrumented"), default="auto")
    p.set_defaults(func=cmd_conv)

    for name, func in (("estimate", cmd_estimate), ("compare", cmd_compare)):
        p = sub.add_parser(name, parents=[common], help=f"{name} clock cycles")
        p.add_argument("--design", choices=cycle_model.KERNELS, required=True)
        p.add_argument("--width", type=int, default=640)
        p.add_argument("--height", type=int, default=480)
        p.add_argument("--n", type=int, default=536)
        p.add_argument("--profile", default="paper-table", help="profile name or JSON file")
        if name == "estimate":
            p.add_argument("--style", choices=cycle_model.STYLES, default="restructured")
            p.add_argument("--freq-mhz", type=float)
        else:
            p.add_argument("--styles", nargs=2, choices=cycle_model.STYLES, default=["software", "restructured"])
            p.add_argument("--freq-mhz", type=float, nargs="+", help="one frequency, or one per style")
        p.set_defaults(func=func)

    p = sub.add_parser("codegen", parents=[common], help="instantiate an HLS-C template")
    p.add_argument("--template", choices=sorted(codegen.TEMPLATES), required=True)
    p.add_argument("--params", required=True, help="template parameters as JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_codegen)

    p = sub.add_parser("dse", parents=[common], help="explore a template parameter space")
    p.add_argument("--space", required=True)
    p.add_argument("--out", help="write param...,cycles,bram,on_frontier CSV")
    p.add_argument("--profile", default="paper-table")
    p.set_defaults(func=cmd_dse)

    p = sub.add_parser("graph", parents=[common], help="simulate a streaming dataflow graph")
    p.add_argument("--spec", required=True, help="graph description JSON")
    p.add_argument("--in", dest="inputs", action="append", metavar="NAME=FILE")
    p.add_argument("--out", dest="outputs", action="append", metavar="NAME=FILE")
    p.add_argument("--schedule", choices=("round-robin", "random"), default="round-robin")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (HLSRestructError, OSError, ValueError, json.JSONDecodeError) as exc:
        code = getattr(exc, "code", "io" if isinstance(exc, OSError) else "invalid-input")
        if not isinstance(code, str):
            code = "io"
        message = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"hlsrestruct {args.command}: error: {message}", file=sys.stderr)
        if args.json:
            _emit({"schema": SCHEMA_VERSION, "error": {"code": code, "message": message}})
        return 2 if isinstance(exc, (InvalidInputError, ValueError)) else 1
    _emit(report, args.report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
