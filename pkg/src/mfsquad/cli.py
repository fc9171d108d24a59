"""Command-line interface: quadrangulate, measure, generate, bench, render."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .errors import InternalError, MfsquadError
from .io import (FormatError, load_json, mesh_from_dict, polygon_from_dict, read_mesh,
                 read_polygon, write_mesh, write_polygon)

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2

log = logging.getLogger("mfsquad")


def _err(msg: str) -> None:
    print(f"mfsquad: {msg}", file=sys.stderr)


def cmd_quadrangulate(args) -> int:
    from .mesher import quadrangulate
    from .svg import render_svg

    pf = read_polygon(args.input)
    t0 = time.perf_counter()
    mesh = quadrangulate(pf.polygon)
    wall = time.perf_counter() - t0
    write_mesh(args.output, mesh)
    if args.svg:
        Path(args.svg).write_text(render_svg(mesh.drawing, mesh.polygon), encoding="utf-8")
    from .metrics import min_feature_size

    deg = min_feature_size(mesh.polygon)[0] / min_feature_size(mesh.drawing)[0]
    print(f"n={mesh.n} steiner={mesh.steiner_count} degradation={deg!r} time={wall:.3f}s")
    return EXIT_OK


def cmd_measure(args) -> int:
    from .metrics import measure

    data = load_json(args.input)
    g = mesh_from_dict(data, args.input).drawing if "edges" in data else polygon_from_dict(data, args.input).polygon
    rep = measure(g)
    print(json.dumps({"mfs": rep.mfs, "witness": list(rep.witness), "diameter": rep.diameter,
                      "spread": rep.spread}))
    return EXIT_OK


def cmd_generate(args) -> int:
    from .lab import gen_comb, gen_random_simple, gen_regular_ngon

    if args.regular is not None:
        P, name = gen_regular_ngon(args.regular, args.side), f"regular-{args.regular}"
    elif args.comb is not None:
        n, k = args.comb
        P, name = gen_comb(n, k), f"comb-{n}-{k}"
    else:
        n, seed = args.random
        P, name = gen_random_simple(n, seed, args.floor), f"random-{n}-s{seed}"
    write_polygon(args.output, P, name)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .lab import METHODS, FamilySpec, degradation_table, rows_to_csv

    specs = [FamilySpec.regular(n) for n in args.regular or []]
    specs += [FamilySpec.comb(n, k) for n, k in args.comb or []]
    specs += [FamilySpec.random(n, s, args.floor) for n, s in args.random or []]
    if not specs:
        _err("bench needs at least one of --regular, --comb, --random")
        return EXIT_IO
    methods = args.methods.split(",") if args.methods else list(METHODS)
    unknown = set(methods) - set(METHODS)
    if unknown:
        _err(f"unknown method(s): {', '.join(sorted(unknown))}")
        return EXIT_IO
    text = rows_to_csv(degradation_table(specs, methods))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_render(args) -> int:
    from .svg import render_svg

    mf = read_mesh(args.input)
    svg = render_svg(mf.drawing, mf.polygon, args.show_tube, args.show_track)
    Path(args.output).write_text(svg, encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mfsquad", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quadrangulate", help="decompose a polygon into triangles and quadrilaterals")
    q.add_argument("input")
    q.add_argument("output")
    q.add_argument("--svg", help="also write an SVG picture")
    q.set_defaults(func=cmd_quadrangulate)

    m = sub.add_parser("measure", help="print mfs, witness, diameter and spread as JSON")
    m.add_argument("input", help="polygon or mesh file")
    m.set_defaults(func=cmd_measure)

    g = sub.add_parser("generate", help="write a polygon from one of the built-in families")
    fam = g.add_mutually_exclusive_group(required=True)
    fam.add_argument("--regular", type=int, metavar="N")
    fam.add_argument("--comb", type=int, nargs=2, metavar=("N", "K"))
    fam.add_argument("--random", type=int, nargs=2, metavar=("N", "SEED"))
    g.add_argument("--side", type=float, default=1.0)
    g.add_argument("--floor", type=float, default=0.01)
    g.add_argument("output")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="degradation table as CSV")
    b.add_argument("--regular", type=int, nargs="+", metavar="N")
    b.add_argument("--comb", type=int, nargs=2, action="append", metavar=("N", "K"))
    b.add_argument("--random", type=int, nargs=2, action="append", metavar=("N", "SEED"))
    b.add_argument("--floor", type=float, default=0.01)
    b.add_argument("--methods", help="comma-separated subset of ear_clip,best_classic,pipeline")
    b.add_argument("-o", "--output", help="CSV path (default stdout)")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("render", help="render a mesh file to SVG")
    r.add_argument("input")
    r.add_argument("output")
    r.add_argument("--show-tube", action="store_true")
    r.add_argument("--show-track", action="store_true")
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        _err(str(exc))
        return EXIT_IO
    except InternalError as exc:
        _err(f"internal failure {exc}")
        return EXIT_INVALID
    except MfsquadError as exc:
        pair = getattr(exc, "pair", None)
        _err(f"{type(exc).__name__}: {exc}" + (f" (edges {pair[0]} and {pair[1]})" if pair else ""))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
