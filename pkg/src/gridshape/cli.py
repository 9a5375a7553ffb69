"""gridshape command line: extract descriptors, build indexes, run ranked
queries and evaluations.

Exit codes: 0 success, 1 data error, 2 usage error. Every report starts
with a header comment recording the full run configuration, and identical
invocations on identical inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import descriptor as desc
from . import evalkit, index as indexmod, matcher
from .contour_signature import DEFAULT_BINS
from .errors import ComparabilityError, GridShapeError
from .labeledgrid import GridConfig
from .matcher import DEFAULT_WEIGHTS, WeightVector
from .raster import largest_component, load_image

logger = logging.getLogger("gridshape")


def _grid_size(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 3 or n % 2 == 0:
        raise argparse.ArgumentTypeError("grid size must be odd and >= 3")
    return n


def _tau(text: str) -> float:
    try:
        tau = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < tau <= 1.0:
        raise argparse.ArgumentTypeError("interior threshold must lie in (0, 1]")
    return tau


def _bins(text: str) -> int:
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if m < 8:
        raise argparse.ArgumentTypeError("cdf bins must be >= 8")
    return m


def _weights(text: str) -> WeightVector:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("weights must be three comma-separated values")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight value in {text!r}")
    try:
        return WeightVector(*values)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive_int(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if k < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return k


def _step(text: str) -> float:
    try:
        s = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < s <= 0.5:
        raise argparse.ArgumentTypeError("step must lie in (0, 0.5]")
    return s


def _add_config_flags(p: argparse.ArgumentParser, for_query: bool = False):
    # query/eval inherit config from the index header, so their flags
    # default to None and only act as a consistency check
    p.add_argument("--grid-size", type=_grid_size,
                   default=None if for_query else 21,
                   help="labeled grid side length (odd, >= 3; default 21)")
    p.add_argument("--interior-threshold", type=_tau,
                   default=None if for_query else 0.75,
                   help="cell coverage needed for an Interior label (default 0.75)")
    p.add_argument("--cdf-bins", type=_bins,
                   default=None if for_query else DEFAULT_BINS,
                   help=f"angle bins of the distance signature (default {DEFAULT_BINS})")


def _header(mode, n, tau, bins, weights=None, top_k=None, invert=False,
            exclude_center=False, exclude_self=False, extra=()):
    parts = [
        "# gridshape",
        f"mode={mode}",
        f"grid_size={n}",
        f"interior_threshold={desc.format_float(tau)}",
        f"cdf_bins={bins}",
    ]
    if weights is not None:
        parts.append("weights=" + ",".join(desc.format_float(v)
                                           for v in weights.as_tuple()))
    if top_k is not None:
        parts.append(f"top_k={top_k}")
    parts.append(f"invert={int(invert)}")
    parts.append(f"exclude_center={int(exclude_center)}")
    parts.append(f"exclude_self={int(exclude_self)}")
    parts.extend(extra)
    return " ".join(parts)


def _write_report(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _figure_path(out, mode: str) -> Path:
    if out is None:
        return Path(f"gridshape-{mode}.png")
    return Path(out).with_suffix(".png")


def cmd_extract(args) -> int:
    cfg = GridConfig(n=args.grid_size, tau=args.interior_threshold)
    img = largest_component(
        load_image(args.image, threshold=args.threshold, invert=args.invert)
    )
    stem = Path(args.image).stem
    d = desc.extract(
        img, cfg, args.cdf_bins,
        shape_id=stem,
        class_label=indexmod.class_from_filename(args.image),
        exclude_center=args.exclude_center,
    )
    out = Path(args.out) if args.out else Path(args.image).with_suffix(".gsd")
    out.write_text(desc.serialize(d), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_index(args) -> int:
    cfg = GridConfig(n=args.grid_size, tau=args.interior_threshold)
    ix = indexmod.build_index(
        args.directory, cfg, args.cdf_bins,
        threshold=args.threshold, invert=args.invert,
        exclude_center=args.exclude_center,
    )
    out = Path(args.out) if args.out else Path(args.directory).with_suffix(".gsx")
    indexmod.save_index(ix, out)
    failures = [m for m in ix.source_manifest if m[2] != "ok"]
    print(f"wrote {out}: {len(ix)} entries, {len(failures)} failures")
    for stem, name, status in failures:
        print(f"  {name}: {status}", file=sys.stderr)
    return 0


def _load_index_for(args) -> indexmod.ShapeIndex:
    ix = indexmod.load_index(args.index)
    mismatches = []
    for flag, mine, theirs in (
        ("--grid-size", args.grid_size, ix.n),
        ("--interior-threshold", args.interior_threshold, ix.tau),
        ("--cdf-bins", args.cdf_bins, ix.m),
    ):
        if mine is not None and mine != theirs:
            mismatches.append(f"{flag}: requested {mine}, index built with {theirs}")
    if mismatches:
        raise ComparabilityError(
            "config differs from the index:\n  " + "\n  ".join(mismatches)
        )
    return ix


def cmd_query(args) -> int:
    ix = _load_index_for(args)
    cfg = GridConfig(n=ix.n, tau=ix.tau)
    img = largest_component(
        load_image(args.image, threshold=args.threshold, invert=args.invert)
    )
    q = desc.extract(
        img, cfg, ix.m,
        shape_id=Path(args.image).stem,
        class_label=indexmod.class_from_filename(args.image),
        exclude_center=ix.exclude_center,
    )
    results = matcher.rank(q, ix.entries, args.weights, k=args.top_k)

    lines = [_header("query", ix.n, ix.tau, ix.m, weights=args.weights,
                     top_k=args.top_k, invert=args.invert,
                     exclude_center=ix.exclude_center,
                     extra=(f"query={q.shape_id}",))]
    lines.append("rank,shape_id,class,score")
    for r in results:
        lines.append(f"{r.rank},{r.shape_id},{r.class_label or ''},"
                     f"{desc.format_float(r.score)}")
    _write_report("\n".join(lines) + "\n", args.out)
    return 0


def cmd_eval(args) -> int:
    ix = _load_index_for(args)

    def header(mode, **kw):
        return _header(mode, ix.n, ix.tau, ix.m,
                       exclude_center=ix.exclude_center,
                       exclude_self=args.exclude_self, **kw)

    cutoff = args.top_k if args.top_k is not None else evalkit.BULLSEYE_CUTOFF
    lines = []
    figure = None

    if args.mode == "pr":
        lines.append(header("pr", weights=args.weights,
                            extra=(f"max_k={args.max_k or 'full'}",
                                   f"include_self={int(args.include_self)}")))
        lines.append("query_id,k,precision,recall")
        curves = [
            evalkit.precision_recall(d, ix, args.weights, max_k=args.max_k,
                                     include_self=args.include_self)
            for d in ix.entries
        ]
        for curve in curves:
            for pt in curve.points:
                lines.append(f"{curve.query_id},{pt.k},"
                             f"{desc.format_float(pt.precision)},"
                             f"{desc.format_float(pt.recall)}")
        low, high = evalkit.precision_bands(curves)
        lines.append(f"# mean_precision_recall_below_50 {desc.format_float(low)}")
        lines.append(f"# mean_precision_recall_above_50 {desc.format_float(high)}")
        if args.plot:
            figure = ("pr", curves)
    elif args.mode == "bullseye":
        report = evalkit.bullseye(ix, args.weights, cutoff=cutoff,
                                  exclude_self=args.exclude_self)
        lines.append(header("bullseye", weights=args.weights,
                            extra=(f"cutoff={cutoff}",)))
        lines.append("shape_id,hits")
        for shape_id, hits in report.per_query_hits:
            lines.append(f"{shape_id},{hits}")
        lines.append(f"overall,{desc.format_float(report.overall_score)}")
        if args.plot:
            figure = ("bullseye", report)
    else:  # tune
        best, best_score, results = evalkit.tune_weights(
            ix, step=args.step, cutoff=cutoff, exclude_self=args.exclude_self
        )
        lines.append(header("tune",
                            extra=(f"step={desc.format_float(args.step)}",
                                   f"cutoff={cutoff}")))
        lines.append("w_grid,w_cdf,w_global,score")
        for w, score in results:
            lines.append(",".join(desc.format_float(v) for v in w.as_tuple())
                         + f",{desc.format_float(score)}")
        lines.append("best," + ",".join(desc.format_float(v)
                                        for v in best.as_tuple())
                     + f",{desc.format_float(best_score)}")
        print(
            "best weights: grid={:.9g} cdf={:.9g} global={:.9g} (score {:.9g})"
            .format(*best.as_tuple(), best_score),
            file=sys.stderr,
        )
        if args.plot:
            figure = ("tune", (results, best))

    _write_report("\n".join(lines) + "\n", args.out)

    if figure is not None:
        from . import figures
        path = _figure_path(args.out, args.mode)
        kind, payload = figure
        if kind == "pr":
            figures.save_pr_figure(payload, path)
        elif kind == "bullseye":
            labels = {d.shape_id: d.class_label for d in ix.entries}
            figures.save_bullseye_figure(payload, labels, path)
        else:
            figures.save_tune_figure(payload[0], payload[1], path)
        print(f"wrote {path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridshape",
        description="Grid-based shape descriptors with weighted-ranking retrieval.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_extract = sub.add_parser("extract", help="extract one descriptor to a .gsd file")
    p_extract.add_argument("image")
    _add_config_flags(p_extract)
    p_extract.add_argument("--threshold", type=float, default=0.5,
                           help="binarization gray level in [0, 1]")
    p_extract.add_argument("--invert", action="store_true",
                           help="treat dark pixels as shape")
    p_extract.add_argument("--exclude-center", action="store_true",
                           help="drop the central cell from track statistics")
    p_extract.add_argument("--out", default=None)
    p_extract.set_defaults(func=cmd_extract)

    p_index = sub.add_parser("index", help="build a .gsx index from a directory")
    p_index.add_argument("directory")
    _add_config_flags(p_index)
    p_index.add_argument("--threshold", type=float, default=0.5)
    p_index.add_argument("--invert", action="store_true")
    p_index.add_argument("--exclude-center", action="store_true")
    p_index.add_argument("--out", default=None)
    p_index.set_defaults(func=cmd_index)

    p_query = sub.add_parser("query", help="rank an index against a query image")
    p_query.add_argument("index")
    p_query.add_argument("image")
    _add_config_flags(p_query, for_query=True)
    p_query.add_argument("--threshold", type=float, default=0.5)
    p_query.add_argument("--invert", action="store_true")
    p_query.add_argument("--weights", type=_weights,
                         default=WeightVector(*DEFAULT_WEIGHTS),
                         help="grid,cdf,global fusion weights (default 0.5,0.3,0.2)")
    p_query.add_argument("--top-k", type=_positive_int, default=20)
    p_query.add_argument("--out", default=None)
    p_query.set_defaults(func=cmd_query)

    p_eval = sub.add_parser("eval", help="evaluate retrieval quality of an index")
    p_eval.add_argument("index")
    _add_config_flags(p_eval, for_query=True)
    p_eval.add_argument("--mode", choices=("pr", "bullseye", "tune"),
                        default="bullseye")
    p_eval.add_argument("--weights", type=_weights,
                        default=WeightVector(*DEFAULT_WEIGHTS))
    p_eval.add_argument("--top-k", type=_positive_int, default=None,
                        help="bull's-eye cutoff (default 40)")
    p_eval.add_argument("--max-k", type=_positive_int, default=None,
                        help="largest PR cutoff (default: full index)")
    p_eval.add_argument("--step", type=_step, default=0.05,
                        help="weight lattice granularity for tune mode")
    p_eval.add_argument("--exclude-self", action="store_true",
                        help="drop the query from its own bull's-eye ranking")
    p_eval.add_argument("--include-self", action="store_true",
                        help="keep the query in its own PR ranking")
    p_eval.add_argument("--plot", action="store_true",
                        help="render a matplotlib figure next to the report")
    p_eval.add_argument("--out", default=None)
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GridShapeError, OSError) as exc:
        print(f"gridshape {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
