"""Command-line interface: ``uniformgeom <subcommand> ...``.

Exit codes: 0 success, 1 domain or validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager

from . import __version__
from .bornology import bornology_report, chain_cover
from .chain_graph import build_chain_graph, chain_distance, parse_steps
from .exceptions import MetricValidationError, UniformGeomError
from .metric_builders import build_labeling, build_rho, rho_distance
from .spaces import (
    FAMILIES,
    SpaceSpec,
    dumps_report,
    generate,
    load_distance_csv,
    load_points_csv,
    load_subset_file,
    save_distance_csv,
)
from .verification import SUITES, format_table, run_suite


def _fmt(x: float) -> str:
    return repr(float(f"{x:.12g}"))


def parse_grid(text: str) -> list:
    """``A:B:STEP`` (inclusive) or a comma list of reals."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid range must be A:B:STEP, got {text!r}")
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise argparse.ArgumentTypeError(f"grid range needs STEP > 0 and B >= A, got {text!r}")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [float(f"{a + i * step:.12g}") for i in range(count)]
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return values


def parse_m_grid(text: str) -> list:
    try:
        return [parse_steps(t) for t in text.split(",") if t.strip()]
    except UniformGeomError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def parse_m(text: str):
    try:
        return parse_steps(text)
    except UniformGeomError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be a positive real, got {text}")
    return value


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def parse_params(tokens) -> dict:
    """``key=value`` tokens (comma- or space-separated), or one JSON object."""
    if not tokens:
        return {}
    joined = " ".join(tokens).strip()
    if joined.startswith("{"):
        try:
            return json.loads(joined)
        except json.JSONDecodeError as exc:
            raise argparse.ArgumentTypeError(f"bad JSON params: {exc}")
    params = {}
    for token in joined.replace(",", " ").split():
        if "=" not in token:
            raise argparse.ArgumentTypeError(f"param must be key=value, got {token!r}")
        key, value = token.split("=", 1)
        params[key.strip()] = _coerce(value.strip())
    return params


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load_space(args):
    if getattr(args, "points", False):
        return load_points_csv(args.input, metric=args.metric)
    return load_distance_csv(args.input)


def _add_input(p):
    p.add_argument("--input", required=True, help="distance-matrix CSV (or point CSV with --points)")
    p.add_argument("--points", action="store_true", help="treat --input as one point per row")
    p.add_argument("--metric", choices=("euclidean", "l1", "linf"), default="euclidean")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uniformgeom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an example space as a distance-matrix CSV")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--params", nargs="*", default=[], help="key=value pairs or a JSON object")
    p.add_argument("--seed", type=int)
    p.add_argument("--which", choices=("d", "rho"), default="d", help="sqrt_interval: which metric to write")
    p.add_argument("--out")

    p = sub.add_parser("components", help="count eps-chainable components")
    _add_input(p)
    p.add_argument("--eps", type=positive_float, required=True)
    p.add_argument("--out")

    p = sub.add_parser("chain-dist", help="eps-chain distance between two points")
    _add_input(p)
    p.add_argument("--eps", type=positive_float, required=True)
    p.add_argument("--from", dest="src", type=int, required=True)
    p.add_argument("--to", dest="dst", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("cover", help="cover a subset by (chain-)balls")
    _add_input(p)
    p.add_argument("--subset", help="file with one point index per line (default: all points)")
    p.add_argument("--eps", type=positive_float, required=True)
    p.add_argument("--m", type=parse_m, default=1, help="steps per chain-ball, or 'inf'")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--exact-limit", type=int, default=14)
    p.add_argument("--out")

    p = sub.add_parser("rho", help="label-padded chain metric between two points")
    _add_input(p)
    p.add_argument("--eps", type=positive_float, required=True)
    p.add_argument("--labels", required=True, help="CSV of positive integer labels, one per component")
    p.add_argument("--from", dest="src", type=int, required=True)
    p.add_argument("--to", dest="dst", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("analyze", help="scale profiles and the boundedness report as JSON")
    _add_input(p)
    p.add_argument("--subset", action="append", help="subset file; repeatable (default: all points)")
    p.add_argument("--eps-grid", type=parse_grid, required=True, help="A:B:STEP or comma list")
    p.add_argument("--m-grid", type=parse_m_grid, default=[1, 2, 4, math.inf], help="e.g. 1,2,4,inf")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run the seeded property suites")
    p.add_argument("--suite", choices=("all",) + tuple(SUITES), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, help="override every property's instance count")
    p.add_argument("--out", help="also write the outcome as report JSON")
    return parser


def _read_labels(path) -> list:
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().replace(",", " ").split()
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise UniformGeomError(f"labels file {path}: {exc}") from exc


def cmd_generate(args) -> int:
    spec = SpaceSpec(args.family, parse_params(args.params), args.seed)
    space = generate(spec)
    if isinstance(space, tuple):
        space = space[0] if args.which == "d" else space[1]
    with _output(args.out) as fh:
        save_distance_csv(space, fh)
    return 0


def cmd_components(args) -> int:
    graph = build_chain_graph(_load_space(args), args.eps)
    with _output(args.out) as fh:
        fh.write(f"{graph.component_count} components\n")
        fh.write("sizes: " + " ".join(str(s) for s in graph.component_sizes()) + "\n")
    return 0


def cmd_chain_dist(args) -> int:
    graph = build_chain_graph(_load_space(args), args.eps)
    value = chain_distance(graph, args.src, args.dst)
    with _output(args.out) as fh:
        fh.write(("different-components" if value is None else _fmt(value)) + "\n")
    return 0


def cmd_cover(args) -> int:
    space = _load_space(args)
    subset = load_subset_file(args.subset) if args.subset else range(space.n)
    result = chain_cover(
        space, subset, args.eps, args.m, method="exact" if args.exact else "greedy", exact_limit=args.exact_limit
    )
    payload = {
        "centers": list(result.centers),
        "covered": list(result.covered.indices),
        "eps": float(f"{result.eps:.12g}"),
        "m": "inf" if math.isinf(result.m) else result.m,
        "method": result.method,
        "size": result.size,
    }
    with _output(args.out) as fh:
        fh.write(json.dumps(payload, sort_keys=True) + "\n")
    return 0


def cmd_rho(args) -> int:
    space = _load_space(args)
    graph = build_chain_graph(space, args.eps)
    labeling = build_labeling(graph, _read_labels(args.labels))
    rho = build_rho(space, graph, labeling)
    with _output(args.out) as fh:
        fh.write(_fmt(rho_distance(rho, args.src, args.dst)) + "\n")
    return 0


def cmd_analyze(args) -> int:
    space = _load_space(args)
    if args.subset:
        subsets = [load_subset_file(path) for path in args.subset]
    else:
        subsets = [range(space.n)]
    report = bornology_report(
        space, subsets, args.eps_grid, args.m_grid, method="exact" if args.exact else "greedy"
    )
    with _output(args.out) as fh:
        fh.write(dumps_report(report))
    return 0


def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed, instances=args.instances)
    print(format_table(results))
    failed = sum(r.failures for r in results)
    print(f"{len(results)} properties, {failed} failures")
    if args.out:
        with _output(args.out) as fh:
            fh.write(dumps_report([r.to_dict() for r in results]))
    return 0 if failed == 0 else 1


COMMANDS = {
    "generate": cmd_generate,
    "components": cmd_components,
    "chain-dist": cmd_chain_dist,
    "cover": cmd_cover,
    "rho": cmd_rho,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except MetricValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps(exc.report.to_dict(), sort_keys=True), file=sys.stderr)
        return 1
    except (UniformGeomError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
