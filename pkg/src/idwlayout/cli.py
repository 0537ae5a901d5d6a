"""Command-line front end.

Subcommands: gen, run, bench, analyze, convert. Size arguments accept the
k/K suffix meaning x1024 (10k = 10240). A JSON --config file may hold any
subcommand flag (keys named like the flags, underscores for dashes); flags
given on the command line win. Every invocation prints its fully resolved
configuration on one "config:" line.

Exit codes: 0 success, 1 I/O failure, 2 usage or legality error. The
IDW_THREADS environment variable, when set, overrides the worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import BenchSpec, emit_report, generate_cloud, run_grid
from .core import Params, Precision, idw_predict_seq
from .layouts import LayoutKind, LayoutStore
from .pointio import read_points_csv, read_queries_csv, write_points_csv, write_predictions_csv
from .strategies import STRATEGIES, ExecConfig
from .transactions import count_transactions, AccessPattern, scorecard_csv

_LAYOUT_NAMES = [k.value for k in LayoutKind]
_STRATEGY_NAMES = ["seq"] + [s.replace("_", "-") for s in STRATEGIES]


def parse_size(text: str) -> int:
    """'10k' -> 10240; bare integers pass through."""
    t = str(text).strip()
    if t.lower().endswith("k"):
        return int(t[:-1]) * 1024
    return int(t)


def parse_size_list(text: str) -> tuple[int, ...]:
    return tuple(parse_size(part) for part in str(text).split(",") if part.strip())


def parse_components(text: str) -> tuple[str, ...]:
    t = str(text).replace(",", "").strip()
    return tuple(dict.fromkeys(t))


def _canon_strategy(name: str) -> str:
    return name.replace("-", "_")


def resolve_threads(value) -> int | None:
    env = os.environ.get("IDW_THREADS")
    if env is not None:
        return int(env)
    return int(value) if value is not None else None


def _is_dump(path) -> bool:
    try:
        with open(path, "rb") as fh:
            return fh.read(4) == b"IDWL"
    except OSError:
        return False


def _print_config(args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config", "required")}
    print("config:", json.dumps(cfg, sort_keys=True, default=str))


def _load_store(path, layout: str | None, precision: str) -> LayoutStore:
    if _is_dump(path):
        store = LayoutStore.load(path)
        if layout is not None and store.kind is not LayoutKind.parse(layout):
            store = store.convert(LayoutKind.parse(layout))
        return store
    records = read_points_csv(path)
    kind = LayoutKind.parse(layout or "soa")
    return LayoutStore.build(records, kind, Precision.parse(precision))


# -- subcommands ----------------------------------------------------------

def cmd_gen(args) -> int:
    _print_config(args)
    n = parse_size(args.n)
    if n < 1:
        raise ValueError("no data points")
    records = generate_cloud(n, args.seed)
    if args.format == "csv":
        write_points_csv(args.out, records)
    else:
        LayoutStore.build(records, LayoutKind.SoA, Precision.double).dump(args.out)
    print(f"wrote {args.out} ({n} records, {args.format})")
    return 0


def cmd_run(args) -> int:
    _print_config(args)
    precision = Precision.parse(args.precision)
    params = Params(p=args.p)
    queries = read_queries_csv(args.queries)
    strategy = _canon_strategy(args.strategy)
    if strategy == "seq":
        if _is_dump(args.data):
            records = LayoutStore.load(args.data).records()
        else:
            records = read_points_csv(args.data)
        values = idw_predict_seq(records, queries, params, precision)
    else:
        store = _load_store(args.data, args.layout, args.precision)
        if store.precision is not precision:
            raise ValueError(f"data file is {store.precision.value} precision, requested {precision.value}")
        cfg = ExecConfig(group_size=args.group_size,
                         tile_size=args.tile_size,
                         parallel_width=resolve_threads(args.threads))
        values = STRATEGIES[strategy](store, queries, params, cfg)
    write_predictions_csv(args.out, queries, values)
    print(f"wrote {args.out} ({len(queries)} predictions)")
    return 0


def cmd_bench(args) -> int:
    _print_config(args)
    layouts = tuple(LayoutKind) if args.layouts == "all" else tuple(
        LayoutKind.parse(s) for s in args.layouts.split(","))
    strategies = tuple(STRATEGIES) if args.strategies == "all" else tuple(
        _canon_strategy(s) for s in args.strategies.split(","))
    precisions = ((Precision.single, Precision.double) if args.precisions == "all"
                  else tuple(Precision.parse(s) for s in args.precisions.split(",")))
    spec = BenchSpec(sizes=parse_size_list(args.sizes), layouts=layouts,
                     strategies=strategies, precisions=precisions, p=args.p,
                     repeats=args.repeats, warmup=args.warmup, seed=args.seed)
    cfg = ExecConfig(group_size=args.group_size,
                     parallel_width=resolve_threads(args.threads))
    records = run_grid(spec, cfg)
    emit_report(records, args.out, "csv")
    print(f"wrote {args.out} ({len(records)} rows)")
    if args.report:
        emit_report(records, args.report, "markdown")
        print(f"wrote {args.report}")
    return 0


def cmd_analyze(args) -> int:
    _print_config(args)
    components = parse_components(args.components)
    precision = Precision.parse(args.precision)
    if args.layout == "all":
        text = scorecard_csv(precision, components, args.warp, args.segment)
    else:
        kind = LayoutKind.parse(args.layout)
        rep = count_transactions(AccessPattern(kind, precision, components,
                                               args.warp, args.segment))
        comp_str = "".join(c for c in "xyz" if c in components)
        text = ("layout,precision,components,warp,segment_bytes,"
                "segments,useful_bytes,fetched_bytes,utilization\n"
                f"{kind.value},{precision.value},{comp_str},{args.warp},{args.segment},"
                f"{rep.segments},{rep.useful_bytes},{rep.fetched_bytes},{rep.utilization!r}\n")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_convert(args) -> int:
    _print_config(args)
    out_is_csv = str(args.out).lower().endswith(".csv")
    if _is_dump(args.infile):
        store = LayoutStore.load(args.infile)
        if args.from_ is not None and LayoutKind.parse(args.from_) is not store.kind:
            raise ValueError(f"input dump is {store.kind.value}, not {args.from_}")
        if args.precision is not None and Precision.parse(args.precision) is not store.precision:
            raise ValueError(f"input dump is {store.precision.value} precision")
        if out_is_csv:
            write_points_csv(args.out, store.records())
        else:
            store.convert(LayoutKind.parse(args.to)).dump(args.out)
    else:
        records = read_points_csv(args.infile)
        if out_is_csv:
            write_points_csv(args.out, records)
        else:
            precision = Precision.parse(args.precision or "double")
            LayoutStore.build(records, LayoutKind.parse(args.to), precision).dump(args.out)
    print(f"wrote {args.out}")
    return 0


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idwlayout", allow_abbrev=False,
        description="Layout-parameterized parallel IDW interpolation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON file of flag defaults")

    p = sub.add_parser("gen", help="generate a random point cloud file")
    common(p)
    p.add_argument("--n", default=None, help="record count (k suffix = x1024)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "bin"], default="csv",
                   help="bin writes an SoA/double layout dump")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="interpolate queries against a data file")
    common(p)
    p.add_argument("--data", default=None, help="points CSV or layout dump")
    p.add_argument("--queries", default=None, help="CSV with header x,y (or x,y,z)")
    p.add_argument("--layout", choices=_LAYOUT_NAMES, default=None)
    p.add_argument("--strategy", choices=_STRATEGY_NAMES, default="naive")
    p.add_argument("--precision", choices=["single", "double"], default="double")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--group-size", type=int, default=1024)
    p.add_argument("--tile-size", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run, required=("data", "queries", "out"))

    p = sub.add_parser("bench", help="time the layout x strategy x precision grid")
    common(p)
    p.add_argument("--sizes", default="10k,50k,100k")
    p.add_argument("--layouts", default="all")
    p.add_argument("--strategies", default="all")
    p.add_argument("--precisions", default="all")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--group-size", type=int, default=1024)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None, help="report CSV path")
    p.add_argument("--report", default=None, help="optional markdown report path")
    p.set_defaults(func=cmd_bench, required=("out",))

    p = sub.add_parser("analyze", help="memory-transaction scorecard")
    common(p)
    p.add_argument("--layout", choices=_LAYOUT_NAMES + ["all"], default="all")
    p.add_argument("--precision", choices=["single", "double"], default="double")
    p.add_argument("--components", default="xyz", help='subset of xyz, e.g. "x" or "x,z"')
    p.add_argument("--warp", type=int, default=32)
    p.add_argument("--segment", type=int, default=128)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("convert", help="convert point files between layouts/formats")
    common(p)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--from", dest="from_", choices=_LAYOUT_NAMES, default=None)
    p.add_argument("--to", choices=_LAYOUT_NAMES, default="soa")
    p.add_argument("--precision", choices=["single", "double"], default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_convert, required=("infile", "out"))

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            overrides = json.load(fh)
        valid = set(vars(args))
        unknown = sorted(set(overrides) - valid)
        if unknown:
            raise ValueError(f"unknown config keys {unknown}")
        for key, value in overrides.items():
            flag = "--" + key.replace("_", "-")
            if key == "infile":
                flag = "--in"
            if key == "from_":
                flag = "--from"
            if flag not in argv:
                setattr(args, key, value)
    for key in getattr(args, "required", ()):
        if getattr(args, key) is None:
            flag = {"infile": "--in"}.get(key, "--" + key.replace("_", "-"))
            raise ValueError(f"missing required argument {flag}")
    return args


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
