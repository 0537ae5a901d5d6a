"""Benchmark harness: dataset generation, timed runs, speedups, reports.

Sizes follow the 1K = 1024 convention; the default grid is 10K/50K/100K
with data and query counts equal (the quadratic cost is the workload under
study). 500K/1000K are opt-in. Each configuration is run `warmup` times
untimed, then `repeats` times; the median is the reported statistic and the
local sequential double-precision run is the default speedup baseline
(layout column "-"). Store construction is not part of the timed region.

Point clouds come from a splitmix64 stream (state advances by the 64-bit
golden ratio; the output mix is the standard 30/27/31 xor-multiply
finalizer), consumed record-major as x0,y0,z0,x1,... and mapped to
[lo, hi) intervals. Identical seeds give identical bytes on any platform.
"""

from __future__ import annotations

import io
import statistics
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Params, PointRecord, Precision, idw_predict_seq
from .layouts import LayoutKind, LayoutStore
from .strategies import STRATEGIES, ExecConfig, strategy_tolerance

K = 1024

_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MUL2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """`count` 64-bit words of the splitmix64 stream for `seed`."""
    state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _SM_GAMMA * np.arange(1, count + 1, dtype=np.uint64)
    z = state
    z = (z ^ (z >> np.uint64(30))) * _SM_MUL1
    z = (z ^ (z >> np.uint64(27))) * _SM_MUL2
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) from the top 53 bits of each splitmix64 word."""
    return (splitmix64(seed, count) >> np.uint64(11)) * 2.0 ** -53


def generate_cloud_arrays(n: int, seed: int,
                          bounds: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0),
                          value_range: tuple[float, float] = (0.0, 100.0)):
    """(x, y, z) float64 arrays for a random cloud; see generate_cloud."""
    if n < 1:
        raise ValueError("no data points")
    u = uniform01(seed, 3 * n)
    x0, x1, y0, y1 = bounds
    v0, v1 = value_range
    x = x0 + u[0::3] * (x1 - x0)
    y = y0 + u[1::3] * (y1 - y0)
    z = v0 + u[2::3] * (v1 - v0)
    return x, y, z


def generate_cloud(n: int, seed: int,
                   bounds: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0),
                   value_range: tuple[float, float] = (0.0, 100.0)) -> list[PointRecord]:
    """n random records: coordinates uniform in bounds (xmin, xmax, ymin,
    ymax), z uniform in value_range; fully determined by the seed."""
    x, y, z = generate_cloud_arrays(n, seed, bounds, value_range)
    return [PointRecord(float(a), float(b), float(c)) for a, b, c in zip(x, y, z)]


def query_seed(seed: int) -> int:
    """Seed of the query cloud paired with a data cloud's seed."""
    return (seed + 1) & 0xFFFFFFFFFFFFFFFF


_ALL_STRATEGIES = tuple(STRATEGIES)


@dataclass(frozen=True)
class BaselineKey:
    """Which record divides the others' medians: default the sequential
    double run (strategy "seq"), whose layout is recorded as "-"."""

    strategy: str = "seq"
    layout: str = "-"
    precision: str = "double"


@dataclass
class BenchSpec:
    """One benchmark campaign: the grid plus run policy."""

    sizes: tuple[int, ...] = (10 * K, 50 * K, 100 * K)
    layouts: tuple[LayoutKind, ...] = tuple(LayoutKind)
    strategies: tuple[str, ...] = _ALL_STRATEGIES
    precisions: tuple[Precision, ...] = (Precision.single, Precision.double)
    p: float = 2.0
    repeats: int = 5
    warmup: int = 1
    seed: int = 0
    baseline: BaselineKey = field(default_factory=BaselineKey)

    def __post_init__(self) -> None:
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if any(n < 1 for n in self.sizes):
            raise ValueError("no data points")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown:
            raise ValueError(f"unknown strategies {unknown}")


@dataclass
class BenchRecord:
    """One timed configuration (or an n/a placeholder for an illegal one)."""

    layout: str
    strategy: str
    precision: str
    n: int
    p: float
    times: list[float] = field(default_factory=list)
    median_s: float | None = None
    min_s: float | None = None
    speedup: float | None = None
    checksum: float | None = None
    status: str = "ok"


def _checksum(values: np.ndarray) -> float:
    return float(np.sum(values, dtype=np.float64))


def time_run(layout: LayoutKind | None, strategy: str, precision: Precision,
             data_xyz, queries_xy, p: float = 2.0, repeats: int = 5, warmup: int = 1,
             cfg: ExecConfig | None = None) -> BenchRecord:
    """Warm up, then time `repeats` identical runs of one configuration.

    Illegal layout/precision pairs come back as an "n/a" record instead of
    raising. layout None (with strategy "seq") is the baseline row.
    """
    layout_name = layout.value if layout is not None else "-"
    n = queries_xy[0].shape[0]
    rec = BenchRecord(layout_name, strategy, precision.value, n, p)
    if layout is not None and not layout.legal_for(precision):
        rec.status = "n/a"
        return rec

    params = Params(p=p)
    cfg = cfg or ExecConfig()
    x, y, z = data_xyz
    qx, qy = queries_xy
    queries = np.column_stack([qx, qy])

    if strategy == "seq":
        data = np.column_stack([x, y, z])

        def once():
            return idw_predict_seq(data, queries, params, precision)
    else:
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategies ['{strategy}']")
        store = LayoutStore.from_arrays(x, y, z, layout, precision)
        runner = STRATEGIES[strategy]

        def once():
            return runner(store, queries, params, cfg)

    values = None
    for _ in range(warmup):
        values = once()
    for _ in range(repeats):
        t0 = time.perf_counter()
        values = once()
        rec.times.append(time.perf_counter() - t0)
    rec.median_s = statistics.median(rec.times)
    rec.min_s = min(rec.times)
    rec.checksum = _checksum(values)
    return rec


def run_grid(spec: BenchSpec, cfg: ExecConfig | None = None) -> list[BenchRecord]:
    """The full campaign: per size, a baseline row plus every layout x
    strategy x precision row (illegal ones recorded as n/a), with speedups
    resolved against the spec's baseline."""
    records: list[BenchRecord] = []
    for n in spec.sizes:
        data = generate_cloud_arrays(n, spec.seed)
        qspx, qspy, _ = generate_cloud_arrays(n, query_seed(spec.seed))
        queries = (qspx, qspy)
        records.append(time_run(None, "seq", Precision.double, data, queries,
                                spec.p, spec.repeats, spec.warmup, cfg))
        for precision in spec.precisions:
            for layout in spec.layouts:
                for strategy in spec.strategies:
                    records.append(time_run(layout, strategy, precision, data, queries,
                                            spec.p, spec.repeats, spec.warmup, cfg))
    return speedup_table(records, spec.baseline)


def speedup_table(records: Sequence[BenchRecord], baseline: BaselineKey) -> list[BenchRecord]:
    """Records with speedup = baseline median / own median, per size; the
    baseline row itself gets exactly 1.0."""
    by_n: dict[int, BenchRecord] = {}
    for r in records:
        if (r.strategy == baseline.strategy and r.layout == baseline.layout
                and r.precision == baseline.precision and r.status == "ok"):
            by_n[r.n] = r
    out = []
    for r in records:
        if r.status != "ok":
            out.append(replace_record(r, speedup=None))
            continue
        base = by_n.get(r.n)
        if base is None:
            raise ValueError("baseline not found")
        out.append(replace_record(r, speedup=base.median_s / r.median_s))
    return out


def replace_record(r: BenchRecord, **kw) -> BenchRecord:
    new = BenchRecord(r.layout, r.strategy, r.precision, r.n, r.p, list(r.times),
                      r.median_s, r.min_s, r.speedup, r.checksum, r.status)
    for k, v in kw.items():
        setattr(new, k, v)
    return new


_CSV_HEADER = "layout,strategy,precision,n,p,median_s,min_s,speedup,checksum"


def report_csv(records: Sequence[BenchRecord]) -> str:
    out = io.StringIO()
    out.write(_CSV_HEADER + "\n")
    for r in records:
        if r.status == "n/a":
            tail = "n/a,n/a,n/a,n/a"
        else:
            speedup = "" if r.speedup is None else repr(r.speedup)
            tail = f"{r.median_s!r},{r.min_s!r},{speedup},{r.checksum!r}"
        out.write(f"{r.layout},{r.strategy},{r.precision},{r.n},{r.p!r},{tail}\n")
    return out.getvalue()


def report_markdown(records: Sequence[BenchRecord]) -> str:
    """CSV-equivalent table plus, per strategy/precision/size, which layout
    came out fastest -- a hardware-dependent observation, never a gate."""
    out = io.StringIO()
    out.write("# IDW layout benchmark\n\n")
    out.write("| " + " | ".join(_CSV_HEADER.split(",")) + " |\n")
    out.write("|" + "---|" * 9 + "\n")
    for r in records:
        if r.status == "n/a":
            cells = [r.layout, r.strategy, r.precision, str(r.n), repr(r.p), "n/a", "n/a", "n/a", "n/a"]
        else:
            cells = [r.layout, r.strategy, r.precision, str(r.n), repr(r.p),
                     f"{r.median_s:.6g}", f"{r.min_s:.6g}",
                     "" if r.speedup is None else f"{r.speedup:.3f}",
                     f"{r.checksum:.10g}"]
        out.write("| " + " | ".join(cells) + " |\n")
    out.write("\n## Fastest layout per strategy (hardware-dependent observation)\n\n")
    grouped: dict[tuple[str, str, int], list[BenchRecord]] = {}
    for r in records:
        if r.status == "ok" and r.layout != "-":
            grouped.setdefault((r.strategy, r.precision, r.n), []).append(r)
    for (strategy, precision, n), rows in sorted(grouped.items()):
        best = min(rows, key=lambda r: r.median_s)
        order = ", ".join(f"{r.layout}={r.median_s:.6g}s" for r in sorted(rows, key=lambda r: r.median_s))
        out.write(f"- {strategy}/{precision}/n={n}: fastest = {best.layout} ({order})\n")
    return out.getvalue()


def emit_report(records: Sequence[BenchRecord], path, format: str = "csv") -> None:
    """Write the report; CSV for machines, markdown adds the ordering notes."""
    if format == "csv":
        text = report_csv(records)
    elif format == "markdown":
        text = report_markdown(records)
    else:
        raise ValueError(f"unknown report format {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def verify_checksums(records: Sequence[BenchRecord]) -> None:
    """Cross-layout correctness premise: same seed + strategy tolerance =>
    checksums agree across layouts. Raises on violation."""
    ok = [r for r in records if r.status == "ok" and r.layout != "-"]
    by_key: dict[tuple[str, int], list[BenchRecord]] = {}
    for r in ok:
        by_key.setdefault((r.precision, r.n), []).append(r)
    for (precision, n), rows in by_key.items():
        tol = strategy_tolerance(Precision(precision), n)
        ref = rows[0].checksum
        for r in rows[1:]:
            if abs(r.checksum - ref) > tol * max(1.0, abs(ref)):
                raise AssertionError(
                    f"checksum mismatch at {r.layout}/{r.strategy}/{precision}/n={n}: "
                    f"{r.checksum} vs {ref}")
