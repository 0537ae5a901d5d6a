"""Parallel execution strategies over a LayoutStore.

All four are contract-equivalent to the sequential reference predictor:

    naive            one independent task per query, full scan of the data
    tiled            query groups of G; data staged once per group in
                     tiles of T into contiguous scratch, then folded
    nested_original  per query, lane groups of G single-point accumulators
                     are tree-reduced and merged serially into one shared
                     accumulator (a contended merge point; merges counted)
    nested_improved  per query, one fixed group of G workers with strided
                     private accumulation and a single tree reduction; no
                     shared accumulator exists

Parallelism is internal: queries are split into fixed-size blocks handed to
a thread pool of `parallel_width` workers. Block boundaries are a function
of the workload only, never of the worker count, and every reduction uses a
fixed adjacent-pairing tree, so results are bit-identical across
parallel_width. Accumulation per query is left-to-right for naive/tiled
(bit-equal to the sequential pass); the nested strategies reassociate and
are held to the tolerance table instead.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .core import Params, Precision, _as_query_array, ensure_finite
from .layouts import LayoutStore

_NAIVE_BLOCK = 256
_NESTED_BLOCK = 64


@dataclass(frozen=True)
class ExecConfig:
    """Strategy parameters.

    group_size: workers per group (G); tile_size: data points per staged
    tile (T, defaults to G); parallel_width: OS-level worker threads
    (defaults to the machine's cores); deterministic_reduction asserts the
    fixed-tree guarantee (this implementation is deterministic either way).
    """

    group_size: int = 1024
    tile_size: int | None = None
    parallel_width: int | None = None
    deterministic_reduction: bool = True

    def __post_init__(self) -> None:
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if self.tile_size is None:
            object.__setattr__(self, "tile_size", self.group_size)
        if self.tile_size < 1:
            raise ValueError("tile_size must be >= 1")
        if self.parallel_width is None:
            object.__setattr__(self, "parallel_width", os.cpu_count() or 1)
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be >= 1")


@dataclass
class Accumulator:
    """Partial IDW state: running weight and weighted-value sums plus the
    lowest coincident data-point index seen (None if none)."""

    sum_w: float = 0.0
    sum_wz: float = 0.0
    hit_index: int | None = None


def merge_accumulators(a: Accumulator, b: Accumulator) -> Accumulator:
    if a.hit_index is None:
        hit = b.hit_index
    elif b.hit_index is None:
        hit = a.hit_index
    else:
        hit = min(a.hit_index, b.hit_index)
    return Accumulator(a.sum_w + b.sum_w, a.sum_wz + b.sum_wz, hit)


def reduce_tree(partials: Sequence[Accumulator]) -> Accumulator:
    """Balanced adjacent-pairing merge: ((a+b)+(c+d)) for four, with an odd
    tail passed through unchanged. The shape depends only on the length, so
    the result is bit-reproducible for a given input list."""
    items = list(partials)
    if not items:
        raise ValueError("empty reduction")
    while len(items) > 1:
        merged = [merge_accumulators(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


@dataclass
class RunStats:
    """Optional per-run instrumentation a caller can collect.

    merge_events: shared-accumulator merges (nested_original only; the
    improved variant must record zero). worker_trips: strided-loop slots
    each worker of one group executed for a single query (nested_improved;
    length G, every entry ceil(n/G)).
    """

    merge_events: int = 0
    worker_trips: np.ndarray | None = None


def strategy_tolerance(precision: Precision, n: int) -> float:
    """Max relative error vs. the double sequential oracle."""
    if precision is Precision.double:
        return 1e-9
    return 1e-4 if n <= 256 else 1e-3


def _prepare(store: LayoutStore, queries, params: Params):
    qs = _as_query_array(queries)
    ensure_finite(qs)
    if store.count == 0:
        raise ValueError("no data points")
    dt = store.precision.dtype
    qx = np.ascontiguousarray(qs[:, 0].astype(dt, copy=False))
    qy = np.ascontiguousarray(qs[:, 1].astype(dt, copy=False))
    scal = kernels.scalar_args(params.p, params.zero_eps, dt)
    return qx, qy, scal


def _blocks(m: int, size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, m)) for lo in range(0, m, size)]


def _run_tasks(tasks, fn: Callable, parallel_width: int) -> list:
    if parallel_width <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=parallel_width) as pool:
        return list(pool.map(fn, tasks))


def run_naive(store: LayoutStore, queries, params: Params = Params(),
              cfg: ExecConfig | None = None, instrumentation: RunStats | None = None) -> np.ndarray:
    """Flat parallelism: every query task scans all n data points."""
    cfg = cfg or ExecConfig()
    qx, qy, (fast, wexp, zero_eps, zero, one) = _prepare(store, queries, params)
    m = qx.shape[0]
    n = store.count
    out = np.empty(m, dtype=store.precision.dtype)
    if m == 0:
        return out
    xs, ys, zs = store.component_views()

    def task(block):
        lo, hi = block
        kernels.predict_block(qx, qy, xs, ys, zs, fast, wexp, zero_eps, zero, one, out, lo, hi)
        store.stats.add_reads((hi - lo) * n, (hi - lo) * n, (hi - lo) * n)

    _run_tasks(_blocks(m, _NAIVE_BLOCK), task, cfg.parallel_width)
    return out


def run_tiled(store: LayoutStore, queries, params: Params = Params(),
              cfg: ExecConfig | None = None, instrumentation: RunStats | None = None) -> np.ndarray:
    """Query groups of G against data tiles of T staged once per group into
    group-local contiguous scratch; each staged element is read once per
    group no matter how many queries the group holds."""
    cfg = cfg or ExecConfig()
    qx, qy, (fast, wexp, zero_eps, zero, one) = _prepare(store, queries, params)
    m = qx.shape[0]
    n = store.count
    dt = store.precision.dtype
    out = np.empty(m, dtype=dt)
    if m == 0:
        return out
    T = cfg.tile_size
    sum_w = np.zeros(m, dtype=dt)
    sum_wz = np.zeros(m, dtype=dt)
    hit = np.full(m, kernels.NO_HIT, dtype=np.int64)
    hit_z = np.zeros(m, dtype=dt)

    def task(block):
        lo, hi = block
        scratch = (np.empty(T, dt), np.empty(T, dt), np.empty(T, dt))
        for t_lo in range(0, n, T):
            t_hi = min(t_lo + T, n)
            tx, ty, tz = store.load_tile(t_lo, t_hi, out=scratch)
            kernels.tile_accumulate(qx, qy, tx, ty, tz, t_lo, fast, wexp, zero_eps,
                                    zero, one, sum_w, sum_wz, hit, hit_z, lo, hi)
        kernels.finalize_block(sum_w, sum_wz, hit, hit_z, out, lo, hi)

    _run_tasks(_blocks(m, cfg.group_size), task, cfg.parallel_width)
    return out


def run_nested_original(store: LayoutStore, queries, params: Params = Params(),
                        cfg: ExecConfig | None = None, instrumentation: RunStats | None = None) -> np.ndarray:
    """Two-level nesting with a shared per-query accumulator: ceil(n/G) lane
    groups are each tree-reduced, then merged serially into the shared
    accumulator (one counted merge event per group partial)."""
    cfg = cfg or ExecConfig()
    qx, qy, (fast, wexp, zero_eps, zero, one) = _prepare(store, queries, params)
    m = qx.shape[0]
    n = store.count
    out = np.empty(m, dtype=store.precision.dtype)
    if m == 0:
        if instrumentation is not None:
            instrumentation.merge_events = 0
        return out
    xs, ys, zs = store.component_views()
    G = cfg.group_size

    def task(block):
        lo, hi = block
        wp, wzp, hitp, hzp = kernels.identity_scratch(G, store.precision.dtype)
        merges = np.zeros(1, dtype=np.int64)
        kernels.nested_original_block(qx, qy, xs, ys, zs, G, fast, wexp, zero_eps,
                                      zero, one, wp, wzp, hitp, hzp, out, merges, lo, hi)
        store.stats.add_reads((hi - lo) * n, (hi - lo) * n, (hi - lo) * n)
        return int(merges[0])

    merge_counts = _run_tasks(_blocks(m, _NESTED_BLOCK), task, cfg.parallel_width)
    if instrumentation is not None:
        instrumentation.merge_events = sum(merge_counts)
    return out


def run_nested_improved(store: LayoutStore, queries, params: Params = Params(),
                        cfg: ExecConfig | None = None, instrumentation: RunStats | None = None) -> np.ndarray:
    """One group of G workers per query: worker t privately accumulates the
    strided points t, t+G, ..., then a single tree reduction combines the
    private partials. Structurally merge-free (zero merge events)."""
    cfg = cfg or ExecConfig()
    qx, qy, (fast, wexp, zero_eps, zero, one) = _prepare(store, queries, params)
    m = qx.shape[0]
    n = store.count
    out = np.empty(m, dtype=store.precision.dtype)
    G = cfg.group_size
    trips = np.zeros(G, dtype=np.int64)
    if instrumentation is not None:
        instrumentation.merge_events = 0
        instrumentation.worker_trips = trips
    if m == 0:
        return out
    xs, ys, zs = store.component_views()

    def task(block):
        lo, hi = block
        wp, wzp, hitp, hzp = kernels.identity_scratch(G, store.precision.dtype)
        kernels.nested_improved_block(qx, qy, xs, ys, zs, G, fast, wexp, zero_eps, zero, one,
                                      wp, wzp, hitp, hzp, out, trips, lo == 0, lo, hi)
        store.stats.add_reads((hi - lo) * n, (hi - lo) * n, (hi - lo) * n)

    _run_tasks(_blocks(m, _NESTED_BLOCK), task, cfg.parallel_width)
    return out


STRATEGIES: dict[str, Callable] = {
    "naive": run_naive,
    "tiled": run_tiled,
    "nested_original": run_nested_original,
    "nested_improved": run_nested_improved,
}
