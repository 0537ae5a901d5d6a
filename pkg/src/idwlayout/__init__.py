"""Layout-parameterized parallel IDW interpolation.

A point cloud can be materialized in five memory layouts (SoA, AoS, AoaS,
SoAoS, Hybrid) and interpolated by four parallel strategies plus a
sequential reference; an analytic transaction model scores each layout's
coalescing behavior and a benchmark harness times the full grid.
"""

from .core import Params, PointRecord, Precision, idw_predict_seq, squared_distance, weight
from .layouts import (AccessStats, BufferSpec, LayoutKind, LayoutStore, buffer_shapes,
                      build, convert, legal_pairs)
from .strategies import (Accumulator, ExecConfig, RunStats, STRATEGIES, merge_accumulators,
                         reduce_tree, run_naive, run_nested_improved, run_nested_original,
                         run_tiled, strategy_tolerance)
from .transactions import AccessPattern, TransactionReport, count_transactions, layout_scorecard, scorecard_csv
from .bench import (BaselineKey, BenchRecord, BenchSpec, emit_report, generate_cloud,
                    generate_cloud_arrays, report_csv, report_markdown, run_grid,
                    speedup_table, splitmix64, time_run, uniform01, verify_checksums)

__version__ = "0.1.0"

__all__ = [
    "Params", "PointRecord", "Precision", "idw_predict_seq", "squared_distance", "weight",
    "AccessStats", "BufferSpec", "LayoutKind", "LayoutStore", "buffer_shapes", "build",
    "convert", "legal_pairs",
    "Accumulator", "ExecConfig", "RunStats", "STRATEGIES", "merge_accumulators",
    "reduce_tree", "run_naive", "run_nested_improved", "run_nested_original", "run_tiled",
    "strategy_tolerance",
    "AccessPattern", "TransactionReport", "count_transactions", "layout_scorecard",
    "scorecard_csv",
    "BaselineKey", "BenchRecord", "BenchSpec", "emit_report", "generate_cloud",
    "generate_cloud_arrays", "report_csv", "report_markdown", "run_grid", "speedup_table",
    "splitmix64", "time_run", "uniform01", "verify_checksums",
    "__version__",
]
