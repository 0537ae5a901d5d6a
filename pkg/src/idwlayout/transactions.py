"""Analytic model of coalesced memory transactions.

A warp of W consecutive lanes reads the requested components of points
base_offset .. base_offset+W-1. Each element read touches its byte range in
its buffer; byte ranges map to S-byte aligned segments; the report counts
the distinct segments and the useful-vs-fetched byte ratio. Buffers are
assumed S-aligned at index 0 and never share segments with each other.

This is a pure segment-counting model: no caches, no sectors, no replays.
Misaligned packed records may straddle segment boundaries and the true
touched segments are counted -- that straddling is exactly what separates
the packed layout from its padded, aligned variant.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .core import Precision
from .layouts import LayoutKind, buffer_shapes

_VALID_COMPONENTS = ("x", "y", "z")


@dataclass(frozen=True)
class AccessPattern:
    """One warp-shaped read: layout, precision, component subset, warp width
    W, segment granularity S (power of two >= 32), starting point index."""

    layout: LayoutKind
    precision: Precision
    components: tuple[str, ...]
    warp: int = 32
    segment_bytes: int = 128
    base_offset: int = 0

    def __post_init__(self) -> None:
        comps = tuple(dict.fromkeys(self.components))
        if not comps:
            raise ValueError("empty component set")
        unknown = [c for c in comps if c not in _VALID_COMPONENTS]
        if unknown:
            raise ValueError(f"unknown components {unknown}")
        object.__setattr__(self, "components", comps)
        if self.warp < 1:
            raise ValueError("warp must be >= 1")
        s = self.segment_bytes
        if s < 32 or (s & (s - 1)) != 0:
            raise ValueError("segment_bytes must be a power of two >= 32")
        if self.base_offset < 0:
            raise ValueError("base_offset must be >= 0")


@dataclass(frozen=True)
class TransactionReport:
    segments: int
    useful_bytes: int
    fetched_bytes: int
    utilization: float


def count_transactions(pattern: AccessPattern) -> TransactionReport:
    """Distinct S-byte segments touched by the pattern, plus utilization."""
    e = pattern.precision.itemsize
    S = pattern.segment_bytes
    n_points = pattern.base_offset + pattern.warp
    shapes = buffer_shapes(pattern.layout, pattern.precision, n_points)
    segments: set[tuple[int, int]] = set()
    for lane in range(pattern.warp):
        i = pattern.base_offset + lane
        for comp in pattern.components:
            for b, spec in enumerate(shapes):
                if comp not in spec.offsets:
                    continue
                start = i * spec.stride + spec.offsets[comp]
                for seg in range(start // S, (start + e - 1) // S + 1):
                    segments.add((b, seg))
    useful = pattern.warp * e * len(pattern.components)
    fetched = len(segments) * S
    return TransactionReport(len(segments), useful, fetched, useful / fetched)


def layout_scorecard(precision: Precision, components, warp: int = 32,
                     segment_bytes: int = 128, base_offset: int = 0
                     ) -> list[tuple[LayoutKind, TransactionReport | None]]:
    """count_transactions for every layout, in enum order; layouts illegal
    at this precision yield a None report (rendered as an n/a row)."""
    comps = tuple(components)
    rows: list[tuple[LayoutKind, TransactionReport | None]] = []
    for kind in LayoutKind:
        if not kind.legal_for(precision):
            rows.append((kind, None))
            continue
        pat = AccessPattern(kind, precision, comps, warp, segment_bytes, base_offset)
        rows.append((kind, count_transactions(pat)))
    return rows


def scorecard_csv(precision: Precision, components, warp: int = 32,
                  segment_bytes: int = 128, base_offset: int = 0) -> str:
    """The scorecard as CSV text (components rendered as a compact subset
    string, e.g. "xz", to keep the column comma-free)."""
    comps = tuple(components)
    comp_str = "".join(c for c in _VALID_COMPONENTS if c in comps)
    out = io.StringIO()
    out.write("layout,precision,components,warp,segment_bytes,segments,useful_bytes,fetched_bytes,utilization\n")
    for kind, rep in layout_scorecard(precision, comps, warp, segment_bytes, base_offset):
        lead = f"{kind.value},{precision.value},{comp_str},{warp},{segment_bytes}"
        if rep is None:
            out.write(f"{lead},n/a,n/a,n/a,n/a\n")
        else:
            out.write(f"{lead},{rep.segments},{rep.useful_bytes},{rep.fetched_bytes},{rep.utilization!r}\n")
    return out.getvalue()
