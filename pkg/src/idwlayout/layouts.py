"""Point-cloud stores in five memory layouts with exact byte-level shapes.

Shape table (e = element size: 4 single, 8 double; n = point count):

    SoA     three dense arrays x[n], y[n], z[n], stride e each
    AoS     one array of packed {x, y, z} records, stride 3e, no padding
    AoaS    one array of {x, y, z, pad} records, stride 4e
            (16-byte stride single, 32-byte stride double; pad written as
            zero, never read as data)
    SoAoS   double only: array A of aligned {x, y} pairs (16-byte stride)
            plus array B of {z, pad} records (16-byte stride)
    Hybrid  double only: array A of aligned {x, y} pairs (16-byte stride)
            plus a plain value array z[n] (stride 8)

All buffer bases are aligned to at least 16 bytes (actually 64 here). Reads
through the accessor API bump per-component counters by exactly one per
element; bulk tile loads count each element once. Stores are immutable
after build except the counters.

Binary dump format (little-endian): magic "IDWL", u8 layout kind, u8
precision, u64 count, then the raw buffers in shape-table order.
"""

from __future__ import annotations

import enum
import struct
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import PointRecord, Precision, ensure_finite

_ALIGN = 64
_MAGIC = b"IDWL"
_HEADER = struct.Struct("<4sBBQ")

_COMPONENTS = ("x", "y", "z")


class LayoutKind(enum.Enum):
    SoA = "soa"
    AoS = "aos"
    AoaS = "aoas"
    SoAoS = "soaos"
    Hybrid = "hybrid"

    @property
    def requires_double(self) -> bool:
        return self in (LayoutKind.SoAoS, LayoutKind.Hybrid)

    def legal_for(self, precision: Precision) -> bool:
        return precision is Precision.double or not self.requires_double

    @classmethod
    def parse(cls, name: str) -> "LayoutKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown layout {name!r}") from None


_KIND_CODES = {k: i for i, k in enumerate(LayoutKind)}
_PRECISION_CODES = {Precision.single: 0, Precision.double: 1}


@dataclass(frozen=True)
class BufferSpec:
    """One contiguous buffer of the store: stride and field offsets in bytes."""

    name: str
    stride: int
    nbytes: int
    offsets: dict[str, int]
    pad_offsets: tuple[int, ...] = ()


def check_legal(kind: LayoutKind, precision: Precision) -> None:
    if not kind.legal_for(precision):
        raise ValueError("layout requires double precision")


def buffer_shapes(kind: LayoutKind, precision: Precision, count: int) -> list[BufferSpec]:
    """The byte-exact shape table for one (kind, precision, count)."""
    check_legal(kind, precision)
    e = precision.itemsize
    n = count
    if kind is LayoutKind.SoA:
        return [BufferSpec(c, e, n * e, {c: 0}) for c in _COMPONENTS]
    if kind is LayoutKind.AoS:
        return [BufferSpec("xyz", 3 * e, n * 3 * e, {"x": 0, "y": e, "z": 2 * e})]
    if kind is LayoutKind.AoaS:
        return [BufferSpec("xyzp", 4 * e, n * 4 * e, {"x": 0, "y": e, "z": 2 * e}, (3 * e,))]
    if kind is LayoutKind.SoAoS:
        return [
            BufferSpec("xy", 16, n * 16, {"x": 0, "y": 8}),
            BufferSpec("zp", 16, n * 16, {"z": 0}, (8,)),
        ]
    return [
        BufferSpec("xy", 16, n * 16, {"x": 0, "y": 8}),
        BufferSpec("z", 8, n * 8, {"z": 0}),
    ]


def _aligned_zeros(nbytes: int) -> np.ndarray:
    raw = np.zeros(nbytes + _ALIGN, dtype=np.uint8)
    off = (-raw.ctypes.data) % _ALIGN
    return raw[off:off + nbytes]


class AccessStats:
    """Per-component element-read counters; safe to bump from worker threads."""

    def __init__(self, itemsize: int):
        self._itemsize = itemsize
        self._lock = threading.Lock()
        self.reads_x = 0
        self.reads_y = 0
        self.reads_z = 0

    @property
    def bytes_touched(self) -> int:
        """Modeled useful bytes: element reads x element size, pads excluded."""
        return (self.reads_x + self.reads_y + self.reads_z) * self._itemsize

    def add_reads(self, x: int = 0, y: int = 0, z: int = 0) -> None:
        with self._lock:
            self.reads_x += x
            self.reads_y += y
            self.reads_z += z

    def snapshot(self) -> tuple[int, int, int]:
        with self._lock:
            return (self.reads_x, self.reads_y, self.reads_z)

    def reset(self) -> None:
        with self._lock:
            self.reads_x = self.reads_y = self.reads_z = 0


class LayoutStore:
    """A point cloud materialized in one layout, with instrumented access.

    Values are immutable after build; only the read counters mutate. The
    raw byte buffers are exposed (`buffers`) for dumps and for the pad
    fuzzing the inertness tests perform.
    """

    def __init__(self, kind: LayoutKind, precision: Precision, count: int,
                 buffers: list[np.ndarray], shapes: list[BufferSpec]):
        self.kind = kind
        self.precision = precision
        self.count = count
        self.buffers = buffers
        self.shapes = shapes
        self.stats = AccessStats(precision.itemsize)
        self._views = self._make_views()

    def _make_views(self) -> dict[str, np.ndarray]:
        dt = self.precision.dtype
        e = self.precision.itemsize
        views: dict[str, np.ndarray] = {}
        for buf, spec in zip(self.buffers, self.shapes):
            typed = buf.view(dt)
            step = spec.stride // e
            for comp, off in spec.offsets.items():
                views[comp] = typed[off // e::step][: self.count]
        return views

    @classmethod
    def from_arrays(cls, x: np.ndarray, y: np.ndarray, z: np.ndarray,
                    kind: LayoutKind, precision: Precision) -> "LayoutStore":
        check_legal(kind, precision)
        n = int(x.shape[0])
        if n == 0:
            raise ValueError("no data points")
        shapes = buffer_shapes(kind, precision, n)
        buffers = [_aligned_zeros(s.nbytes) for s in shapes]
        store = cls(kind, precision, n, buffers, shapes)
        dt = precision.dtype
        store._views["x"][:] = x.astype(dt, copy=False)
        store._views["y"][:] = y.astype(dt, copy=False)
        store._views["z"][:] = z.astype(dt, copy=False)
        return store

    @classmethod
    def build(cls, records: Sequence[PointRecord] | Iterable[tuple[float, float, float]],
              kind: LayoutKind, precision: Precision) -> "LayoutStore":
        arr = np.asarray(list(records) if not isinstance(records, np.ndarray) else records,
                         dtype=np.float64)
        if arr.size == 0:
            raise ValueError("no data points")
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError("records must be (x, y, z) triples")
        ensure_finite(arr)
        return cls.from_arrays(arr[:, 0], arr[:, 1], arr[:, 2], kind, precision)

    # -- instrumented accessors ------------------------------------------

    def read_point(self, i: int) -> tuple[float, float, float]:
        """The i-th record's components; one counted read per component."""
        self._check_index(i)
        self.stats.add_reads(1, 1, 1)
        return (float(self._views["x"][i]), float(self._views["y"][i]), float(self._views["z"][i]))

    def read_components(self, i: int, which: Iterable[str]) -> tuple[float, ...]:
        """Like read_point but touches and counts only the requested subset."""
        comps = _normalize_components(which)
        self._check_index(i)
        self.stats.add_reads(**{c: 1 for c in comps})
        return tuple(float(self._views[c][i]) for c in comps)

    def load_tile(self, lo: int, hi: int, out: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None):
        """Bulk-copy points [lo, hi) into contiguous scratch; each element
        counts as one read."""
        if not (0 <= lo <= hi <= self.count):
            raise IndexError("index out of bounds")
        cnt = hi - lo
        if out is None:
            dt = self.precision.dtype
            out = (np.empty(cnt, dt), np.empty(cnt, dt), np.empty(cnt, dt))
        tx, ty, tz = (a[:cnt] for a in out)
        tx[:] = self._views["x"][lo:hi]
        ty[:] = self._views["y"][lo:hi]
        tz[:] = self._views["z"][lo:hi]
        self.stats.add_reads(cnt, cnt, cnt)
        return tx, ty, tz

    def component_views(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Raw strided views (x, y, z), uncounted: callers that stream whole
        components through a kernel account for their reads in bulk via
        stats.add_reads."""
        return (self._views["x"], self._views["y"], self._views["z"])

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Contiguous copies of the stored values (uncounted plumbing)."""
        return tuple(np.ascontiguousarray(self._views[c]) for c in _COMPONENTS)

    def records(self) -> list[PointRecord]:
        x, y, z = self.to_arrays()
        return [PointRecord(float(a), float(b), float(c)) for a, b, c in zip(x, y, z)]

    def _check_index(self, i: int) -> None:
        if not (0 <= i < self.count):
            raise IndexError("index out of bounds")

    # -- conversion and serialization ------------------------------------

    def convert(self, target: LayoutKind) -> "LayoutStore":
        """Rematerialize in another layout, value-preserving (same precision)."""
        check_legal(target, self.precision)
        x, y, z = self.to_arrays()
        return LayoutStore.from_arrays(x, y, z, target, self.precision)

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(_MAGIC, _KIND_CODES[self.kind],
                            _PRECISION_CODES[self.precision], self.count)
        return head + b"".join(buf.tobytes() for buf in self.buffers)

    def dump(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def from_bytes(cls, blob: bytes) -> "LayoutStore":
        if len(blob) < _HEADER.size:
            raise ValueError("truncated layout dump")
        magic, kind_code, prec_code, count = _HEADER.unpack_from(blob)
        if magic != _MAGIC:
            raise ValueError("bad magic; not a layout dump")
        kinds = {v: k for k, v in _KIND_CODES.items()}
        precs = {v: k for k, v in _PRECISION_CODES.items()}
        if kind_code not in kinds or prec_code not in precs:
            raise ValueError("unknown layout or precision code")
        kind, precision = kinds[kind_code], precs[prec_code]
        shapes = buffer_shapes(kind, precision, count)
        need = _HEADER.size + sum(s.nbytes for s in shapes)
        if len(blob) != need:
            raise ValueError("layout dump has wrong size")
        buffers = []
        pos = _HEADER.size
        for s in shapes:
            buf = _aligned_zeros(s.nbytes)
            buf[:] = np.frombuffer(blob, dtype=np.uint8, count=s.nbytes, offset=pos)
            buffers.append(buf)
            pos += s.nbytes
        return cls(kind, precision, count, buffers, shapes)

    @classmethod
    def load(cls, path) -> "LayoutStore":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def _normalize_components(which: Iterable[str]) -> tuple[str, ...]:
    comps = tuple(c for c in _COMPONENTS if c in set(which))
    given = set(which)
    if not given:
        raise ValueError("empty component set")
    if not given <= set(_COMPONENTS):
        raise ValueError(f"unknown components {sorted(given - set(_COMPONENTS))}")
    return comps


def build(records, kind: LayoutKind, precision: Precision) -> LayoutStore:
    """Materialize records in the given layout; see LayoutStore.build."""
    return LayoutStore.build(records, kind, precision)


def convert(store: LayoutStore, target: LayoutKind) -> LayoutStore:
    """Value-preserving layout conversion; see LayoutStore.convert."""
    return store.convert(target)


def legal_pairs() -> list[tuple[LayoutKind, Precision]]:
    """Every constructible (layout, precision) pair, in enum order."""
    return [(k, p) for p in Precision for k in LayoutKind if k.legal_for(p)]
