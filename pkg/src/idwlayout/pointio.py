"""Point-file I/O: CSV with an x,y,z header, and prediction CSVs.

Floats are written with repr() (shortest round-trip form), so identical
inputs produce identical files.
"""

from __future__ import annotations

import csv

from .core import PointRecord


def write_points_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("x,y,z\n")
        for r in records:
            fh.write(f"{r[0]!r},{r[1]!r},{r[2]!r}\n")


def read_points_csv(path) -> list[PointRecord]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["x", "y", "z"]:
            raise ValueError(f"{path}: expected header x,y,z")
        out = []
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: expected 3 columns, got {len(row)}")
            out.append(PointRecord(float(row[0]), float(row[1]), float(row[2])))
    return out


def read_queries_csv(path) -> list[tuple[float, float]]:
    """Query coordinates: accepts x,y or x,y,z (z ignored)."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        cols = [h.strip().lower() for h in header] if header else []
        if cols not in (["x", "y"], ["x", "y", "z"]):
            raise ValueError(f"{path}: expected header x,y or x,y,z")
        return [(float(r[0]), float(r[1])) for r in reader if r]


def write_predictions_csv(path, queries, values) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("x,y,z_pred\n")
        for (qx, qy), v in zip(queries, values):
            fh.write(f"{qx!r},{qy!r},{float(v)!r}\n")
