"""Scalar field I/O: CSV (``i,j,k,x,y,z,value``) and legacy ASCII VTK.

Floats are written with 17 significant digits so files round-trip exactly.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .grid import Boundary, Grid3

__all__ = ["write_csv", "read_csv", "write_vtk", "read_vtk"]

FMT = "%.17g"


def write_csv(path, values, grid):
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ValueError("field does not match grid")
    i, j, k = np.indices(grid.shape)
    x, y, z = grid.coords()
    table = np.column_stack([a.ravel() for a in (i, j, k, x, y, z, values)])
    with open(Path(path), "w", newline="") as fh:
        fh.write("i,j,k,x,y,z,value\n")
        for row in table:
            fh.write("%d,%d,%d," % tuple(int(v) for v in row[:3]))
            fh.write(",".join(FMT % v for v in row[3:]))
            fh.write("\n")


def read_csv(path, boundary=Boundary.FREE_DECAY):
    """Return ``(values, grid)``; the grid is rebuilt from the coordinates."""
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["i", "j", "k", "x", "y", "z", "value"]:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = np.array([[float(v) for v in r] for r in reader if r])
    ijk = rows[:, :3].astype(int)
    shape = tuple(int(n) for n in ijk.max(axis=0) + 1)
    values = np.zeros(shape)
    values[ijk[:, 0], ijk[:, 1], ijk[:, 2]] = rows[:, 6]
    origin = tuple(rows[(ijk == 0).all(axis=1)][0, 3:6])
    step = np.diff(np.unique(rows[:, 3]))
    h = float(step[0]) if step.size else 1.0
    return values, Grid3(*shape, h, origin, boundary)


def write_vtk(path, values, grid, name="value", title="nldiffusion field"):
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ValueError("field does not match grid")
    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS %d %d %d" % grid.shape,
        "ORIGIN " + " ".join(FMT % o for o in grid.origin),
        "SPACING " + " ".join(FMT % grid.h for _ in range(3)),
        "POINT_DATA %d" % grid.size,
        f"SCALARS {name} double",
        "LOOKUP_TABLE default",
    ]
    # VTK orders points with x varying fastest
    flat = values.ravel(order="F")
    with open(Path(path), "w") as fh:
        fh.write("\n".join(lines) + "\n")
        for start in range(0, flat.size, 6):
            fh.write(" ".join(FMT % v for v in flat[start : start + 6]) + "\n")


def read_vtk(path, boundary=Boundary.FREE_DECAY):
    """Read a file written by :func:`write_vtk`; returns ``(values, grid)``."""
    with open(Path(path)) as fh:
        tokens = fh.read().split("\n")
    head = {}
    data_start = None
    for n, line in enumerate(tokens):
        parts = line.split()
        if not parts:
            continue
        key = parts[0].upper()
        if key in ("DIMENSIONS", "ORIGIN", "SPACING", "POINT_DATA"):
            head[key] = parts[1:]
        if key == "LOOKUP_TABLE":
            data_start = n + 1
            break
    if data_start is None or "DIMENSIONS" not in head:
        raise ValueError(f"{path}: not a STRUCTURED_POINTS scalar file")
    shape = tuple(int(v) for v in head["DIMENSIONS"])
    spacing = [float(v) for v in head["SPACING"]]
    if len(set(spacing)) != 1:
        raise ValueError(f"{path}: only uniform spacing is supported")
    flat = np.array(" ".join(tokens[data_start:]).split(), dtype=float)
    values = flat.reshape(shape, order="F")
    origin = tuple(float(v) for v in head["ORIGIN"])
    return values, Grid3(*shape, spacing[0], origin, boundary)
