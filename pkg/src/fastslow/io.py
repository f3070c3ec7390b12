"""CSV emission and parsing.

Values are printed with 17 significant digits so they re-parse to the same
doubles; files use LF line endings.
"""
from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .asymptotics import RegularPart, regular_triple
from .errors import WriteFailure
from .initial_data import FieldTriple, Grid1D
from .model import ModelParams

FIELDS_HEADER = ("x", "u", "v", "w", "t")
REPORT_HEADER = ("metric", "component", "value")


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_rows(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="ascii") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(row) + "\n")
    except OSError as exc:
        raise WriteFailure(f"cannot write {path}: {exc}") from exc
    return path


def write_fields_csv(
    data: FieldTriple | RegularPart, grid: Grid1D, path: str | os.PathLike, vp: ModelParams | None = None
) -> Path:
    if isinstance(data, RegularPart):
        if vp is None:
            raise ValueError("writing a RegularPart needs the model parameters")
        data = regular_triple(data, vp)
    if len(data) != grid.n_cells:
        raise ValueError(f"field has {len(data)} cells, grid has {grid.n_cells}")
    t = fmt(data.t)
    x = grid.x
    rows = (
        (fmt(x[j]), fmt(data.u[j]), fmt(data.v[j]), fmt(data.w[j]), t) for j in range(grid.n_cells)
    )
    return _write_rows(path, FIELDS_HEADER, rows)


def read_fields_csv(path: str | os.PathLike) -> tuple[np.ndarray, FieldTriple]:
    """Inverse of :func:`write_fields_csv`; returns cell centers and the triple."""
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = float(table[0, 4]) if table.size else 0.0
    return table[:, 0], FieldTriple(table[:, 1], table[:, 2], table[:, 3], t)


def write_report_csv(rows: Iterable[tuple[str, str, float]], path: str | os.PathLike) -> Path:
    return _write_rows(path, REPORT_HEADER, ((m, c, fmt(v)) for m, c, v in rows))


def read_report_csv(path: str | os.PathLike) -> list[tuple[str, str, float]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [(m, c, float(v)) for m, c, v in reader]


def write_table_csv(header: Sequence[str], rows: Iterable[Sequence[float | str]], path: str | os.PathLike) -> Path:
    def cell(v):
        return v if isinstance(v, str) else fmt(v)

    return _write_rows(path, header, ([cell(v) for v in row] for row in rows))
