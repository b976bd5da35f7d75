"""CSV and snapshot writers shared by the solver, diagnostics and CLI."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .spectral import Field, GridSpec, hermitian_defect


def fmt(value) -> str:
    """17 significant digits, '.' decimal; integers and strings pass through."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


def label(value) -> str:
    """Shortest round-trip text of a number, for column names and check labels."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def csv_text(header_lines: Iterable[str], columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [f"# {h}" for h in header_lines]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header_lines, columns, rows) -> Path:
    path = Path(path)
    path.write_text(csv_text(header_lines, columns, rows), encoding="utf-8")
    return path


def read_csv(path) -> tuple[list[str], list[str], np.ndarray]:
    """Inverse of ``write_csv`` for numeric tables: (headers, columns, data)."""
    headers, columns, rows = [], None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            headers.append(line[1:].strip())
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return headers, columns or [], np.array(rows, dtype=float).reshape(len(rows), len(columns or []))


def grid_header(grid: GridSpec) -> str:
    return f"grid L={fmt(grid.L)} M={grid.M} N={grid.N}"


# ---------------------------------------------------------------------------
# snapshots: <base>.bin holds little-endian float64 (re, im) pairs, row-major
# M x N; <base>.meta holds key=value lines.


def write_snapshot(field: Field, base, time: float = 0.0) -> tuple[Path, Path]:
    base = Path(base)
    meta = base.with_suffix(".meta")
    data = base.with_suffix(".bin")
    g = field.grid
    meta.write_text(
        f"L={fmt(g.L)}\nM={g.M}\nN={g.N}\nspace_tag={field.space}\ntime={fmt(time)}\n",
        encoding="utf-8",
    )
    buf = np.empty((g.M, g.N, 2), dtype="<f8")
    buf[..., 0] = field.values.real
    buf[..., 1] = field.values.imag
    data.write_bytes(buf.tobytes(order="C"))
    return data, meta


def read_snapshot(base) -> tuple[Field, float]:
    base = Path(base)
    meta = {}
    for line in base.with_suffix(".meta").read_text(encoding="utf-8").splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    grid = GridSpec(float(meta["L"]), int(meta["M"]), int(meta["N"]))
    raw = np.frombuffer(base.with_suffix(".bin").read_bytes(), dtype="<f8")
    raw = raw.reshape(grid.M, grid.N, 2)
    values = raw[..., 0] + 1j * raw[..., 1]
    if meta["space_tag"] == "spectral":
        real = hermitian_defect(values) < 1e-12
    else:
        real = not np.any(values.imag)
    return Field(grid, meta["space_tag"], values, real), float(meta["time"])
