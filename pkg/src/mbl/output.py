"""CSV and JSON rendering of sweep grids, time series, and level tables.

CSV files are deterministic: 17-significant-digit floats, LF line endings,
one row per grid point in axis1-major order. Correlation columns are
emitted as log10 (raw values live in ResultGrid); populations and times are
raw. JSON documents carry the full spec echo, all value planes, failures,
and metadata.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from datetime import datetime, timezone
from typing import Iterable

import numpy as np

from . import __version__
from .model import DressedLevel
from .sweep import ResultGrid, SweepSpec, TimeSeries

LOG_COLUMNS = ("g2_numeric", "g2_analytic")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def _column_header(name: str) -> str:
    return f"log10_{name}" if name in LOG_COLUMNS else name


def _transform(name: str, values: np.ndarray) -> np.ndarray:
    if name in LOG_COLUMNS:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.log10(values)
    return values


def _csv_text(header: Iterable[str], rows: Iterable[Iterable[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(x) for x in row))
    return "\n".join(lines) + "\n"


def grid_csv(grid: ResultGrid) -> str:
    spec = grid.spec
    columns = spec.column_names()
    planes = {name: _transform(name, grid.planes[name]) for name in columns}
    header = [spec.axis1.name]
    if spec.axis2 is not None:
        header.append(spec.axis2.name)
    header.extend(_column_header(name) for name in columns)

    def rows():
        n1, n2 = spec.shape
        for i in range(n1):
            for j in range(n2):
                row = [spec.axis1.values[i]]
                if spec.axis2 is not None:
                    row.append(spec.axis2.values[j])
                row.extend(planes[name][i, j] for name in columns)
                yield row

    return _csv_text(header, rows())


def timeseries_csv(series: TimeSeries) -> str:
    names = list(series.planes)
    header = ["time"] + names

    def rows():
        for k in range(series.times.size):
            yield [series.times[k]] + [series.planes[name][k] for name in names]

    return _csv_text(header, rows())


def levels_csv(levels: Iterable[DressedLevel]) -> str:
    header = ["n", "branch", "energy", "c_g_n", "c_e_nm1"]
    rows = [[lv.n, lv.branch, lv.energy, lv.c_g_n, lv.c_e_nm1] for lv in levels]
    return _csv_text(header, rows)


def _jsonable(value):
    """Floats with NaN mapped to None; arrays to nested lists."""
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _metadata(gamma_mhz: float | None) -> dict:
    meta = {
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if gamma_mhz is not None:
        meta["gamma_mhz"] = gamma_mhz
    return meta


def spec_document(spec: SweepSpec) -> dict:
    doc = {
        "base": asdict(spec.base),
        "axis1": {"name": spec.axis1.name, "values": list(spec.axis1.values)},
        "axis2": None if spec.axis2 is None else {"name": spec.axis2.name, "values": list(spec.axis2.values)},
        "quantity": spec.quantity,
        "constraints": list(spec.constraints),
    }
    return doc


def grid_json(grid: ResultGrid, gamma_mhz: float | None = None) -> str:
    spec = grid.spec
    columns = spec.column_names()
    planes = {_column_header(name): _jsonable(_transform(name, grid.planes[name])) for name in columns}
    axes = [{"name": spec.axis1.name, "values": list(spec.axis1.values)}]
    if spec.axis2 is not None:
        axes.append({"name": spec.axis2.name, "values": list(spec.axis2.values)})
    doc = {
        "spec": spec_document(spec),
        "axes": axes,
        "values": planes[_column_header(columns[0])],
        "planes": planes,
        "failures": [{"index": list(idx), "tag": tag} for idx, tag in grid.failures],
        "metadata": _metadata(gamma_mhz),
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def timeseries_json(series: TimeSeries, gamma_mhz: float | None = None) -> str:
    doc = {
        "axes": [{"name": "time", "values": _jsonable(series.times)}],
        "planes": {name: _jsonable(values) for name, values in series.planes.items()},
        "failures": [],
        "metadata": _metadata(gamma_mhz),
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def levels_json(levels: Iterable[DressedLevel], gamma_mhz: float | None = None) -> str:
    doc = {
        "levels": [asdict(lv) for lv in levels],
        "metadata": _metadata(gamma_mhz),
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def mapping_csv(pairs: dict[str, float]) -> str:
    lines = ["key,value"]
    for key, value in pairs.items():
        lines.append(f"{key},{format_float(value)}")
    return "\n".join(lines) + "\n"


def mapping_json(pairs: dict[str, float], gamma_mhz: float | None = None) -> str:
    doc = {"values": {k: _jsonable(v) for k, v in pairs.items()}, "metadata": _metadata(gamma_mhz)}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_text(path: str, text: str) -> None:
    """Write with LF endings regardless of platform."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
