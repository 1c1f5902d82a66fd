"""Serialization: CSV layout, float formatting, JSON documents."""
import datetime
import json

import numpy as np
import pytest

from mbl.model import SystemParams, dressed_spectrum
from mbl.output import (format_float, grid_csv, grid_json, levels_csv,
                        levels_json, mapping_csv, mapping_json,
                        timeseries_csv, timeseries_json, write_text)
from mbl.sweep import (EvolutionJob, ResultGrid, SweepAxis, SweepSpec,
                       TimeSeries, run_evolution, run_sweep)


def _demo_grid():
    spec = SweepSpec(
        base=SystemParams(g_ms=19.6, omega_s=0.06, omega_d=0.01,
                          kappa_m=0.15, kappa_s=0.15),
        axis1=SweepAxis.explicit("delta", [-9.8, 9.8]),
        axis2=SweepAxis.explicit("omega_d", [0.004, 0.01, 0.012]),
        quantity="both_g2",
    )
    num = np.array([[1e-3, 1e-4, np.nan], [1e-7, 1e-6, 1e-5]])
    ana = np.array([[2e-3, 2e-4, np.nan], [2e-7, 2e-6, 2e-5]])
    failures = [((0, 2), "probe: boom")]
    return ResultGrid(spec=spec, planes={"g2_numeric": num, "g2_analytic": ana},
                      failures=failures)


def test_format_float():
    assert format_float(float("nan")) == "nan"
    assert format_float(1.0) == "1"
    assert format_float(0.1) == "0.10000000000000001"  # 17 significant digits
    assert float(format_float(np.pi)) == np.pi  # round trip
    assert format_float(-9.8) == "-9.8000000000000007"


def test_grid_csv_layout():
    text = grid_csv(_demo_grid())
    lines = text.split("\n")
    assert lines[0] == "delta,omega_d,log10_g2_numeric,log10_g2_analytic"
    assert len(lines) == 8 and lines[7] == ""  # 6 data rows + trailing newline
    # axis1-major ordering: all omega_d for delta=-9.8 first
    coords = [tuple(float(f) for f in ln.split(",")[:2]) for ln in lines[1:7]]
    assert coords == [(-9.8, 0.004), (-9.8, 0.01), (-9.8, 0.012),
                      (9.8, 0.004), (9.8, 0.01), (9.8, 0.012)]
    # log scale applied to g2 columns
    assert lines[1].split(",")[2] == "-3"
    assert lines[4].split(",")[2] == "-7"
    # failed cell serializes as nan
    assert lines[3].split(",")[2] == "nan"
    assert "\r" not in text


def test_grid_csv_one_axis():
    spec = SweepSpec(
        base=SystemParams(g_ms=19.6, omega_s=0.06, omega_d=0.01),
        axis1=SweepAxis.explicit("delta", [1.0, 2.0]),
        quantity="populations",
    )
    planes = {f"p{k}": np.array([[0.1 * (k + 1)], [0.2 * (k + 1)]])
              for k in range(4)}
    text = grid_csv(ResultGrid(spec=spec, planes=planes))
    lines = text.strip().split("\n")
    assert lines[0] == "delta,p0,p1,p2,p3"
    # populations are plain values, no log scaling
    assert lines[1].split(",")[1] == "0.10000000000000001"


def test_grid_json_document():
    doc = json.loads(grid_json(_demo_grid(), gamma_mhz=1.5))
    assert set(doc) == {"spec", "axes", "values", "planes", "failures",
                        "metadata"}
    assert doc["axes"][0]["name"] == "delta"
    assert doc["axes"][1]["values"] == [0.004, 0.01, 0.012]
    assert doc["values"] == doc["planes"]["log10_g2_numeric"]
    assert doc["values"][0][2] is None  # NaN -> null
    assert doc["values"][1][0] == pytest.approx(-7.0)
    assert doc["failures"] == [{"index": [0, 2], "tag": "probe: boom"}]
    assert doc["metadata"]["gamma_mhz"] == 1.5
    assert doc["metadata"]["version"]
    # timestamp parses back
    datetime.datetime.fromisoformat(doc["metadata"]["timestamp"])
    assert doc["spec"]["quantity"] == "both_g2"
    # no gamma key when not supplied
    doc2 = json.loads(grid_json(_demo_grid()))
    assert "gamma_mhz" not in doc2["metadata"]


def test_timeseries_serialization(broad_params):
    series = run_evolution(EvolutionJob(base=broad_params, t_end=1.0, num=5))
    text = timeseries_csv(series)
    lines = text.strip().split("\n")
    assert lines[0] == "time,p0,p1,p2,p3,g2"
    assert len(lines) == 6
    assert lines[1].split(",")[0] == "0"
    assert lines[1].split(",")[-1] == "nan"  # g2 undefined at the vacuum start
    doc = json.loads(timeseries_json(series, gamma_mhz=2.0))
    assert doc["axes"][0]["name"] == "time"
    assert doc["axes"][0]["values"][-1] == 1.0
    assert len(doc["planes"]["g2"]) == 5
    assert doc["planes"]["g2"][0] is None
    assert doc["metadata"]["gamma_mhz"] == 2.0


def test_levels_serialization():
    levels = dressed_spectrum(7.0, 7.0, 2.0, n_max=2)
    text = levels_csv(levels)
    lines = text.strip().split("\n")
    assert lines[0] == "n,branch,energy,c_g_n,c_e_nm1"
    assert len(lines) == 5
    assert lines[1].split(",")[0] == "1"
    assert lines[1].split(",")[1] == "-1"
    doc = json.loads(levels_json(levels))
    assert len(doc["levels"]) == 4
    assert doc["levels"][0]["n"] == 1
    assert doc["levels"][0]["branch"] == -1


def test_mapping_serialization():
    pairs = {"g2": 0.5, "log10_g2": -0.3010299956639812}
    text = mapping_csv(pairs)
    assert text.startswith("key,value\n")
    assert "g2,0.5\n" in text
    doc = json.loads(mapping_json(pairs, gamma_mhz=None))
    assert doc["values"]["g2"] == 0.5
    assert "metadata" in doc


def test_write_text_lf_bytes(tmp_path):
    target = tmp_path / "out.csv"
    write_text(str(target), "a,b\n1,2\n")
    raw = target.read_bytes()
    assert raw == b"a,b\n1,2\n"
    assert b"\r" not in raw


def test_csv_runs_are_byte_identical(broad_params):
    spec = SweepSpec(base=broad_params,
                     axis1=SweepAxis.explicit("delta", [5.0, 9.8]),
                     quantity="both_g2")
    a = grid_csv(run_sweep(spec))
    b = grid_csv(run_sweep(spec))
    assert a == b
