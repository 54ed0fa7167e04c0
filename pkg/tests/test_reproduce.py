import json

import numpy as np
import pytest

from gasleak import presets
from gasleak.domain import SeriesConfig
from gasleak.oracle import FDConfig
from gasleak.reproduce import atomic_write, field_csv, reproduce_tables, table_diff, verify_states


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = {float(r.split(",")[0]): [float(v) for v in r.split(",")[1:]] for r in lines[1:]}
    return header, rows


@pytest.fixture(scope="module")
def tables_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("tables")
    report = reproduce_tables(out)
    return out, report


def test_files_written(tables_dir):
    out, _ = tables_dir
    assert sorted(p.name for p in out.iterdir()) == [
        "table1.csv", "table2.csv", "table3.csv", "table4.csv", "table_diff.json"]


def test_table_cells(tables_dir):
    out, _ = tables_dir
    header, rows = read_csv(out / "table2.csv")
    assert header[0] == "x_km" and header[-1] == "t_600"
    assert rows[0.0][-1] == pytest.approx(18.13, rel=0.03)
    _, rows = read_csv(out / "table3.csv")
    assert rows[20.0][1] == pytest.approx(10.86, rel=0.03)


def test_diff_report(tables_dir):
    out, report = tables_dir
    on_disk = json.loads((out / "table_diff.json").read_text())
    assert on_disk["summary"] == report["summary"]
    cells = [c for c in on_disk["cells"] if c["table"] > 1]
    assert len(cells) == 99
    assert {"paper", "computed", "rel_err", "flagged"} <= set(cells[0])
    assert report["summary"]["fraction_within"] >= 0.9


def test_flagging_respects_tolerance():
    tab = {1: {"x_km": np.array([0.0]), "paper": np.full((1, 11), 100.0),
               "analytic": np.full((1, 11), 105.0), "fd": np.full((1, 11), 105.2)}}
    rep = table_diff(tab, tolerance=0.03)
    assert rep["summary"]["outliers"] == 11
    assert rep["summary"]["outliers_explained_by_fd"]


def test_field_csv_is_deterministic():
    x = np.array([0.0, 5000.0])
    p = np.array([[133600.0, 141341.23456], [128200.0, 132191.0]])
    text = field_csv(x, [0.0, 60.0], p)
    assert text == "x_km,t_0,t_60\n0,13.36,14.1341\n5,12.82,13.2191\n"
    assert field_csv(x, [0.0, 60.0], p, si=True).startswith("x_m,t_0,t_60\n0,133600,141341\n")


def test_atomic_write_replaces(tmp_path):
    target = tmp_path / "a.txt"
    atomic_write(target, "one")
    atomic_write(target, "two")
    assert target.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]


def test_verify_states_paper_fit(params, states):
    rep = verify_states(params, states, SeriesConfig(), FDConfig())
    assert rep["passed"]
    assert rep["convergence_order"] == pytest.approx(2.0, abs=0.2)


def test_verify_states_coarse_fails(params, states):
    rep = verify_states(params, states, SeriesConfig(), FDConfig(dt=120.0))
    assert not rep["passed"]
    assert max(s["max_rel_dev"] for s in rep["sections"]) > 0.01
