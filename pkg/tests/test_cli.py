import json
import subprocess
import sys

import pytest

from gasleak.cli import main
from gasleak.config import BUNDLED, ConfigError, bundled_text, load_config, parse_config


@pytest.fixture()
def paper_doc():
    return json.loads(bundled_text())


def write(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_bundled_config_parses():
    rc = load_config(BUNDLED)
    assert rc.fit == "paper-fit"
    assert rc.pair().ell3 == 2e4
    assert len(rc.sha256) == 64


@pytest.mark.parametrize("where, key", [("", "extra"), ("line", "color"), ("leak", "position"),
                                        ("fd", "nx"), ("outputs", "format")])
def test_unknown_keys_are_named(paper_doc, where, key):
    target = paper_doc if not where else paper_doc[where]
    target[key] = 1
    with pytest.raises(ConfigError, match=f"'{where + '.' if where else ''}{key}'"):
        parse_config(paper_doc)


def test_missing_and_mistyped_keys(paper_doc):
    del paper_doc["line"]["c"]
    with pytest.raises(ConfigError, match="line.c"):
        parse_config(paper_doc)
    paper_doc["line"]["c"] = "fast"
    with pytest.raises(ConfigError, match="line.c"):
        parse_config(paper_doc)


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--config", BUNDLED, "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["dispatch.json", "manifest.json", "section1.csv", "section2.csv",
                     "section3.csv", "timeline.json"]
    events = json.loads((out / "timeline.json").read_text())["events"]
    assert [round(e["time"]) for e in events] == [300, 300, 554, 554]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["version"] == "0.1.0"
    assert manifest["input_sha256"] == load_config(BUNDLED).sha256
    assert "t2 = 553.9 s" in capsys.readouterr().out


def test_run_is_byte_identical_and_round_trips(tmp_path):
    a, b, c = (tmp_path / n for n in "abc")
    assert main(["run", "--config", BUNDLED, "--out", str(a)]) == 0
    assert main(["run", "--config", BUNDLED, "--out", str(b)]) == 0
    assert main(["run", "--config", str(a / "manifest.json"), "--out", str(c)]) == 0
    for name in ("section1.csv", "section2.csv", "section3.csv", "timeline.json", "dispatch.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()
    ma, mc = (json.loads((d / "manifest.json").read_text()) for d in (a, c))
    assert ma["config"] == mc["config"]
    assert ma["config_sha256"] == mc["config_sha256"]


def test_run_si_units(tmp_path):
    out = tmp_path / "si"
    assert main(["run", "--config", BUNDLED, "--out", str(out), "--si"]) == 0
    first = (out / "section1.csv").read_text().splitlines()[1]
    assert first.startswith("0,133600,")


def test_threshold_error_exit_code(tmp_path, paper_doc, capsys):
    paper_doc["line"]["eps"] = 1.0
    assert main(["run", "--config", write(tmp_path, paper_doc), "--out", str(tmp_path / "o")]) == 2
    assert "ThresholdError" in capsys.readouterr().err


def test_bad_json_exit_code(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_unwritable_output_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--config", BUNDLED, "--out", str(blocker)]) == 4


def test_numerical_error_exit_code(tmp_path, paper_doc, capsys):
    assert main(["t2", "--config", BUNDLED, "--method", "root"]) == 0
    paper_doc["line"]["G0"] = 0.0
    assert main(["t2", "--config", write(tmp_path, paper_doc)]) == 3
    assert "NoRoot" in capsys.readouterr().err


def test_t2_both(capsys):
    assert main(["t2", "--config", BUNDLED, "--method", "both"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["t2_closed_offset"] == pytest.approx(255.0, abs=2.0)
    assert out["t2_root"] > out["t2_closed"]


def test_tables_command(tmp_path, capsys):
    assert main(["tables", "--out", str(tmp_path), "--tolerance", "0.03"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["fraction_within"] >= 0.9
    assert (tmp_path / "table4.csv").exists()


def test_verify_paper_fit(tmp_path):
    assert main(["verify", "--config", BUNDLED, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"]


def test_verify_coarse_run_fails(tmp_path, paper_doc):
    paper_doc["fd"]["dt"] = 120.0
    assert main(["verify", "--config", write(tmp_path, paper_doc), "--out", str(tmp_path)]) == 5
    report = json.loads((tmp_path / "verify.json").read_text())
    assert max(s["max_rel_dev"] for s in report["sections"]) > 0.01


def test_verify_sealed_scenario_is_exact(tmp_path, paper_doc):
    paper_doc["line"].update(G0=0.0, Gs=0.0)
    paper_doc["leak"]["flux"] = {"kind": "constant", "values": [0.0]}
    paper_doc["fit"] = "none"
    assert main(["verify", "--config", write(tmp_path, paper_doc), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert all(s["max_rel_dev"] < 1e-12 for s in report["sections"])


def test_series_seeded_scenario_runs(tmp_path, paper_doc):
    paper_doc["fit"] = {"g_lo": -0.5, "g_hi": 0.0}
    paper_doc["leak"]["flux"] = {"kind": "piecewise-linear", "times": [0, 300, 900],
                                 "values": [0.0, 5.0, 5.0]}
    paper_doc["outputs"].pop("x_grid")
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, paper_doc), "--out", str(out)]) == 0
    assert (out / "section2.csv").read_text().count("\n") >= 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gasleak", "--version"], capture_output=True,
                          text=True, check=True)
    assert "0.1.0" in proc.stdout
