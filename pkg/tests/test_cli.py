import io
import json
import subprocess
import sys

import jsonschema
import pytest

from sizebreak.cli import main
from sizebreak.histogram import SizeHistogram, load_histogram, save_histogram
from sizebreak.report import load_schema

BROKEN = ["--span", "5:25", "--segment", "5:15:-1.645:5.838", "--segment", "16:25:-2.34"]
SINGLE = ["--span", "5:25", "--segment", "5:25:-1.645:5.838"]


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def broken_csv(tmp_path):
    p = tmp_path / "broken.csv"
    assert run("synth", *BROKEN, "--out", p)[0] == 0
    return p


@pytest.fixture
def noisy_csv(tmp_path):
    p = tmp_path / "noisy.csv"
    assert run("synth", *BROKEN, "--noise", 1.0, "--seed", 4, "--out", p)[0] == 0
    return p


@pytest.fixture
def single_csv(tmp_path):
    p = tmp_path / "single.csv"
    assert run("synth", *SINGLE, "--out", p)[0] == 0
    return p


def test_synth_stdout_matches_file(broken_csv):
    code, text = run("synth", *BROKEN)
    assert code == 0
    assert text == broken_csv.read_text()
    h = load_histogram(broken_csv)
    assert h.span.lo == 5 and h.span.hi == 25


def test_synth_bad_segments():
    assert run("synth", "--span", "5:25", "--segment", "5:12:-1.6:5", "--segment", "14:25:-2")[0] == 2
    assert run("synth", "--span", "5:25", "--segment", "5:25:-1.6")[0] == 2


def test_synth_totals(tmp_path):
    p = tmp_path / "cal.csv"
    code, _ = run("synth", "--span", "5:25", "--segment", "5:14:-1.75", "--segment", "15:25:-2.32",
                  "--totals", "356602:3401000", "--out", p)
    assert code == 0
    h = load_histogram(p)
    assert h.counts.sum() == pytest.approx(356602, rel=1e-9)


def test_fit_exact(broken_csv, tmp_path):
    out = tmp_path / "fit.json"
    code, text = run("fit", broken_csv, "--range", "5:15", "--degree", 1, "--out", out)
    assert code == 0
    assert "slope       -1.645 " in text
    d = json.loads(out.read_text())
    assert d["fit"]["coefficients"][1] == pytest.approx(-1.645, abs=1e-10)


def test_fit_inflation(noisy_csv, tmp_path):
    run("fit", noisy_csv, "--range", "5:15", "--out", tmp_path / "a.json")
    run("fit", noisy_csv, "--range", "5:15", "--inflation", 1.9, "--out", tmp_path / "b.json")
    a = json.loads((tmp_path / "a.json").read_text())["fit"]["chi2"]
    b = json.loads((tmp_path / "b.json").read_text())["fit"]["chi2"]
    assert b == pytest.approx(a / 3.61, rel=1e-12)


def test_fit_errors(broken_csv, tmp_path):
    assert run("fit", broken_csv, "--range", "5:5")[0] == 3
    assert run("fit", broken_csv, "--range", "1:5")[0] == 2
    assert run("fit", broken_csv, "--degree", 5)[0] == 4
    assert run("fit", tmp_path / "missing.csv")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("workers,count\n1,3\n3,4\n")
    assert run("fit", bad)[0] == 2


def test_breakpoint(broken_csv, single_csv, tmp_path):
    code, text = run("breakpoint", broken_csv, "--out", tmp_path / "a.json")
    assert code == 0
    assert "break_detected=true" in text
    d = json.loads((tmp_path / "a.json").read_text())["breakpoint"]
    assert d["break_size"] == pytest.approx(15, abs=1e-6)

    code, text = run("breakpoint", single_csv)
    assert code == 0
    assert "break_detected=false" in text


def test_breakpoint_json_is_byte_identical(noisy_csv, tmp_path):
    for name in ("a.json", "b.json"):
        assert run("breakpoint", noisy_csv, "--seed", 3, "--out", tmp_path / name)[0] == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_scenario_no_break(single_csv, tmp_path):
    code, text = run("scenario", single_csv, "--kind", "fs", "--range", "5:15", "--mc-samples", 200,
                     "--out", tmp_path / "s.json")
    assert code == 0
    d = json.loads((tmp_path / "s.json").read_text())["scenario"]
    assert abs(d["delta_workers"]) < 1e-6
    assert abs(d["relative_pct"]) < 1e-9
    cf = load_histogram(tmp_path / "s.counterfactual.csv")
    assert cf.counts == pytest.approx(load_histogram(single_csv).counts, rel=1e-10)


def test_scenario_three_bins(tmp_path):
    p = tmp_path / "three.csv"
    save_histogram(SizeHistogram.from_arrays([1, 2, 3], [32, 16, 4]), p)
    code, _ = run("scenario", p, "--kind", "fn", "--mc-samples", 0, "--out", tmp_path / "fn.json")
    assert code == 0
    d = json.loads((tmp_path / "fn.json").read_text())["scenario"]
    assert d["delta_workers"] == pytest.approx(3.3502512828326587, rel=1e-9)


def test_scenario_fs_at_least_fn(broken_csv, tmp_path):
    run("scenario", broken_csv, "--kind", "fs", "--range", "5:15", "--mc-samples", 200, "--out", tmp_path / "fs.json")
    run("scenario", broken_csv, "--kind", "fn", "--mc-samples", 200, "--out", tmp_path / "fn.json")
    fs = json.loads((tmp_path / "fs.json").read_text())["scenario"]["delta_workers"]
    fn = json.loads((tmp_path / "fn.json").read_text())["scenario"]["delta_workers"]
    assert fs >= fn > 0


def test_scenario_errors(broken_csv):
    assert run("scenario", broken_csv, "--kind", "fn", "--degree", 2)[0] == 4
    assert run("scenario", broken_csv, "--kind", "xx")[0] == 2
    assert run("scenario", broken_csv, "--kind", "fs")[0] == 2


def test_report(noisy_csv, tmp_path):
    code, text = run("report", noisy_csv, "--mc-samples", 500, "--out", tmp_path / "r")
    assert code == 0
    report = json.loads((tmp_path / "r" / "report.json").read_text())
    jsonschema.validate(report, load_schema())
    ok = [s for s in report["scenarios"] if s["status"] == "ok"]
    assert len(report["scenarios"]) == 7 and len(ok) == 7
    for s in ok:
        rows = (tmp_path / "r" / s["plot_table"]).read_text().splitlines()
        assert rows[0] == "size\tobserved_workers\tfit_workers\tcounterfactual_workers"
        assert len(rows) - 1 == 21


def test_report_single_law(single_csv, tmp_path):
    run("report", single_csv, "--mc-samples", 100, "--out", tmp_path / "r")
    report = json.loads((tmp_path / "r" / "report.json").read_text())
    jsonschema.validate(report, load_schema())
    W = report["totals"]["workers"]
    for s in report["scenarios"]:
        assert abs(s["result"]["delta_workers"]) < 1e-6 * W


def test_report_partial_failure(tmp_path):
    p = tmp_path / "short.csv"
    save_histogram(SizeHistogram.from_arrays(range(10, 31), [1000 * a**-1.5 for a in range(10, 31)]), p)
    code, _ = run("report", p, "--mc-samples", 100, "--out", tmp_path / "r")
    assert code == 0
    report = json.loads((tmp_path / "r" / "report.json").read_text())
    jsonschema.validate(report, load_schema())
    status = {s["id"]: s["status"] for s in report["scenarios"]}
    assert status["FN-d1"] == "ok"
    assert status["FS-d1-5:15"] == "error"


def test_report_reproducible_from_config_echo(noisy_csv, tmp_path):
    run("report", noisy_csv, "--mc-samples", 300, "--seed", 9, "--inflation", 1.9, "--out", tmp_path / "a")
    echo = json.loads((tmp_path / "a" / "report.json").read_text())["config"]
    (tmp_path / "cfg.json").write_text(json.dumps(echo))
    run("report", noisy_csv, "--config", tmp_path / "cfg.json", "--out", tmp_path / "b")
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def test_module_entry_point(broken_csv):
    proc = subprocess.run([sys.executable, "-m", "sizebreak", "fit", str(broken_csv), "--range", "5:5"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
    assert "error" in proc.stderr
