import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from sdsim.cli import main

CORPUS = str(Path(__file__).resolve().parent.parent / "models" / "frs.sdl")


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_check_units_corpus():
    code, out, _ = cli("check-units", CORPUS)
    assert code == 0 and out.strip().endswith("0 mismatches")


def test_check_units_json_and_mismatch(tmp_path):
    bad = tmp_path / "bad.sdl"
    bad.write_text("(1) P= 1\nUnits: quality\n\n(2) F= 2\nUnits: recommendations\n\n(3) Q= P*F\n"
                   "Units: quality/recommendations\n")
    code, out, _ = cli("check-units", str(bad), "--json")
    assert code == 1
    [m] = json.loads(out)
    assert m["variable"] == "Q" and m["span"] == [7, 8]


def test_parse_summary_and_json():
    code, out, _ = cli("parse", CORPUS)
    assert code == 0 and out.startswith("45 definitions")
    code, out, _ = cli("parse", CORPUS, "--json")
    assert code == 0 and json.loads(out)["schema"] == "sdsim.model/1"


def test_parse_errors_exit_one(tmp_path):
    bad = tmp_path / "bad.sdl"
    bad.write_text("(1) A= FOO(1)\nUnits: Dmnl\n")
    code, _, err = cli("parse", str(bad))
    assert code == 1 and "unknown function" in err and "bad.sdl:lines 1-2" in err


def test_missing_file():
    code, _, err = cli("parse", "/nonexistent/model.sdl")
    assert code == 1 and "cannot read" in err


def test_run_writes_full_csv(tmp_path):
    out = tmp_path / "base.csv"
    code, _, _ = cli("run", "--builtin", "frs", "--seed", "1", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 12802
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert float(row["HCI"]) == 10 and float(row["FRE"]) == 5


def test_run_from_file_with_flags(tmp_path):
    code, out, _ = cli("run", CORPUS, "--final-time", "1", "--dt", "0.25", "--noise", "off",
                       "--set", "Inductive Bias=2", "--set", "User Bias=3")
    assert code == 0
    assert out.startswith("t = 1 (seed 1, noise off)")


def test_dt_rescales_saveper(tmp_path):
    out = tmp_path / "r.csv"
    assert cli("run", "--builtin", "frs", "--final-time", "2", "--dt", "0.5", "--out", str(out))[0] == 0
    assert len(out.read_text().splitlines()) == 1 + 5


def test_unknown_override():
    code, _, err = cli("run", "--builtin", "frs", "--set", "No Var=1")
    assert code == 1 and "UnknownOverride" in err and "No Var" in err


@pytest.mark.parametrize("argv", [
    ["run"],
    ["run", "--builtin", "frs", "--dt", "0"],
    ["run", "--builtin", "frs", "--set", "novalue"],
    ["run", "--builtin", "frs", "--noise", "maybe"],
    ["run", "--builtin", "frs", "--bogus"],
    ["experiment", "nonsense"],
    ["sweep", "--param", "Seed", "--values", "a,b"],
    ["experiment", "base", "--seeds", "0"],
    [],
])
def test_usage_errors(argv, tmp_path):
    code, _, err = cli(*argv)
    assert code == 2 and "usage" in err


def test_noise_off_output_independent_of_seed(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli("run", "--builtin", "frs", "--final-time", "3", "--noise", "off", "--seed", "1", "--out", str(a))
    cli("run", "--builtin", "frs", "--final-time", "3", "--noise", "off", "--seed", "77", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_svg_output(tmp_path):
    svg = tmp_path / "s.svg"
    assert cli("run", "--builtin", "frs", "--final-time", "1", "--svg", str(svg))[0] == 0
    assert svg.read_text().count("<polyline") == 4


def test_experiment_directory(tmp_path):
    outdir = tmp_path / "exp"
    code, out, _ = cli("experiment", "interventions", "--seeds", "2", "--outdir", str(outdir))
    assert code == 0 and "PASS research-debias-outflow-five" in out
    names = {p.name for p in outdir.iterdir()}
    assert {"report.json", "summary.md", "runs", "interventions_quality.svg"} <= names
    assert len(list((outdir / "runs").glob("*.csv"))) == 6
    # nothing written outside the output directory
    assert {p.name for p in tmp_path.iterdir()} == {"exp"}


def test_sweep_command(tmp_path):
    code, out, _ = cli("sweep", "--param", "User Bias", "--values", "1,2", "--seeds", "1",
                       "--outdir", str(tmp_path / "sw"))
    assert code == 0
    doc = json.loads((tmp_path / "sw" / "report.json").read_text())
    assert doc["extras"]["sweep"]["values"] == [1.0, 2.0]


def test_sweep_unknown_param(tmp_path):
    code, _, err = cli("sweep", "--param", "Nope", "--values", "1", "--outdir", str(tmp_path / "x"))
    assert code == 1 and "Nope" in err
    assert not (tmp_path / "x").exists()


def test_presets_listing():
    code, out, _ = cli("presets")
    assert code == 0 and "intervention-full" in out and "Skewness=4.57" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sdsim", "check-units", CORPUS], capture_output=True, text=True)
    assert proc.returncode == 0 and "0 mismatches" in proc.stdout
