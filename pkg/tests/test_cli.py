import cmath
import csv
import json
import math
import subprocess
import sys

import pytest

from stokesgraph.cli import UsageError, main, parse_complex

C43 = 2 ** (4 / 3)


def _run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def _json(path):
    return json.loads(path.read_text())


# ---------------------------------------------------------------- parsing


@pytest.mark.parametrize("text, value", [
    ("2+0.2i", 2 + 0.2j), ("0+1i", 1j), ("-1+0i", -1 + 0j), ("1.5-2i", 1.5 - 2j), ("3", 3 + 0j),
    ("2i", 2j), ("1e-3+2.5e1i", 1e-3 + 25j), ("-.5-.5j", -0.5 - 0.5j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["foo", "1+", "i", "1+2k", "1++2i", ""])
def test_parse_complex_rejects(text):
    with pytest.raises(UsageError):
        parse_complex(text)


def test_parse_round_trip():
    z = 2 + 1.7320508075688772j
    assert parse_complex(f"{z.real!r}+{z.imag!r}i") == z


# ---------------------------------------------------------------- classify


@pytest.mark.parametrize("a, region, strips", [("2+0.2i", "O1", 1), ("0+1i", "O+", 2), ("-2+0.3i", "O2", 1)])
def test_classify(tmp_path, a, region, strips):
    assert _run(tmp_path, "classify", "--a", a, "--format", "json,csv,svg") == 0
    rep = _json(tmp_path / "classify.json")
    assert rep["region"] == region
    assert rep["face_census"] == {"half_planes": 6, "strips": strips}
    assert ["-1", "1"] in rep["short_trajectory_pairs"]
    assert (tmp_path / "classify_edges.csv").exists()
    assert (tmp_path / "classify.svg").read_text().startswith("<svg")


def test_classify_on_curve(tmp_path):
    z = 1 + 2 * cmath.exp(1j * math.pi / 3)
    assert _run(tmp_path, "classify", "--a", f"{z.real!r}+{z.imag!r}i") == 0
    rep = _json(tmp_path / "classify.json")
    assert rep["region"].startswith("on-gamma")
    assert rep["face_census"]["strips"] == 0
    assert sorted(map(sorted, rep["short_trajectory_pairs"])) == [["-1", "1"], ["1", "a"], ["1", "conj(a)"]]


@pytest.mark.parametrize("argv", [
    ["classify", "--a", "-1+0i"], ["classify", "--a", "foo"], ["classify"],
    ["spectrum", "--m", "0", "--b", "1"], ["spectrum", "--m", "3", "--b", "1", "--rule", "index", "--index", "7"],
    ["pipeline", "--m", "16,8", "--b", "1"], ["trace", "--start", "0"],
    ["classify", "--a", "2+1i", "--format", "png"], ["nonsense"],
])
def test_usage_errors_exit_2(tmp_path, argv):
    assert _run(tmp_path, *argv) == 2


def test_numerical_failure_exit_3(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_steps": 3}))
    assert _run(tmp_path, "classify", "--a", "2+0.2i", "--config", str(cfg)) == 3


def test_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"capture_tol": -1.0}))
    assert _run(tmp_path, "classify", "--a", "2+0.2i", "--config", str(cfg)) == 2
    cfg.write_text("{not json")
    assert _run(tmp_path, "classify", "--a", "2+0.2i", "--config", str(cfg)) == 2


def test_config_supplies_output(tmp_path):
    out = tmp_path / "nested"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"out": str(out), "format": "json"}))
    assert main(["classify", "--a", "0+1i", "--config", str(cfg)]) == 0
    assert (out / "classify.json").exists() and not (out / "classify_edges.csv").exists()


# ---------------------------------------------------------------- gamma


def test_gamma(tmp_path):
    assert _run(tmp_path, "gamma", "--format", "json,csv,svg") == 0
    rep = _json(tmp_path / "gamma_angle.json")
    assert abs(rep["x_star"] - 0.898) < 5e-3
    files = sorted(p.name for p in tmp_path.glob("gamma_*.csv"))
    assert len(files) == 4
    target = 1 + 2 * cmath.exp(1j * math.pi / 3)
    with open(tmp_path / "gamma_G1+.csv") as fh:
        pts = [complex(float(r["x"]), float(r["y"])) for r in csv.DictReader(fh)]
    assert min(abs(z - target) for z in pts) < 1e-4


# ---------------------------------------------------------------- spectrum


def test_spectrum_m2(tmp_path):
    assert _run(tmp_path, "spectrum", "--m", "2", "--b", "1") == 0
    rep = _json(tmp_path / "spectrum.json")
    betas = sorted(complex(*b).real for b in rep["betas"])
    assert abs(betas[0] + C43) < 1e-12 and abs(betas[1] - C43) < 1e-12
    assert rep["max_exact_residual"] < 1e-8 and rep["sample_points"] == 50


def test_spectrum_m1(tmp_path):
    assert _run(tmp_path, "spectrum", "--m", "1", "--b", "0") == 0
    rep = _json(tmp_path / "spectrum.json")
    assert rep["selected_beta"] == [0.0, 0.0]
    assert (tmp_path / "spectrum_roots.csv").read_text() == "re,im,m\n"


def test_spectrum_residual_recorded(tmp_path):
    assert _run(tmp_path, "spectrum", "--m", "30", "--b", "1") == 0
    rep = _json(tmp_path / "spectrum.json")
    assert rep["max_exact_residual"] < 1e-8
    assert rep["max_simplified_residual"] > 1e-3


# ---------------------------------------------------------------- pipeline


def test_pipeline_singleton(tmp_path):
    assert _run(tmp_path, "pipeline", "--m", "8", "--b", "1", "--format", "json,csv,svg") == 0
    rep = _json(tmp_path / "pipeline.json")
    assert rep["monotone_decreasing"] is None
    with open(tmp_path / "pipeline.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1 and rows[0]["decreasing"] == ""
    assert "mass_consistency" in rep
    assert (tmp_path / "pipeline.svg").exists()


def test_pipeline_two_sizes(tmp_path):
    assert _run(tmp_path, "pipeline", "--m", "8,16", "--b", "1") == 0
    rep = _json(tmp_path / "pipeline.json")
    assert rep["monotone_decreasing"] is True
    assert rep["mass_consistency"]["root_mass_last"] == 15 / 16


# ---------------------------------------------------------------- trace


def test_trace_family(tmp_path):
    assert _run(tmp_path, "trace", "--a", "1+1i", "--start", "0", "--angle", "0") == 0
    rep = _json(tmp_path / "trace.json")
    assert rep["end"] == {"kind": "zero", "index": 2} or rep["end"]["kind"] == "zero"


def test_trace_poly(tmp_path):
    assert _run(tmp_path, "trace", "--poly", "1,0,0,0,-1", "--start", "0", "--angle", "0") == 0
    with open(tmp_path / "trace.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert abs(float(rows[-1]["x"]) - 1) < 1e-12


# ---------------------------------------------------------------- determinism


@pytest.mark.parametrize("argv", [["classify", "--a", "2+0.2i"], ["spectrum", "--m", "12", "--b", "1"],
                                  ["gamma"]])
def test_reruns_are_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*argv, "--out", str(a), "--format", "json,csv,svg"]) == 0
    assert main([*argv, "--out", str(b), "--format", "json,csv,svg"]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "stokesgraph", "classify", "--a", "-1+0i", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "non-real" in proc.stderr
