import json

import numpy as np
import pytest

from strata import fields as fl
from strata.acceptance import monomial_poly
from strata.beta import DiscreteMeasure
from strata.cli import run, _parse_radius_list


@pytest.fixture()
def saddle3d_spec(tmp_path):
    poly = monomial_poly(3, 2, {(2, 0, 0): 1.0, (0, 2, 0): -1.0})
    path = tmp_path / "saddle3d.json"
    fl.save_field(fl.PolynomialField(poly), path)
    return str(path)


def test_parse_radius_list():
    assert _parse_radius_list("2^-2..2^-6") == pytest.approx(
        [2.0 ** -6, 2.0 ** -5, 2.0 ** -4, 2.0 ** -3, 2.0 ** -2])
    assert _parse_radius_list("0.5,0.25") == [0.25, 0.5]


def test_basis_command(tmp_path, capsys):
    out = tmp_path / "basis.json"
    assert run(["basis", "--n", "3", "--d", "2", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["schema"] == 1
    assert len(data["coeffs"]) == 5


def test_frequency_command(saddle3d_spec, tmp_path):
    out = tmp_path / "freq.csv"
    code = run(["frequency", "--field", saddle3d_spec, "--p", "0,0,0",
                "--r", "0.5", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    header = lines[1].split(",")
    row = lines[2].split(",")
    n_val = float(row[header.index("N")])
    assert n_val == pytest.approx(2.0, abs=1e-6)


def test_frequency_bad_point(saddle3d_spec):
    assert run(["frequency", "--field", saddle3d_spec, "--p", "0,0",
                "--r", "0.5"]) == 1
    assert run(["frequency", "--field", "/nonexistent.json", "--p", "0,0,0",
                "--r", "0.5"]) == 1


def test_unknown_flag_rejected(saddle3d_spec):
    assert run(["frequency", "--field", saddle3d_spec, "--p", "0,0,0",
                "--r", "0.5", "--bogus-flag", "1"]) == 1


def test_malformed_spec(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "polynomial", "n": 3}')
    assert run(["frequency", "--field", str(bad), "--p", "0,0,0",
                "--r", "0.5"]) == 1


def test_degenerate_exit_code(tmp_path):
    const = fl.compose_affine(
        fl.PolynomialField(monomial_poly(3, 0, {(0, 0, 0): 1.0})),
        5.0, 1.0, 0.0)
    path = tmp_path / "const.json"
    fl.save_field(const, path)
    assert run(["frequency", "--field", str(path), "--p", "0,0,0",
                "--r", "0.5"]) == 2


def test_profile_deterministic(saddle3d_spec, tmp_path):
    out1 = tmp_path / "p1.csv"
    out2 = tmp_path / "p2.csv"
    args = ["profile", "--field", saddle3d_spec, "--p", "0.1,0,0",
            "--r-min", "0.1", "--r-max", "0.8", "--q", "2"]
    assert run(args + ["--out", str(out1)]) == 0
    assert run(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_beta_command(tmp_path):
    mu = DiscreteMeasure([[0.0, 0.0], [1.0, 0.0]], [1.0, 1.0], 0)
    path = tmp_path / "mu.json"
    path.write_text(mu.to_json())
    out = tmp_path / "beta.json"
    code = run(["beta", "--measure", str(path), "--p", "0.5,0",
                "--r", "1.0", "--bruteforce", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["beta_sq"] == pytest.approx(0.5, abs=1e-12)
    assert data["beta_sq_bruteforce"] == pytest.approx(0.5, abs=1e-9)


def test_reifenberg_command(tmp_path):
    from strata.reifenberg import segment_family
    fam = segment_family()
    path = tmp_path / "fam.json"
    path.write_text(fam.to_json())
    out = tmp_path / "rep.json"
    assert run(["reifenberg", "--measure", str(path),
                "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["mass_B1"] <= 0.4


def test_stratify_command(saddle3d_spec, tmp_path):
    out = tmp_path / "strata.csv"
    code = run(["stratify", "--field", saddle3d_spec, "--eps", "0.05",
                "--r", "0.05", "--grid-count", "3", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("schema")
    assert len(lines) > 2


def test_minkowski_command(tmp_path):
    pts = np.column_stack([np.linspace(0, 1, 200), np.full(200, 0.5)])
    path = tmp_path / "pts.csv"
    np.savetxt(path, pts)
    out = tmp_path / "dim.csv"
    assert run(["minkowski", "--points", str(path), "--r-list",
                "2^-5..2^-2", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[1] == "r,volume,content_s"
    assert lines[-1].startswith("dimension")
    assert float(lines[-1].split(",")[1]) == pytest.approx(1.0, abs=0.2)
    # content at the fitted dimension is the near-constant tube coefficient
    first = lines[2].split(",")
    assert float(first[2]) > 0
    out2 = tmp_path / "por.json"
    assert run(["minkowski", "--points", str(path), "--porosity",
                "0.5,0.5,0.2", "--out", str(out2)]) == 0
    assert json.loads(out2.read_text())["porosity"] > 0.4


def test_cover_command(saddle3d_spec, tmp_path):
    out = tmp_path / "cover.json"
    code = run(["cover", "--field", saddle3d_spec, "--k", "1",
                "--eps", "0.05", "--R", "0.125", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["audits"]["final_covering_misses"] == 0
    assert data["sums"]["packing"] > 0


def test_selftest_single_criterion(capsys):
    assert run(["selftest", "--criteria", "3"]) == 0
    out = capsys.readouterr().out
    assert "PASS criterion 3" in out


def test_scaling_command(saddle3d_spec, tmp_path):
    out = tmp_path / "scaling.csv"
    code = run(["scaling", "--field", saddle3d_spec, "--k", "1",
                "--eps", "0.05", "--R", "2^-2..2^-5",
                "--scan-floor", "1e-3", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[-1].startswith("exponent")
    assert float(lines[-1].split(",")[1]) == pytest.approx(2.0, abs=0.3)
