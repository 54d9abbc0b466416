import json

import pytest

from hardyshoot.cli import main

P3 = ["--mu", "0.125", "--p", "3"]


def run_json(capsys, argv, expect=0):
    rc = main(argv)
    out = capsys.readouterr()
    assert rc == expect, out.err
    return json.loads(out.out)


def test_exponents_exact(capsys):
    doc = run_json(capsys, ["exponents", "--mu", "0.1875", "--p", "3"])
    assert doc["beta_minus"] == 0.25
    assert doc["beta_plus"] == 0.75
    assert doc["regime"] == "Superlinear"
    assert doc["problem"]["mu"] == 0.1875


def test_solve_rejects_nonpositive_u0(capsys):
    rc = main(["solve", *P3, "--u0", "0"])
    captured = capsys.readouterr()
    assert rc == 1
    err = json.loads(captured.err)
    assert err["error"] == "NonPositive"
    assert "message" in err


def test_classify_with_outputs(tmp_path, capsys):
    out = tmp_path / "doc.json"
    csv = tmp_path / "traj.csv"
    rc = main(["classify", *P3, "--u0", "1.0", "--out", str(out), "--csv", str(csv)])
    capsys.readouterr()
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "GlobalPositive"
    assert doc["coefficient"]["converged"] is True
    assert doc["csv"] == str(csv)
    lines = csv.read_text().splitlines()
    assert lines[0] == "r,u,du"
    assert lines[-1].startswith("# event:")


def test_reruns_byte_identical(tmp_path, capsys):
    paths = [tmp_path / name for name in ("a.json", "b.json")]
    for path in paths:
        rc = main(["solve", *P3, "--u0", "0.8", "--out", str(path)])
        capsys.readouterr()
        assert rc == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# base setup\nmu=0.24\np=3\n")
    doc = run_json(capsys, ["exponents", "--config", str(cfg)])
    assert doc["beta_minus"] == pytest.approx(0.4, abs=1e-15)
    doc = run_json(capsys, ["exponents", "--config", str(cfg), "--mu", "0.1875"])
    assert doc["beta_minus"] == 0.25


def test_usage_errors_exit_2(capsys):
    assert main(["exponents", "--p", "3"]) == 2
    capsys.readouterr()
    assert main(["frobnicate"]) == 2
    capsys.readouterr()
    assert main([]) == 2
    capsys.readouterr()


def test_threshold_json(capsys):
    doc = run_json(capsys, ["threshold", *P3, "--tol", "1e-4"])
    assert 2.6 < doc["u_star"] < 2.65
    lo, hi = doc["bracket"]
    assert lo < doc["u_star"] < hi
    assert doc["evaluations"] > 0
    assert doc["w_transform_limit"] is None


def test_sweep_ordered_rows(capsys):
    doc = run_json(
        capsys, ["sweep", *P3, "--param", "u0", "--values", "0.5,4.0"]
    )
    rows = doc["rows"]
    assert [row["u0"] for row in rows] == [0.5, 4.0]
    assert rows[0]["kind"] == "GlobalPositive"
    assert rows[0]["coefficient"] > 0
    assert rows[1]["kind"] == "Blowup"
    assert 0 < rows[1]["r_blow"] < 1


def test_sweep_requires_one_grid(capsys):
    rc = main(["sweep", *P3, "--param", "u0"])
    capsys.readouterr()
    assert rc == 1


def test_boundary_inverse_json(capsys):
    doc = run_json(
        capsys,
        ["boundary", "--mu", "0.125", "--p", "0.5", "--c", "0.0042516949695939905"],
    )
    res = doc["result"]
    assert res["family"] == "origin"
    assert res["parameter"] == 0.0
    assert res["coefficient"] == pytest.approx(0.0042516949695939905, rel=1e-6)
    assert doc["diagnostics"]["evaluations"] >= 1


def test_certify_margins(capsys):
    # on [0.5, 1) the supersolution condition is c_plus^2 > 2.125 + 2
    doc = run_json(
        capsys, ["certify", *P3, "--c-plus", "2.1", "--c-minus", "0.3", "--r0", "0.5"]
    )
    cp = doc["c_plus"]
    assert cp["supersolution"] is True
    assert cp["max_margin"] == pytest.approx(2.125 - 2.1**2 + 2.0, abs=1e-12)
    assert cp["argmax_r"] == 0.5
    assert cp["boundary_margin"] == pytest.approx(2.125 - 2.1**2, abs=1e-9)
    assert doc["c_minus"]["subsolution"] is True

    doc = run_json(capsys, ["certify", *P3, "--c-plus", "1.5", "--c-minus", "1.5"])
    assert doc["c_plus"]["supersolution"] is False
    assert doc["c_minus"]["subsolution"] is False


def test_outdir_env_redirects_relative_paths(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HARDYSHOOT_OUTDIR", str(tmp_path))
    rc = main(["exponents", "--mu", "0.1875", "--p", "3", "--out", "sub/e.json"])
    capsys.readouterr()
    assert rc == 0
    assert (tmp_path / "sub" / "e.json").is_file()


def test_verify_single_criterion(capsys):
    rc = main(["verify", "--filter", "C12"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "[PASS] C12" in out
    assert "1/1 criteria passed" in out
