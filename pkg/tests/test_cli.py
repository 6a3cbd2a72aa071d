"""CLI surface: exit codes, CSV schema and determinism, re-ingestion."""

import math
from pathlib import Path

import numpy as np
import pytest

from slag_forge.cli import main
from slag_forge.csvio import (AH_COLUMNS, TN_COLUMNS, read_trace_csv,
                              trace_to_csv, write_trace_csv)
from slag_forge.slag_curves import tn_u1_case1, verify_slag
from slag_forge.taub_nut import TNParams


def test_metric_tn_exit0(capsys):
    rc = main(["metric", "--manifold", "tn", "--r", "2", "--theta",
               "1.5707963267948966", "--m", "1", "--h", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "K_uu = +2.5" in out
    assert "monge_ampere_residual" in out


def test_metric_ah_exit0(capsys):
    rc = main(["metric", "--manifold", "ah", "--k", "0.5", "--theta", "1.0",
               "--phi", "0.5", "--psi", "0.3"])
    assert rc == 0
    assert "det = 1.0000000" in capsys.readouterr().out


def test_metric_bad_domain_exit2(capsys):
    rc = main(["metric", "--manifold", "ah", "--k", "1.2"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "k must lie in (0, 1)" in err


def test_verify_only_and_unknown(capsys):
    assert main(["verify", "--only", "legendre-relation"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS legendre-relation")
    assert main(["verify", "--only", "nope"]) == 2


def test_verify_seed_determinism(capsys):
    main(["--seed", "7", "verify", "--only", "tn-monge-ampere"])
    first = capsys.readouterr().out.split("(")[0]
    main(["--seed", "7", "verify", "--only", "tn-monge-ampere"])
    second = capsys.readouterr().out.split("(")[0]
    assert first == second


def test_oracle_tn_only(capsys):
    rc = main(["oracle", "--samples", "5", "--manifold", "tn"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "fxx-contour" in out and "ah-i0" not in out


def test_trace_requires_family(capsys):
    assert main(["trace"]) == 2


def test_trace_case1_csv_contract(tmp_path, capsys):
    rc = main(["trace", "--tn-u1-case1", "--c1", "1", "--c2", "0.5",
               "--out", str(tmp_path)])
    assert rc == 0
    path = tmp_path / "tn_u1_case1_c1_1_c2_0.5_plus.csv"
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# slag-forge v1, manifold=tn, params=")
    assert lines[1] == ",".join(TN_COLUMNS)
    row = [float(v) for v in lines[2].split(",")]
    cols = dict(zip(TN_COLUMNS, row))
    assert cols["r"] == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert cols["phi"] == pytest.approx(0.0, abs=1e-7)
    assert cols["mu"] == pytest.approx(0.5)


def test_trace_csv_byte_determinism(tmp_path):
    rc1 = main(["trace", "--tn-u1-case2", "--c", "2",
                "--out", str(tmp_path / "a")])
    rc2 = main(["trace", "--tn-u1-case2", "--c", "2",
                "--out", str(tmp_path / "b")])
    assert rc1 == rc2 == 0
    a = (tmp_path / "a" / "tn_u1_case2_c_2_plus.csv").read_bytes()
    b = (tmp_path / "b" / "tn_u1_case2_c_2_plus.csv").read_bytes()
    assert a == b


def test_csv_roundtrip_reverifies(tmp_path):
    p = TNParams(1.0, 1.0)
    trace = tn_u1_case1(1.0, 0.5, n=200)[0]
    trace.residuals = verify_slag(trace, "tn", p)
    path = tmp_path / "case1.csv"
    write_trace_csv(path, trace, "tn")
    back, manifold = read_trace_csv(path)
    assert manifold == "tn"
    res = verify_slag(back, "tn", p)
    assert res["omega_max"] < 1e-5
    assert res["im_omega_max"] < 1e-5
    assert res["mu_max_dev"] < 1e-6


def test_csv_seventeen_significant_digits():
    p = TNParams(1.0, 1.0)
    trace = tn_u1_case1(1.0, 0.5, n=16)[0]
    trace.residuals = verify_slag(trace, "tn", p)
    body = trace_to_csv(trace, "tn").splitlines()[2]
    first = body.split(",")[1]
    assert first == f"{math.sqrt(2.0):.16e}"
    # value survives the round trip exactly
    assert float(first) == math.sqrt(2.0)


def test_trace_preset_fig6_five_files(tmp_path, capsys):
    rc = main(["trace", "--preset", "fig6", "--out", str(tmp_path)])
    assert rc == 0
    files = sorted(f.name for f in tmp_path.glob("*.csv"))
    assert files == [f"fig6_c_{c}.csv" for c in range(1, 6)]


def test_trace_preset_svg(tmp_path):
    rc = main(["trace", "--preset", "fig6", "--out", str(tmp_path),
               "--format", "svg"])
    assert rc == 0
    svg = (tmp_path / "fig6.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_trace_fig7_quadratic_root(tmp_path):
    rc = main(["trace", "--preset", "fig7", "--out", str(tmp_path)])
    assert rc == 0
    for c1 in range(1, 11):
        lines = (tmp_path / f"fig7_c1_{c1}.csv").read_text().splitlines()
        rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
        cols = {name: rows[:, i] for i, name in enumerate(TN_COLUMNS)}
        i_mid = int(np.argmin(np.abs(cols["theta"] - math.pi / 2)))
        expect = -2.0 + math.sqrt(4.0 + 2.0 * c1)
        assert cols["r"][i_mid] == pytest.approx(expect, rel=1e-3)
        assert np.max(np.abs(cols["mu"] - c1)) < 1e-10


def test_trace_ah_explicit(tmp_path, capsys):
    rc = main(["trace", "--ah-theta-phi", "--k", "0.5", "--c1", "-2",
               "--grid", "128", "--out", str(tmp_path)])
    assert rc == 0
    files = list(tmp_path.glob("ah_thetaphi_*.csv"))
    assert files
    lines = files[0].read_text().splitlines()
    assert lines[1] == ",".join(AH_COLUMNS)
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
    cols = dict(zip(AH_COLUMNS, zip(*rows)))
    # Re Z = 0 on the traced locus
    assert np.max(np.abs(np.array(cols["re_Z"]))) < 1e-8
    assert np.max(np.abs(np.array(cols["mu"]) - (-2.0))) < 1e-9


def test_verify_reports_documented_defect(capsys):
    """The one known-red invariant surfaces as an explicit FAIL line."""
    rc = main(["verify", "--only", "slag-ah-traces"])
    out = capsys.readouterr().out
    assert rc == 1
    assert out.startswith("FAIL slag-ah-traces")
    assert "documented defect" in out


def test_threads_env_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("SLAG_FORGE_THREADS", "2")
    rc = main(["trace", "--preset", "fig6", "--out", str(tmp_path)])
    assert rc == 0
    assert len(list(tmp_path.glob("*.csv"))) == 5
