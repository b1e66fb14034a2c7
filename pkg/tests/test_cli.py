import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from vbchain import io as vio
from vbchain.cli import InputNotFound, UsageError, main, parse_args
from vbchain.kernel import from_matrix


@pytest.fixture
def files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("VBCHAIN_SEED", raising=False)
    vio.write_kernel(from_matrix([[0.7, 0.3], [0.6, 0.4]]), "two.vbk")
    vio.write_kernel(from_matrix(np.eye(3), np.full(3, 1 / 3)), "identity.vbk")
    (tmp_path / "h.txt").write_text("1 -2\n")
    return tmp_path


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def call(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_defaults(files):
    cfg = parse_args(["analyze", "two.vbk"])
    assert cfg.subcommand == "analyze" and cfg.inputs == ["two.vbk"]
    assert cfg.seed == 0 and cfg.format == "csv" and cfg.out is None and cfg.tol == 1e-10
    cfg = parse_args(["variance", "two.vbk", "h.txt", "--horizons", "1,100"])
    assert cfg.options["horizons"] == [1, 100]
    assert parse_args(["clt", "two.vbk", "h.txt", "--n", "1e5"]).options["n"] == 100_000


def test_parse_errors(files):
    with pytest.raises(UsageError):
        parse_args(["analyze"])
    with pytest.raises(UsageError):
        parse_args(["analyze", "two.vbk", "--bogus"])
    with pytest.raises(UsageError):
        parse_args(["analyze", "two.vbk", "--tol", "-1"])
    with pytest.raises(InputNotFound):
        parse_args(["analyze", "missing.vbk"])


def test_seed_env(files, monkeypatch):
    monkeypatch.setenv("VBCHAIN_SEED", "42")
    assert parse_args(["analyze", "two.vbk"]).seed == 42
    assert parse_args(["analyze", "two.vbk", "--seed", "3"]).seed == 3


def test_exit_codes(files, capsys):
    assert call(["analyze"], capsys)[0] == 2
    assert call(["analyze", "missing.vbk"], capsys)[0] == 3
    (files / "bad.vbk").write_text("VBK1\n2\n")
    code, out, err = call(["analyze", "bad.vbk"], capsys)
    assert code == 1 and out == "" and len(err.strip().splitlines()) == 1


def test_analyze(files, capsys):
    code, out, _ = call(["analyze", "identity.vbk"], capsys)
    r = dict(zip(*rows(out)))
    assert code == 0 and r["Lambda"] == "1" and r["variance_bounding"] == "false"
    r = dict(zip(*rows(call(["analyze", "two.vbk"], capsys)[1])))
    assert float(r["Lambda"]) == pytest.approx(0.1) and r["geometrically_ergodic"] == "true"


def test_variance(files, capsys):
    out = call(["variance", "two.vbk", "h.txt", "--horizons", "1,100"], capsys)[1]
    t = rows(out)
    assert t[0] == ["n", "var"] and float(t[1][1]) == pytest.approx(2.0)
    assert float(t[2][1]) == pytest.approx(2.4395, abs=1e-4)
    assert t[3] == ["var_pi", "v_exact", "ratio", "K_bound"]
    assert float(t[4][1]) == pytest.approx(22 / 9)


def test_example9_and_compare(files, capsys):
    code, out, _ = call(["example9", "--N", "25", "--out-prefix", "ex9"], capsys)
    assert code == 0
    for f in ("ex9_p1.vbk", "ex9_p2.vbk", "ex9_compare.csv"):
        assert (files / f).exists()
    r = dict(zip(*rows((files / "ex9_compare.csv").read_text())))
    assert r["dominates"] == "true" and float(r["lambda_min2"]) >= -0.5
    code, out, _ = call(["compare", "ex9_p1.vbk", "ex9_p2.vbk", "--functionals", "5"], capsys)
    t = rows(out)
    assert code == 0 and t[1][0] == "true" and len(t) == 2 + 1 + 5
    assert all(float(v1) <= float(v2) + 1e-9 for _, v1, v2 in t[3:])


def test_mh_build(files, capsys):
    (files / "t.txt").write_text("1 1\n")
    vio.write_proposal([[0.0, 0.4], [0.2, 0.0]], "q.vbq")
    code, _, _ = call(["mh-build", "t.txt", "q.vbq", "-o", "m.vbk"], capsys)
    assert code == 0
    np.testing.assert_allclose(vio.read_kernel("m.vbk").P, [[0.8, 0.2], [0.2, 0.8]])


def test_simulate_and_determinism(files, capsys):
    argv = ["simulate", "two.vbk", "--n", "50", "--seed", "5", "--functional", "h.txt"]
    out1 = call(argv, capsys)[1]
    out2 = call(argv, capsys)[1]
    assert out1 == out2 and out1.splitlines()[1] == "step,state,value"
    call(argv + ["--out", "trace.csv"], capsys)
    assert (files / "trace.csv").read_text() == out1
    z = call(["simulate", "example9-p1", "--n", "10", "--functional", "x"], capsys)[1]
    assert len(z.splitlines()) == 12


def test_clt(files, capsys):
    code, out, _ = call(["clt", "two.vbk", "h.txt", "--n", "2000", "--replicates", "60"], capsys)
    r = dict(zip(*rows(out)))
    assert code == 0 and float(r["reference_v"]) == pytest.approx(22 / 9)
    code, _, err = call(["clt", "two.vbk", "h.txt", "--n", "10", "--replicates", "10"], capsys)
    assert code == 1 and "50" in err


def test_probe_and_increment(files, capsys):
    out = call(["probe-rejection", "--b", "3", "--x", "100,10000", "--samples", "2000"], capsys)[1]
    t = rows(out)
    assert t[0] == ["x", "rejection", "se"] and float(t[1][1]) < float(t[2][1])
    out = call(["increment-density", "--a", "0.5", "--x", "1e8", "--grid", "-1:1:0.5"], capsys)[1]
    t = rows(out)
    assert t[0] == ["w", "density", "limit_density"] and len(t) == 6
    assert [float(r[0]) for r in t[1:]] == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_check_umid(files, capsys):
    out = call(["check-umid", "--x-grid", "-10:10:1", "--w-grid", "-2:2:0.5"], capsys)[1]
    r = dict(zip(*rows(out)))
    assert r["verdict"] == "true" and float(r["c_star"]) > 0


def test_plain_format(files, capsys):
    out = call(["analyze", "two.vbk", "--format", "plain"], capsys)[1]
    assert "," not in out and out.split()[0] == "n"


def test_console_script(files):
    res = subprocess.run([sys.executable, "-m", "vbchain.cli", "analyze", "two.vbk"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("n,Lambda,")
