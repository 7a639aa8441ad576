import subprocess
import sys

import numpy as np
import pytest

from noisefold import cli, harness
from noisefold.analysis import PropositionVerdict
from noisefold.ensembles import gen_gaussian
from noisefold.textio import read_matrix, read_vector, write_matrix, write_vector

CONFIG = """\
family = gaussian
n = 16
p = 64
s = 2
amplitude = 1.0
sigma = 0.05
sigma0 = 0.05
trials = 5
algorithm = omp
master_seed = 3
"""


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_round_trip(tmp_path, capsys):
    path = tmp_path / "A.txt"
    code, _, _ = run(["gen", "--family", "gaussian", "--n", "4", "--p", "12", "--seed", "5", "--out", str(path)], capsys)
    assert code == 0
    assert read_matrix(path).tobytes() == gen_gaussian(4, 12, 5).tobytes()


def test_eta_orthobases(capsys):
    code, out, _ = run(["eta", "--family", "concat-orthobases", "--n", "8", "--r", "2", "--seed", "1"], capsys)
    assert code == 0
    assert float(out.split("=")[1]) <= 1e-10


def test_eta_with_bound(capsys):
    code, out, _ = run(["eta", "--family", "gaussian", "--n", "16", "--p", "256", "--seed", "1", "--t", "2"], capsys)
    assert code == 0 and "gaussian_bound=" in out and "within_bound=" in out


def test_coherence_from_file(tmp_path, capsys):
    path = tmp_path / "I.txt"
    path.write_text("2 4\n1 0 1 0\n0 1 0 1\n")
    code, out, _ = run(["coherence", "--matrix", str(path)], capsys)
    assert code == 0 and float(out.split("=")[1]) == 1.0


def test_rip(capsys):
    code, out, _ = run(["rip", "--family", "gaussian", "--n", "4", "--p", "8", "--seed", "2", "--s", "2"], capsys)
    assert code == 0
    assert "subsets_examined=28" in out


def test_rip_cap_is_numeric_error(capsys):
    code, _, err = run(
        ["rip", "--family", "gaussian", "--n", "4", "--p", "100", "--seed", "2", "--s", "3", "--cap", "10"], capsys
    )
    assert code == 2 and "noisefold:" in err


def test_whiten_and_recover(tmp_path, capsys):
    A = gen_gaussian(8, 32, 4)
    x = np.zeros(32)
    x[[3, 20]] = [1.0, -1.0]
    y = A @ x
    apath, ypath = tmp_path / "A.txt", tmp_path / "y.txt"
    write_matrix(apath, A)
    write_vector(ypath, y)

    bpath, wy = tmp_path / "B.txt", tmp_path / "wy.txt"
    code, out, _ = run(
        ["whiten", "--matrix", str(apath), "--sigma", "1", "--sigma0", "0", "--out-b", str(bpath), "--y", str(ypath), "--out-y", str(wy)],
        capsys,
    )
    assert code == 0 and out.startswith("gamma=")
    np.testing.assert_allclose(read_matrix(bpath), A, atol=1e-14)
    np.testing.assert_allclose(read_vector(wy), y, atol=1e-14)

    xpath = tmp_path / "x.txt"
    code, _, err = run(["recover", "--matrix", str(apath), "--y", str(ypath), "--s", "2", "--out", str(xpath)], capsys)
    assert code == 0 and "support=" in err
    np.testing.assert_allclose(read_vector(xpath), x, atol=1e-10)


def test_sweep_workers_byte_identical(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text(CONFIG)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["sweep", "--config", str(cfg), "--output", str(a)], capsys)[0] == 0
    assert run(["sweep", "--config", str(cfg), "--output", str(b), "--workers", "4"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("trial,model,eta,gamma,squared_error,support_recovered\n")


def test_sweep_stdout(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text(CONFIG)
    code, out, _ = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 0 and len(out.splitlines()) == 1 + 15


def test_config_error_exit(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text(CONFIG.replace("sigma = 0.05\n", ""))
    code, _, err = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 1 and "sigma" in err


def test_missing_config_file(tmp_path, capsys):
    code, _, _ = run(["sweep", "--config", str(tmp_path / "nope.txt")], capsys)
    assert code == 1


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["rip", "--family", "gaussian"])
    assert exc.value.code == 1


def test_missing_matrix_source(capsys):
    code, _, _ = run(["eta"], capsys)
    assert code == 1


def test_singular_whitening_exit(tmp_path, capsys):
    path = tmp_path / "A.txt"
    path.write_text("2 3\n1 0 1\n0 0 0\n")
    code, _, _ = run(["whiten", "--matrix", str(path), "--sigma", "0", "--sigma0", "1"], capsys)
    assert code == 2


def test_verify_ok(capsys):
    code, out, _ = run(["verify", "--seeds", "1,2", "--p", "1024"], capsys)
    assert code == 0
    assert "theorem failures: 0; exit status 0" in out


def test_verify_theorem_failure(monkeypatch, capsys):
    def broken(A, noise, s, **kw):
        return PropositionVerdict("prop1", 0.1, True, 2.0, 1.0, False, -1.0, {"tightest": "alpha"})

    monkeypatch.setattr(harness, "verify_prop1", broken)
    code, out, _ = run(["verify", "--seeds", "1"], capsys)
    assert code == 3
    assert "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "noisefold", "eta", "--family", "gaussian", "--n", "4", "--p", "8", "--seed", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("eta=")
