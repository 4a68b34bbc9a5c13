import csv
import subprocess
import sys

import pytest

from rumor_renewal.cli import run


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_exact_frac(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert run(["exact", "--dist", "frac:c=2", "--n", "100", "--tol", "1e-9", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "positive_recurrent" in text
    mu = float(next(l for l in text.splitlines() if l.startswith("mu")).split()[1])
    surv = float(next(l for l in text.splitlines() if l.startswith("P(survival)")).split()[1])
    assert mu == pytest.approx(2, abs=1e-9) and surv == pytest.approx(0.5, abs=1e-9)
    rows = _rows(out)
    assert rows[0] == ["n", "q_n", "u_n", "mu_inv", "abs_gap"]
    assert len(rows) == 102
    assert rows[2][1] == "0.66666666666666674"  # q_1 = 2/3 at 17 significant digits


def test_exact_finite_and_invalid(capsys):
    assert run(["exact", "--dist", "finite:0.5,0.3,0.2", "--n", "5"]) == 0
    assert "transient" in capsys.readouterr().out
    assert run(["exact", "--dist", "finite:0.5,0.3"]) == 2
    assert "0.8" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["exact"],
    ["exact", "--dist", "frac:c=2", "--n", "0"],
    ["exact", "--dist", "frac:c=2", "--tol", "-1"],
    ["exact", "--dist", "frac:c=2", "--bogus", "1"],
    ["fp-sim", "--dist", "frac:c=2", "--reps", "-5"],
    ["verify", "--dist", "frac:c=2"],
    ["verify", "--suite", "nosuch", "--dist", "frac:c=2"],
    ["verify", "--suite", "clt", "--dist", "frac:c=2"],
    ["verify", "--suite", "lemma1", "--dist", "frac:c=2"],
    ["bounds", "--dist", "frac:c=2"],
    ["exact", "--dist", "sparse(eps=0;frac:c=2)"],
])
def test_invalid_input_exit_2(argv, capsys):
    assert run(argv) == 2


def test_verify_lemma1(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert run(["verify", "--suite", "lemma1", "--dist", "finite:0.5,0.3,0.2", "--n", "8", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert all(l.startswith("PASS") for l in lines)
    rows = _rows(out)
    assert rows[0] == ["name", "statistic", "pvalue", "pass", "detail"]
    assert len(rows) == 10 and all(r[3] == "TRUE" for r in rows[1:])


def test_verify_failure_exit_1(capsys):
    # geometric suite on a surviving law cannot pass
    assert run(["verify", "--suite", "geometric", "--dist", "frac:c=2"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_clt_z_output(tmp_path, capsys):
    z = tmp_path / "z.csv"
    assert run(["verify", "--suite", "clt", "--dist", "powratio:a=4", "--reps", "1000", "--z-out", str(z)]) == 0
    rows = _rows(z)
    assert rows[0] == ["rep", "z_value"] and len(rows) == 1001


def test_fp_sim_outputs(tmp_path, capsys):
    out, log = tmp_path / "f.csv", tmp_path / "l.csv"
    argv = ["fp-sim", "--dist", "finite:0.5,0.3,0.2", "--n", "6", "--reps", "5000", "--out", str(out),
            "--trial-log", str(log)]
    assert run(argv) == 0
    rows = _rows(out)
    assert rows[0] == ["n", "P_exact", "P_hat", "stderr"] and len(rows) == 7
    assert rows[3][1] == "0.22499999999999998"
    lrows = _rows(log)
    assert lrows[0] == ["trial", "seed_index", "status", "M"] and len(lrows) == 5001
    assert {r[2] for r in lrows[1:]} <= {"Died", "AliveAtHorizon"}


def test_rfp_sim_outputs(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert run(["rfp-sim", "--dist", "frac:c=2", "--n", "20000", "--reps", "20", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "Survives" in text
    rows = _rows(out)
    assert rows[0] == ["n", "N_n", "ratio"]
    assert rows[-1][0] == "20000" and abs(float(rows[-1][2]) - 0.5) < 0.03


def test_bounds_csv(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run(["bounds", "--dist", "geomdefect:C=0.5,r=0.5", "--n", "50", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["k", "u_k", "bound_k", "ratio"] and len(rows) == 52
    assert rows[2][2] == "1.6487212707001282"
    assert all(float(r[3]) <= 1 for r in rows[1:])


def test_bounds_explicit_variant(tmp_path, capsys):
    out = tmp_path / "b.csv"
    argv = ["bounds", "--dist", "powratio:a=0.75", "--n", "100", "--variant", "regvar", "--params", "alpha=0.75",
            "--out", str(out)]
    assert run(argv) == 0
    rows = _rows(out)
    assert rows[1][2] == ""  # k = 0 lies outside the regvar range


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# acceptance table\ndist = finite:0.5,0.3,0.2\nn = 4\n")
    out = tmp_path / "e.csv"
    assert run(["exact", "--config", str(conf), "--out", str(out)]) == 0
    assert len(_rows(out)) == 6
    # flags win over the file
    assert run(["exact", "--config", str(conf), "--n", "2", "--out", str(out)]) == 0
    assert len(_rows(out)) == 4
    conf.write_text("colour = blue\n")
    assert run(["exact", "--config", str(conf)]) == 2


def test_csv_byte_identical_across_runs_and_workers(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["fp-sim", "--dist", "frac:c=2", "--n", "30", "--reps", "10000", "--seed", "7"]
    assert run(base + ["--out", str(a), "--workers", "1"]) == 0
    assert run(base + ["--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rumor_renewal", "exact", "--dist", "finite:0.5,0.3"],
                         capture_output=True, text=True)
    assert res.returncode == 2
    res = subprocess.run([sys.executable, "-m", "rumor_renewal", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout
