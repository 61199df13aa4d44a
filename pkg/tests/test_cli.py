import csv
import io
import json
import math
import subprocess
import sys

import pytest

from friable.cli import FRIABLE_HEADER, SPECFN_HEADER, VERIFY_HEADER, main
from friable.sieve.io import CSV_FIELDS


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSpecfn:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "specfn", "--kappa", "1", "2", "--u-min", "0", "--u-max", "3",
                           "--u-step", "0.5")
        assert code == 0
        data = rows(out)
        assert tuple(data[0]) == SPECFN_HEADER
        assert len(data) == 1 + 2 * 7
        first = dict(zip(data[0], data[1]))
        assert float(first["lambda"]) == 1.0
        assert first["mu"] == "" and first["rho_asym"] == ""
        u2 = dict(zip(data[0], data[5]))
        assert float(u2["rho"]) == pytest.approx(0.30685281944005469, rel=1e-9)

    def test_missing_kappa(self, capsys):
        code, _, err = run(capsys, "specfn", "--kappa")
        assert code == 2 and "kappa" in err

    def test_empty_grid(self, capsys):
        code, _, _ = run(capsys, "specfn", "--kappa", "1", "--u-min", "3", "--u-max", "1")
        assert code == 2

    def test_writes_file(self, capsys, tmp_path):
        out = tmp_path / "t.csv"
        code, stdout, _ = run(capsys, "specfn", "--kappa", "1", "--u-max", "1", "--out", str(out))
        assert code == 0 and stdout == ""
        assert out.read_text().startswith("kappa,u,rho")


class TestFriable:
    def test_grid(self, capsys):
        code, out, _ = run(capsys, "friable", "--u-min", "1", "--u-max", "2", "--u-step", "0.5",
                           "--y-list", "100", "1000")
        assert code == 0
        data = rows(out)
        assert tuple(data[0]) == FRIABLE_HEADER
        assert len(data) == 7
        for r in data[1:]:
            rec = dict(zip(data[0], r))
            assert rec["status"] == "ok"
            assert float(rec["rankin_bound"]) >= float(rec["psi_star"])

    def test_tiny_values(self, capsys):
        code, out, _ = run(capsys, "friable", "--u-min", "1", "--u-max", "1", "--y-list", "3")
        rec = dict(zip(*rows(out)))
        assert float(rec["psi"]) == pytest.approx(11 / 6)
        assert float(rec["psi_star"]) == pytest.approx(7 / 6)

    def test_x_equal_one(self, capsys):
        code, out, _ = run(capsys, "friable", "--u-min", "0", "--u-max", "0", "--y-list", "10")
        rec = dict(zip(*rows(out)))
        assert code == 0
        assert float(rec["psi"]) == 1.0 and float(rec["lambda_u"]) == 1.0
        assert 0 < float(rec["deviation"]) < math.inf

    def test_spec_file(self, capsys, tmp_path):
        spec = tmp_path / "f.json"
        spec.write_text(json.dumps({"kind": "tau_kappa", "kappa": 2}))
        code, out, _ = run(capsys, "friable", "--spec", str(spec), "--u-min", "1", "--u-max", "1.5",
                           "--y-list", "50")
        assert code == 0 and len(rows(out)) == 3

    def test_budget_skip(self, capsys):
        code, out, err = run(capsys, "friable", "--u-min", "4", "--u-max", "4", "--y-list", "1000",
                             "--budget", "100")
        assert code == 0
        assert rows(out)[1][-1] == "skipped"
        assert "skipped" in err

    def test_bad_spec(self, capsys, tmp_path):
        spec = tmp_path / "f.json"
        spec.write_text(json.dumps({"kind": "tau_kappa", "kappa": 2, "colour": 1}))
        code, _, _ = run(capsys, "friable", "--spec", str(spec), "--y-list", "10")
        assert code == 2

    def test_spec_without_natural_kappa(self, capsys, tmp_path):
        spec = tmp_path / "f.json"
        spec.write_text(json.dumps({"kind": "poly_density", "poly_coeffs": [1, 0, 1]}))
        code, _, err = run(capsys, "friable", "--spec", str(spec), "--y-list", "10")
        assert code == 2 and "--kappa" in err

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "friable", "--spec", "/nonexistent.json", "--y-list", "10")
        assert code == 2


class TestVerify:
    def test_writes_suites(self, capsys, tmp_path):
        code, _, err = run(capsys, "verify", "--seed", "0", "--out", str(tmp_path))
        assert code == 0
        for name in ("tail", "partial", "adjoint", "quadform", "normalization"):
            data = rows((tmp_path / f"{name}.csv").read_text())
            assert tuple(data[0]) == VERIFY_HEADER
            assert all(r[-1] == "PASS" for r in data[1:])
        assert "FAIL" not in err

    def test_suite_filter_stdout(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "normalization", "--suite", "adjoint")
        assert code == 0
        suites = {r[0] for r in rows(out) if r[0] != "suite"}
        assert suites == {"normalization", "adjoint"}

    def test_byte_identical(self, capsys, tmp_path):
        for d in ("a", "b"):
            assert run(capsys, "verify", "--suite", "tail", "--suite", "quadform",
                       "--out", str(tmp_path / d))[0] == 0
        for name in ("tail.csv", "quadform.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_changes_corpus(self, capsys):
        a = run(capsys, "verify", "--suite", "tail", "--seed", "0")[1]
        b = run(capsys, "verify", "--suite", "tail", "--seed", "1")[1]
        assert a != b

    def test_failure_exit_code(self, capsys):
        code, _, err = run(capsys, "verify", "--suite", "normalization", "--tol", "0")
        assert code == 1
        assert "FAIL normalization" in err and "seed 0" in err

    def test_unknown_suite(self, capsys):
        assert run(capsys, "verify", "--suite", "nope")[0] == 2


class TestSieve:
    def test_instance_file(self, capsys, tmp_path):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps([
            {"id": "poly", "kind": "interval_poly", "interval": [1, 5000], "q": 15,
             "poly_coeffs": [-1, 0, 1]},
            {"kind": "explicit", "A": list(range(1, 101)), "z": 2, "D": 10, "W": {"2": [1]}},
        ]))
        code, out, _ = run(capsys, "sieve", "--instance", str(path), "--brute")
        assert code == 0
        data = rows(out)
        assert tuple(data[0]) == CSV_FIELDS
        recs = [dict(zip(data[0], r)) for r in data[1:]]
        assert recs[0]["instance"] == "poly" and recs[0]["brute_count"] == "1000"
        assert recs[1]["instance"] == "1" and recs[1]["brute_count"] == "50"
        assert all(float(r["bound"]) >= int(r["brute_count"]) for r in recs)

    def test_without_brute(self, capsys, tmp_path):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps({"kind": "interval_poly", "interval": [1, 50], "q": 6,
                                    "poly_coeffs": [0, 1]}))
        code, out, _ = run(capsys, "sieve", "--instance", str(path))
        rec = dict(zip(*rows(out)))
        assert code == 0 and rec["brute_count"] == "" and rec["ratio"] == ""

    def test_q_one_keeps_everything(self, capsys, tmp_path):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps({"kind": "interval_poly", "interval": [1, 80], "q": 1,
                                    "poly_coeffs": [0, 1]}))
        code, out, _ = run(capsys, "sieve", "--instance", str(path), "--brute")
        rec = dict(zip(*rows(out)))
        assert code == 0 and rec["brute_count"] == "80"
        assert float(rec["bound"]) >= 80

    def test_overlapping_classes(self, capsys, tmp_path):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps({"kind": "explicit", "A": [1, 2, 3], "z": 2, "D": 4,
                                    "W": {"2": [1], "2^2": [3]}}))
        assert run(capsys, "sieve", "--instance", str(path))[0] == 2

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "inst.json"
        path.write_text("{")
        assert run(capsys, "sieve", "--instance", str(path))[0] == 2

    def test_missing_instance(self, capsys):
        assert run(capsys, "sieve")[0] == 2


def test_bench(capsys):
    code, out, _ = run(capsys, "bench")
    assert code == 0
    kernels = [r[0] for r in rows(out)[1:]]
    assert kernels == ["rho_table", "psi_f_1e7", "rho_poly_hensel", "verify_quadform"]


def test_usage_error(capsys):
    assert run(capsys, "nosuchcommand")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "friable", "specfn", "--kappa", "1",
                           "--u-max", "0.5"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(SPECFN_HEADER)
