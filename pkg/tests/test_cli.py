"""End-to-end CLI checks through subprocesses: output formats, exit codes,
manifests, and byte-level determinism across thread counts."""

import csv
import hashlib
import io
import json
import subprocess
import sys

import pytest

from markovlab.config import config_from_json


def run_cli(*args, timeout=300):
    return subprocess.run(
        [sys.executable, "-m", "markovlab", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


def parse_csv(text: str):
    return list(csv.reader(io.StringIO(text)))


class TestArea:
    @pytest.mark.parametrize(
        "domain,extra,expect",
        [
            ("omega", (), "1.333333333333"),
            ("simplex-weighted", (), "1.333333333333"),
            ("delta-l", ("--l", "1"), "2.0"),
        ],
    )
    def test_outputs(self, domain, extra, expect):
        res = run_cli("area", "--domain", domain, *extra)
        assert res.returncode == 0
        assert res.stdout.strip() == expect

    def test_capacity_exit_code(self):
        res = run_cli("area", "--domain", "omega", "--exactness", "5000")
        assert res.returncode == 3
        assert "limit" in res.stderr

    def test_seed_warning(self):
        res = run_cli("area", "--domain", "omega", "--seed", "5")
        assert res.returncode == 0
        assert "ignored" in res.stderr


class TestExtremal:
    def test_first_family_csv(self, tmp_path):
        out = tmp_path / "pk.csv"
        res = run_cli("extremal", "--family", "pk", "--range", "1:5", "--p", "inf",
                      "--out", str(out))
        assert res.returncode == 0
        rows = parse_csv(out.read_text())
        assert rows[0] == ["index", "degree", "cusp_derivative", "norm",
                           "ratio", "ratio_over_expected"]
        k1 = rows[1]
        assert k1[0] == "1" and k1[1] == "1"
        assert float(k1[4]) == pytest.approx(0.25, rel=1e-12)
        # footer on stdout is one JSON object with the fit
        fit = json.loads(res.stdout.strip())["fit"]
        assert fit["n_range"] == [1, 21]

    def test_crlf_line_endings(self, tmp_path):
        out = tmp_path / "pk.csv"
        run_cli("extremal", "--family", "pk", "--range", "1:3", "--out", str(out))
        assert b"\r\n" in out.read_bytes()

    def test_second_family_bound(self):
        res = run_cli("extremal", "--family", "qk", "--range", "2:2", "--p", "inf")
        rows = parse_csv(res.stdout)
        assert float(rows[1][4]) >= 16.0

    def test_manifest(self, tmp_path):
        out = tmp_path / "w.csv"
        res = run_cli("extremal", "--family", "wn", "--range", "4:8", "--alpha", "14",
                      "--l", "3", "--p", "2", "--out", str(out))
        assert res.returncode == 0
        doc = json.loads((tmp_path / "w.csv.manifest.json").read_text())
        assert doc["tool"] == "markovlab"
        assert doc["command"] == "extremal"
        entry = doc["outputs"][0]
        assert entry["path"] == str(out)
        digest = hashlib.sha256(out.read_bytes()).hexdigest()
        assert entry["sha256"] == digest
        assert doc["fit"]["slope"] > 0.0

    def test_degree_cap_is_explicit_error(self):
        res = run_cli("extremal", "--family", "pk", "--range", "1:40")
        assert res.returncode == 2
        assert "degree" in res.stderr.lower()

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli("extremal", "--family", "pk", "--range", "2:6", "--out", str(a))
        run_cli("extremal", "--family", "pk", "--range", "2:6", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestFactor:
    def test_csv_and_footer(self):
        res = run_cli("factor", "--domain", "omega", "--axis", "y", "--n", "1:5")
        assert res.returncode == 0
        lines = res.stdout.strip().splitlines()
        rows = parse_csv("\n".join(lines[:-1]))
        assert rows[0] == ["n", "value", "method"]
        assert rows[1][2] == "eigen"
        assert float(rows[1][1]) == pytest.approx(3.118047822311618, rel=1e-9)
        json.loads(lines[-1])  # footer parses

    def test_threads_byte_identical(self, tmp_path):
        a, b = tmp_path / "t1.csv", tmp_path / "t8.csv"
        run_cli("factor", "--domain", "simplex-weighted", "--axis", "x",
                "--n", "2:8", "--threads", "1", "--out", str(a))
        run_cli("factor", "--domain", "simplex-weighted", "--axis", "x",
                "--n", "2:8", "--threads", "8", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_schur_route(self):
        res = run_cli("factor", "--domain", "schur", "--n", "0:3")
        rows = parse_csv(res.stdout.splitlines()[0] + "\n" + res.stdout.splitlines()[1])
        assert float(rows[1][1]) == pytest.approx(0.9128709291752769, rel=1e-9)

    def test_conditioning_abort_reports_partial(self, tmp_path):
        cfg = tmp_path / "tight.json"
        cfg.write_text(json.dumps({"power_iteration": {"condition_limit": 100.0}}))
        out = tmp_path / "part.csv"
        res = run_cli("factor", "--domain", "omega", "--axis", "y", "--n", "1:9",
                      "--config", str(cfg), "--out", str(out))
        assert res.returncode == 3
        assert "largest completed n: 5" in res.stderr
        rows = parse_csv(out.read_text())
        assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4", "5"]


class TestVerify:
    def test_reduced_pass(self, tmp_path):
        cfg = tmp_path / "quick.json"
        cfg.write_text(json.dumps({
            "acceptance": {"criteria": [1, 2, 9], "pullback_samples": 5,
                           "identity_samples": 10},
        }))
        rep = tmp_path / "report.json"
        res = run_cli("verify", "--config", str(cfg), "--json", str(rep))
        assert res.returncode == 0
        assert res.stdout.count("[PASS]") == 3
        doc = json.loads(rep.read_text())
        assert doc["all_passed"] is True
        assert [c["id"] for c in doc["criteria"]] == [1, 2, 9]

    def test_degraded_grid_fails(self, tmp_path):
        # starving the sup grid drags the fitted exponent below its window
        cfg = tmp_path / "coarse.json"
        cfg.write_text(json.dumps({
            "sup_grid": {"density": 1, "floor": 8},
            "acceptance": {"criteria": [4]},
        }))
        res = run_cli("verify", "--config", str(cfg))
        assert res.returncode == 1
        assert "[FAIL]" in res.stdout

    def test_threads_byte_identical_reports(self, tmp_path):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({
            "acceptance": {"criteria": [5], "koornwinder_degree_range": [2, 6]},
        }))
        reports = []
        for threads in ("1", "8"):
            rep = tmp_path / f"r{threads}.json"
            res = run_cli("verify", "--config", str(cfg), "--json", str(rep),
                          "--threads", threads)
            reports.append((res.returncode, rep.read_bytes()))
        assert reports[0] == reports[1]

    def test_unknown_config_key_exit_2(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"acceptance": {"no_such_knob": 1}}))
        res = run_cli("verify", "--config", str(cfg))
        assert res.returncode == 2
        assert "no_such_knob" in res.stderr

    def test_missing_config_exit_2(self):
        res = run_cli("verify", "--config", "/nonexistent/cfg.json")
        assert res.returncode == 2


class TestConfig:
    def test_print_default_round_trips(self):
        res = run_cli("config", "--print-default")
        assert res.returncode == 0
        cfg = config_from_json(res.stdout)
        assert cfg.acceptance.criteria == tuple(range(1, 12))
        assert cfg.sup_grid.density == 8

    def test_bare_config_is_usage_error(self):
        res = run_cli("config")
        assert res.returncode == 2
