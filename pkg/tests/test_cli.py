import json
import math
import os

import pytest

from cfstats.cli import main


def run(args):
    return main(args)


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestEnumerate:
    def test_gauss_totient_rows(self, tmp_path):
        out = tmp_path / "o"
        assert run(
            ["enumerate", "--algorithm", "gauss", "--denominator-bound", "5",
             "--targets", "1,2", "--out", str(out)]
        ) == 0
        lines = read(out / "trajectories.csv").decode().strip().split("\n")
        assert lines[0].startswith("# schema=")
        assert lines[1] == "denominator,num1,depth,weight,N_1,N_2"
        assert len(lines) == 2 + 9

    def test_jp_bound_two_rows(self, tmp_path):
        out = tmp_path / "o"
        assert run(
            ["enumerate", "--algorithm", "jp2", "--denominator-bound", "2",
             "--targets", "1:2", "--out", str(out)]
        ) == 0
        lines = read(out / "trajectories.csv").decode().strip().split("\n")
        rows = [ln.split(",") for ln in lines[2:]]
        pts = {(r[0], r[1], r[2]) for r in rows}
        assert pts == {("2", "1", "0"), ("2", "1", "1"), ("2", "1", "2"), ("2", "2", "1")}

    def test_empty_targets_rejected(self, tmp_path):
        assert run(
            ["enumerate", "--algorithm", "gauss", "--denominator-bound", "5",
             "--targets", "", "--out", str(tmp_path / "o")]
        ) == 1

    def test_budget_exit_code(self, tmp_path):
        assert run(
            ["enumerate", "--algorithm", "gauss", "--denominator-bound", "100",
             "--targets", "1", "--budget", "10", "--out", str(tmp_path / "o")]
        ) == 3

    def test_both_bounds_rejected(self, tmp_path):
        assert run(
            ["enumerate", "--algorithm", "gauss", "--denominator-bound", "5",
             "--Q", "3.0", "--targets", "1", "--out", str(tmp_path / "o")]
        ) == 1


class TestStats:
    ARGS = ["--algorithm", "gauss", "--denominator-bound", "120", "--targets", "1,2",
            "--grid", "64", "--jmax", "256"]

    def test_summary_fields(self, tmp_path):
        out = tmp_path / "o"
        assert run(["stats", *self.ARGS, "--out", str(out)]) == 0
        data = json.loads(read(out / "summary.json"))
        assert data["schema_version"] == "cfstats.v1"
        assert data["ensemble_size"] == sum(
            1 for q in range(2, 121) for p in range(1, q) if math.gcd(p, q) == 1
        )
        assert len(data["lambda_empirical"]) == 2
        assert len(data["covariance_spectral"]) == 2
        assert (out / "histogram.csv").exists()
        assert (out / "schema.json").exists()

    def test_byte_identical_reruns(self, tmp_path):
        o1, o2 = tmp_path / "a", tmp_path / "b"
        run(["stats", *self.ARGS, "--out", str(o1)])
        run(["stats", *self.ARGS, "--out", str(o2)])
        assert read(o1 / "summary.json") == read(o2 / "summary.json")
        assert read(o1 / "histogram.csv") == read(o2 / "histogram.csv")

    def test_threads_do_not_change_bytes(self, tmp_path):
        o1, o2 = tmp_path / "a", tmp_path / "b"
        run(["stats", *self.ARGS, "--threads", "1", "--out", str(o1)])
        run(["stats", *self.ARGS, "--threads", "2", "--out", str(o2)])
        assert read(o1 / "summary.json") == read(o2 / "summary.json")

    def test_config_file_with_flag_override(self, tmp_path):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({
            "algorithm": "gauss", "denominator_bound": 60, "targets": [1],
            "grid": 64, "jmax": 256,
        }))
        out = tmp_path / "o"
        assert run(["stats", "--config", str(cfgfile), "--denominator-bound", "80",
                    "--out", str(out)]) == 0
        data = json.loads(read(out / "summary.json"))
        assert data["config"]["denominator_bound"] == 80  # flag wins


class TestCltLdp:
    def test_clt_needs_grid(self, tmp_path):
        assert run(["clt", "--algorithm", "gauss", "--denominator-bound", "60",
                    "--targets", "1", "--out", str(tmp_path / "o")]) == 1

    def test_ldp_run(self, tmp_path):
        out = tmp_path / "o"
        code = run(["ldp", "--algorithm", "gauss", "--denominator-bound", "200",
                    "--targets", "1", "--grid", "64", "--jmax", "256",
                    "--q-grid", "7,8,9,10", "--epsilon", "0.1,0.2", "--out", str(out)])
        assert code == 0
        data = json.loads(read(out / "summary.json"))
        ldp = data["ldp"]["1"]
        assert set(ldp) == {"0.10000000000000001", "0.20000000000000001"}
        assert len(ldp["0.10000000000000001"]["proportion"]) == 4

    def test_clt_run_ks_by_q(self, tmp_path):
        out = tmp_path / "o"
        code = run(["clt", "--algorithm", "gauss", "--denominator-bound", "200",
                    "--targets", "1", "--grid", "64", "--jmax", "256",
                    "--q-grid", "8,10", "--out", str(out)])
        assert code == 0
        data = json.loads(read(out / "summary.json"))
        assert len(data["ks_by_Q"]) == 2


class TestSpectral:
    def test_constants_payload(self, tmp_path):
        out = tmp_path / "o"
        assert run(["spectral", "--algorithm", "gauss", "--targets", "1",
                    "--grid", "128", "--jmax", "512", "--out", str(out)]) == 0
        data = json.loads(read(out / "constants.json"))
        assert data["entropy"] == pytest.approx(math.pi**2 / (6 * math.log(2)), abs=1e-2)
        assert data["witnesses"][0] == pytest.approx(-0.9624236501, abs=1e-6)
        assert data["witnesses"][1] == pytest.approx(-1.7627471740, abs=1e-6)
        assert abs(data["eigenvalue_at_1"] - 1) < 1e-4
        assert (out / "density.csv").exists()

    def test_brun3_rejected(self, tmp_path):
        assert run(["spectral", "--algorithm", "brun3", "--targets", "1",
                    "--out", str(tmp_path / "o")]) == 1


class TestVerify:
    def test_single_cheap_criterion(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run(["verify", "--criteria", "A10", "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "A10 PASS" in printed
        report = json.loads(read(out / "verify_report.json"))
        assert report["criteria"][0]["name"] == "A10"

    def test_unknown_criterion(self, tmp_path):
        assert run(["verify", "--criteria", "A99", "--out", str(tmp_path / "o")]) == 1

    def test_failing_criterion_gives_exit_two(self, tmp_path, monkeypatch):
        from cfstats import acceptance

        monkeypatch.setitem(
            acceptance.CRITERIA,
            "A10",
            lambda ctx: acceptance.CriterionResult("A10", False, "stubbed failure"),
        )
        assert run(["verify", "--criteria", "A10", "--out", str(tmp_path / "o")]) == 2

    def test_crashing_criterion_reported_not_raised(self, tmp_path, monkeypatch, capsys):
        from cfstats import acceptance

        def boom(ctx):
            raise RuntimeError("spectral non-convergence")

        monkeypatch.setitem(acceptance.CRITERIA, "A10", boom)
        assert run(["verify", "--criteria", "A10", "--out", str(tmp_path / "o")]) == 2
        assert "non-convergence" in capsys.readouterr().out
