"""Command line interface: golden outputs, precedence, exit codes, manifests."""

import numpy as np
import pytest

from maxthresh.calibration import critical_value
from maxthresh.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def write_csv(path, matrix, header=None):
    lines = [] if header is None else [header]
    lines += [",".join(f"{cell:.17g}" for cell in row) for row in matrix]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def planted_csv(tmp_path):
    # one huge column in a zero background: l1/l2 reject, the exceedance
    # count alone does not
    matrix = np.zeros((64, 50))
    matrix[:, 0] = 10.0
    path = tmp_path / "planted.csv"
    write_csv(path, matrix)
    return path


def rows_of(output):
    lines = output.strip().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestTestCommand:
    def test_all_gammas_on_planted_column(self, planted_csv, capsys):
        assert main(["test", str(planted_csv)]) == EXIT_OK
        header, rows = rows_of(capsys.readouterr().out)
        assert header == ["gamma", "m_hat", "argmax_s", "critical_value", "p_value", "reject"]
        assert [row[0] for row in rows] == ["hc", "l1", "l2"]
        assert [row[5] for row in rows] == ["false", "true", "true"]
        # 17-digit floats round-trip: 0.95 prints as 0.94999999999999996
        assert all(float(row[2]) == 0.95 for row in rows)
        assert float(rows[2][1]) > float(rows[1][1]) > float(rows[0][1])

    def test_single_gamma_row(self, planted_csv, capsys):
        assert main(["test", str(planted_csv), "--gamma", "l2"]) == EXIT_OK
        _, rows = rows_of(capsys.readouterr().out)
        assert len(rows) == 1
        assert rows[0][0] == "l2"
        assert rows[0][5] == "true"

    def test_header_row_is_detected(self, planted_csv, tmp_path, capsys):
        main(["test", str(planted_csv)])
        bare = capsys.readouterr().out
        headed = tmp_path / "headed.csv"
        matrix = np.zeros((64, 50))
        matrix[:, 0] = 10.0
        write_csv(headed, matrix, header=",".join(f"c{j}" for j in range(50)))
        assert main(["test", str(headed)]) == EXIT_OK
        assert capsys.readouterr().out == bare

    def test_manifest_goes_to_stderr_not_stdout(self, planted_csv, capsys):
        main(["test", str(planted_csv)])
        captured = capsys.readouterr()
        assert "command=test" in captured.err
        assert "command=" not in captured.out

    def test_out_writes_csv_and_manifest_sidecar(self, planted_csv, tmp_path, capsys):
        out = tmp_path / "report.csv"
        assert main(["test", str(planted_csv), "--out", str(out)]) == EXIT_OK
        captured = capsys.readouterr()
        assert captured.out == ""
        manifest = (tmp_path / "report.csv.manifest.txt").read_text()
        assert "command=test" in manifest
        assert "version=" in manifest
        assert out.read_text().startswith("gamma,")

    def test_alpha_from_environment(self, planted_csv, capsys, monkeypatch):
        monkeypatch.setenv("MAXTHRESH_ALPHA", "0.2")
        assert main(["test", str(planted_csv), "--gamma", "hc"]) == EXIT_OK
        _, rows = rows_of(capsys.readouterr().out)
        assert float(rows[0][3]) == critical_value(0.2, 50, 0.05)

    def test_flag_beats_environment(self, planted_csv, capsys, monkeypatch):
        monkeypatch.setenv("MAXTHRESH_ALPHA", "0.2")
        assert main(["test", str(planted_csv), "--gamma", "hc", "--alpha", "0.1"]) == EXIT_OK
        _, rows = rows_of(capsys.readouterr().out)
        assert float(rows[0][3]) == critical_value(0.1, 50, 0.05)

    def test_bad_environment_value(self, planted_csv, capsys, monkeypatch):
        monkeypatch.setenv("MAXTHRESH_ALPHA", "lots")
        assert main(["test", str(planted_csv)]) == EXIT_USAGE

    def test_gamma_from_environment(self, planted_csv, capsys, monkeypatch):
        monkeypatch.setenv("MAXTHRESH_GAMMA", "l1")
        assert main(["test", str(planted_csv)]) == EXIT_OK
        _, rows = rows_of(capsys.readouterr().out)
        assert [row[0] for row in rows] == ["l1"]

    def test_standardize_rejects_constant_column(self, tmp_path, capsys):
        matrix = np.zeros((64, 50))
        matrix[:, 0] = 10.0
        path = tmp_path / "const.csv"
        write_csv(path, matrix)
        assert main(["test", str(path), "--standardize"]) == EXIT_DATA

    def test_exit_codes_for_bad_input(self, tmp_path, capsys):
        assert main(["test", str(tmp_path / "absent.csv")]) == EXIT_DATA
        ragged = tmp_path / "ragged.csv"
        ragged.write_text("1,2,3\n4,5\n6,7,8\n", encoding="utf-8")
        assert main(["test", str(ragged)]) == EXIT_DATA
        alpha_bad = tmp_path / "ok.csv"
        write_csv(alpha_bad, np.zeros((64, 50)) + np.arange(50))
        assert main(["test", str(alpha_bad), "--alpha", "1.5"]) == EXIT_USAGE
        assert main(["test", str(alpha_bad), "--gamma", "l3"]) == EXIT_USAGE


class TestSimulateCommand:
    def test_preset_restriction_row_count(self, tmp_path, capsys):
        # 2 rho x 1 beta x 8 r scenarios, 2 dedicated size rows, 3 gammas,
        # 2 calibrations each
        rc = main([
            "simulate", "--preset", "fig3", "--beta", "0.8",
            "--reps", "60", "--null-reps", "1000",
        ])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert len(lines) == 109
        header = lines[0].split(",")
        assert header == [
            "scenario_id", "p", "n", "rho", "beta", "r", "test", "alpha",
            "calibration", "rejection_rate", "mc_se", "reps", "seed",
        ]
        assert {row.split(",")[8] for row in lines[1:]} == {"gumbel", "mc_adjusted"}
        size_rows = [row for row in lines[1:] if "-size" in row.split(",")[0]]
        assert len(size_rows) == 12  # 2 cells x 3 gammas x 2 calibrations
        assert all(row.split(",")[5] == "0" for row in size_rows)

    def test_byte_identical_across_runs_and_workers(self, tmp_path, capsys):
        base = [
            "simulate", "--preset", "fig3", "--rho", "0.3", "--beta", "0.8",
            "--r", "1.1", "--reps", "40", "--null-reps", "1000",
        ]
        paths = [tmp_path / name for name in ("a.csv", "b.csv", "c.csv")]
        assert main(base + ["--workers", "1", "--out", str(paths[0])]) == EXIT_OK
        assert main(base + ["--workers", "2", "--out", str(paths[1])]) == EXIT_OK
        assert main(base + ["--workers", "1", "--out", str(paths[2])]) == EXIT_OK
        blobs = [path.read_bytes() for path in paths]
        assert blobs[0] == blobs[1] == blobs[2]
        assert blobs[0].decode().count("\n") == 13  # header + 2 configs x 6

    def test_config_file_scenario(self, tmp_path, capsys):
        cfg = tmp_path / "cell.cfg"
        cfg.write_text(
            "# one small null cell\n"
            "p = 80\nn = 20\nrho = 0.0\nbeta = 0.7\nr = 0.0\n"
            "scenario_id = cfgtest\n",
            encoding="utf-8",
        )
        rc = main(["simulate", "--config", str(cfg), "--reps", "30", "--null-reps", "1000"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 13
        assert any(row.startswith("cfgtest,80,20,") for row in lines[1:])

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("p = 80\nn = 20\nrho = 0.0\nbogus = 1\n", encoding="utf-8")
        assert main(["simulate", "--config", str(cfg)]) == EXIT_USAGE
        assert "unknown key" in capsys.readouterr().err

    def test_needs_preset_or_config(self, capsys):
        assert main(["simulate"]) == EXIT_USAGE
        assert "--preset or --config" in capsys.readouterr().err


class TestBoundaryCommand:
    def test_default_grid_golden_rows(self, capsys):
        assert main(["boundary"]) == EXIT_OK
        header, rows = rows_of(capsys.readouterr().out)
        assert header == [
            "beta", "r", "rho_star", "rho_star_theta", "regime", "best_s", "case",
        ]
        assert len(rows) == 9 * 24
        table = {
            (round(float(row[0]), 10), round(float(row[1]), 10)): row for row in rows
        }
        strict = table[(0.75, 1.2)]
        assert strict[2] == "0.25"
        assert strict[4] == "strict"
        assert strict[5] != "" and strict[6] != ""
        dead = table[(0.75, 0.1)]
        assert dead[4] == "undetectable"
        assert dead[5] == "" and dead[6] == ""
        assert all(row[3] == "" for row in rows)  # no --theta

    def test_theta_fills_restricted_column(self, capsys):
        assert main(["boundary", "--theta", "0.5"]) == EXIT_OK
        _, rows = rows_of(capsys.readouterr().out)
        assert all(row[3] != "" for row in rows)
        for row in rows:
            assert float(row[3]) >= float(row[2]) - 1e-12

    def test_bad_grid(self, capsys):
        assert main(["boundary", "--beta-grid", "0.6:0.9"]) == EXIT_USAGE
        assert main(["boundary", "--r-grid", "0.9:0.1:5"]) == EXIT_USAGE


class TestCalibrateCommand:
    def test_gumbel_column_matches_library(self, capsys):
        rc = main([
            "calibrate", "--preset", "fig3", "--rho", "0.3", "--null-reps", "1000",
        ])
        assert rc == EXIT_OK
        header, rows = rows_of(capsys.readouterr().out)
        assert header == [
            "gamma", "p", "n", "rho", "alpha", "gumbel_critical",
            "mc_critical", "null_reps", "seed",
        ]
        assert [row[0] for row in rows] == ["hc", "l1", "l2"]
        for row in rows:
            assert float(row[5]) == critical_value(0.05, 500, 0.05)
            assert float(row[6]) != float(row[5])
            assert row[7] == "1000" and row[8] == "1729"

    def test_null_reps_floor(self, capsys):
        rc = main(["calibrate", "--preset", "fig3", "--null-reps", "500"])
        assert rc == EXIT_USAGE
        assert "at least 1000" in capsys.readouterr().err

    def test_needs_preset_or_config(self, capsys):
        assert main(["calibrate"]) == EXIT_USAGE
