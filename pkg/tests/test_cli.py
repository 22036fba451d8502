"""Command-line front door: subcommands, exit codes, table and CSV stability."""

import json

import pytest

from cvqkd.cli import main, reference_rows


def write_config(tmp_path, **fields):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(fields) + "\n")
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalytic:
    def test_coherent_simultaneous_table(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent", eve="simultaneous")
        code, out, err = run_cli(capsys, "analytic", config)
        assert code == 0
        assert "5.723%" in out
        assert "compromised" in out

    def test_secure_verdict_for_no_eve(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent")
        code, out, _ = run_cli(capsys, "analytic", config)
        assert code == 0
        assert "secure" in out

    def test_schema_error_names_field(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent", loss=1.2)
        code, _, err = run_cli(capsys, "analytic", config)
        assert code == 2
        assert "loss" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "analytic", "/nonexistent/config.json")
        assert code == 2

    def test_output_is_byte_stable(self, tmp_path, capsys):
        config = write_config(tmp_path, source="epr_squeezed", squeezing_db=10.0,
                              eve="tap", tap_fraction=0.16)
        _, out1, _ = run_cli(capsys, "analytic", config)
        _, out2, _ = run_cli(capsys, "analytic", config)
        assert out1 == out2

    def test_json_output(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent", eve="guess")
        out_path = tmp_path / "report.json"
        code, _, _ = run_cli(capsys, "analytic", config, "--json", str(out_path))
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["analytic"]["bob_test_ber"] == 0.25


class TestSimulate:
    def test_agreement_at_depth(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent", n_bits=10**6, seed=5)
        out_path = tmp_path / "sim.json"
        code, out, _ = run_cli(capsys, "simulate", config, "--json", str(out_path))
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert abs(payload["agreement"]["z_bob_test"]) < 3.0

    def test_same_seed_identical_bytes(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent", eve="simultaneous")
        args = ("simulate", config, "--bits", "20000", "--seed", "9")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2

    def test_single_bit_flags_wide_interval(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent")
        code, out, _ = run_cli(capsys, "simulate", config, "--bits", "1", "--seed", "1")
        assert code == 0
        assert "wide confidence interval" in out


class TestScan:
    def test_tap_sweep_monotone(self, tmp_path, capsys):
        config = write_config(tmp_path, source="epr_squeezed", squeezing_db=10.0,
                              eve="tap", tap_fraction=0.5)
        csv_path = tmp_path / "sweep.csv"
        code, out, _ = run_cli(
            capsys, "scan", config, "--param", "tap_fraction",
            "--from", "0.05", "--to", "0.95", "--steps", "10",
            "--csv", str(csv_path),
        )
        assert code == 0
        text = csv_path.read_text()
        assert "\r" not in text
        lines = text.strip().split("\n")
        assert lines[0] == "tap_fraction,bob_test_ber,eve_key_ber"
        eve_col = [float(line.split(",")[2]) for line in lines[1:]]
        bob_col = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(a > b for a, b in zip(eve_col, eve_col[1:]))
        assert all(a < b for a, b in zip(bob_col, bob_col[1:]))

    def test_single_point_grid(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent")
        csv_path = tmp_path / "one.csv"
        code, out, _ = run_cli(
            capsys, "scan", config, "--param", "tap_fraction",
            "--from", "0.16", "--to", "0.16", "--steps", "1",
            "--csv", str(csv_path),
        )
        assert code == 0
        lines = csv_path.read_text().strip().split("\n")
        assert len(lines) == 2
        _, bob, eve = (float(x) for x in lines[1].split(","))
        assert abs(bob - 0.0203846) < 1e-4
        assert abs(eve - 0.2638997) < 1e-4

    def test_unknown_parameter(self, tmp_path, capsys):
        config = write_config(tmp_path, source="coherent")
        code = main(["scan", config, "--param", "carrier", "--from", "0", "--to", "1",
                     "--steps", "2"])
        assert code == 2


class TestReproduce:
    def test_exit_zero_and_statuses(self, tmp_path, capsys):
        out_path = tmp_path / "rows.json"
        code, out, _ = run_cli(capsys, "reproduce", "--json", str(out_path))
        assert code == 0
        rows = {r["key"]: r for r in json.loads(out_path.read_text())}
        assert rows["guess-test-ber"]["status"] == "PASS"
        assert rows["coherent-simultaneous"]["status"] == "PASS"
        assert rows["squeezed-simultaneous"]["status"] == "PASS"
        assert rows["squeezed-tap-eve"]["status"] == "DOCUMENTED-GAP"
        assert "PASS" in out and "DOCUMENTED-GAP" in out

    def test_gap_rows_report_model_values(self):
        rows = {r.key: r for r in reference_rows()}
        assert rows["squeezed-tap-eve"].computed == pytest.approx(0.4179, abs=1e-3)
        assert rows["squeezed-tap-bob"].computed == pytest.approx(0.0951, abs=1e-3)
        gap_keys = [r.key for r in reference_rows() if r.tolerance is None]
        assert len(gap_keys) == 6

    def test_no_fail_rows(self):
        assert all(r.status != "FAIL" for r in reference_rows())
