import csv
import io
import json
from unittest.mock import patch

import pytest

from rgbose import cli
from rgbose.cli import EXIT_ERROR, EXIT_OK, EXIT_STRICT, EXIT_USAGE, CommandResult, SweepSpec, main
from rgbose.lab.errors import ConfigError, DomainError


def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_USAGE
    assert "rg-bose" in capsys.readouterr().out


def test_sweep_spec_parse():
    spec = SweepSpec.parse("gamma:2:3:3")
    assert spec.values() == [2.0, 2.5, 3.0]
    for text in ("gamma:2:3", "lambda:a:b:2", "mass:1:2:2", "lambda:0.1:0.2:0"):
        with pytest.raises(ConfigError):
            SweepSpec.parse(text)


def test_empty_sweep_is_a_usage_error(capsys):
    assert main(["trees", "--max-n", "3", "--sweep", "lambda:0.1:0.2:0"]) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_powercount_figures(capsys):
    assert main(["powercount", "--strict"]) == EXIT_OK
    rows = _csv_rows(capsys.readouterr().out)
    assert list(rows[0]) == ["figure", "n_l", "n_t", "printed", "computed", "agrees"]
    misprint = [r for r in rows if r["agrees"] == "False"]
    assert len(misprint) == 1
    assert (misprint[0]["figure"], misprint[0]["printed"], misprint[0]["computed"]) == ("effective_2d", "-1/2", "1/2")


def test_powercount_input_file(tmp_path, capsys):
    source = tmp_path / "kernels.json"
    source.write_text(json.dumps([{"ext": {"n_l": 0, "n_t": 4}, "regime": {"d": 3, "region": "below_hbar"}}]))
    assert main(["powercount", "--input", str(source)]) == EXIT_OK
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0]["kind"] == "marginal"
    assert rows[0]["delta"] == "0"


@pytest.mark.parametrize("entry", [
    {"ext": {"n_l": 0, "n_legs": 4}, "regime": {"d": 3, "region": "below_hbar"}},
    {"ext": {"n_t": 4}},
    {"ext": {"n_t": -1}, "regime": {"d": 3, "region": "below_hbar"}},
    {"ext": {"n_t": 4}, "regime": {"d": 4, "region": "below_hbar"}},
    {"ext": {"n_t": 4}, "regime": {"d": 2, "region": "sideways"}},
])
def test_malformed_powercount_input_is_a_usage_error(tmp_path, caplog, entry):
    source = tmp_path / "kernels.json"
    source.write_text(json.dumps([entry]))
    assert main(["powercount", "--input", str(source)]) == EXIT_USAGE
    assert "Invalid power-counting input" in caplog.text


def test_betas_csv(capsys):
    assert main(["betas", "--gamma", "2"]) == EXIT_OK
    rows = _csv_rows(capsys.readouterr().out)
    assert list(rows[0]) == ["quantity", "gamma", "profile", "quadrature", "closed_form", "rel_err"]
    assert [r["quantity"] for r in rows] == [f"beta_tilde_{n}_2d" for n in range(4)] + ["beta2_3d"]


def test_trees_sweep_to_json_file(tmp_path):
    out = tmp_path / "trees.json"
    assert main(["trees", "--max-n", "4", "--h-min", "-8", "--sweep", "gamma:2:3:2",
                 "--format", "json", "--out", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text())
    assert len(rows) == 8
    assert [r["gamma"] for r in rows] == [2.0] * 4 + [3.0] * 4
    assert [r["enumerated"] for r in rows[:4]] == [1, 1, 2, 5]


def test_counterterm_constant_beta(capsys):
    assert main(["counterterm", "--constant-beta", "1", "--steps", "5", "--lambda", "0.05"]) == EXIT_OK
    rows = _csv_rows(capsys.readouterr().out)
    assert len(rows) == 6
    for row in rows:
        assert float(row["nu"]) == pytest.approx(-1.0 / 3.0, abs=1e-10)


def test_strict_mode_reports_breaches():
    failing = {"trees": lambda cfg, params: CommandResult([{"n": 1}], ["count mismatch"])}
    with patch.dict(cli.COMMANDS, failing), patch("rgbose.cli.write_output"):
        assert main(["trees"]) == EXIT_OK
        assert main(["trees", "--strict"]) == EXIT_STRICT


def test_domain_errors_exit_with_failure():
    def broken(cfg, params):
        raise DomainError("out of range")

    with patch.dict(cli.COMMANDS, {"trees": broken}):
        assert main(["trees"]) == EXIT_ERROR


def test_config_document(tmp_path, capsys):
    good = tmp_path / "run.json"
    good.write_text(json.dumps({"params": {"lambda": 0.05, "d": 3, "cutoff": {"kind": "sharp"}}, "format": "json"}))
    with patch("rgbose.cli.run", return_value=EXIT_OK) as run:
        assert main(["trees", "--config", str(good), "--gamma", "3"]) == EXIT_OK
    cfg = run.call_args[0][0]
    assert (cfg.params.lam, cfg.params.gamma, cfg.params.cutoff) == (0.05, 3.0, "sharp")
    assert cfg.format == "json"

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"params": {"gamma": 0.5}}))
    assert main(["trees", "--config", str(bad)]) == EXIT_USAGE
    assert main(["trees", "--config", str(tmp_path / "missing.json")]) == EXIT_USAGE


def test_default_formats():
    parser = cli.build_parser()
    assert cli.build_run_config(parser.parse_args(["ward"])).format == "json"
    assert cli.build_run_config(parser.parse_args(["trees"])).format == "csv"
    with pytest.raises(ConfigError):
        cli.build_run_config(parser.parse_args(["trees", "--tol", "0"]))


def test_render_uses_full_precision():
    text = cli.render([{"x": 1.0 / 3.0, "tag": "a"}], "csv")
    assert text.splitlines() == ["x,tag", "0.33333333333333331,a"]
