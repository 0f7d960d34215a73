import csv
import io
import json
import math

import pytest
from click.testing import CliRunner

from mfhj.commands.options import parse_range, residual_warning
from mfhj.main import cli
from mfhj.schemas import RunConfig


@pytest.fixture
def runner():
    return CliRunner()


def _csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def test_range_syntax():
    grid = parse_range("0.1:3:0.1")
    assert len(grid) == 30
    assert grid[0] == 0.1 and grid[-1] == 3.0
    assert parse_range("4:14", integer=True) == list(range(4, 15))
    assert parse_range("25,50,100", integer=True) == [25, 50, 100]
    assert parse_range("-1:1:0.5") == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert parse_range("0:1:0.25,2") == [0.0, 0.25, 0.5, 0.75, 1.0, 2.0]


@pytest.mark.parametrize("text", ["1:0:0.1", "0:1:0", "0:1:-0.1", "a:b", "1,,2", "0:1:0.1:2", "0:inf:1"])
def test_malformed_ranges(text):
    with pytest.raises(ValueError):
        parse_range(text)


def test_integer_ranges_reject_fractions():
    with pytest.raises(ValueError):
        parse_range("1.5,2", integer=True)


def test_solve_on_shock_line(runner):
    result = runner.invoke(cli, ["solve", "--measure", "dichotomic", "--beta", "2", "--h", "0"])
    assert result.exit_code == 0, result.output
    record = json.loads(result.stdout)
    assert record["command"] == "solve"
    values = record["values"]
    assert values["M"] == pytest.approx(0.9575040240772687, abs=1e-10)
    assert values["branch_count"] == 2
    assert values["A"] == pytest.approx(-values["phi"])


def test_solve_with_counting(runner):
    plain = json.loads(runner.invoke(cli, ["solve", "--measure", "dichotomic", "--beta", "0.5",
                                           "--h", "0.3"]).stdout)["values"]
    counted = json.loads(runner.invoke(cli, ["solve", "--measure", "dichotomic", "--beta", "0.5",
                                             "--h", "0.3", "--counting"]).stdout)["values"]
    assert counted["A"] - plain["A"] == pytest.approx(math.log(2.0))
    assert counted["M"] == plain["M"]


def test_solve_thermodynamic_field_units(runner):
    mechanical = json.loads(runner.invoke(cli, ["solve", "--measure", "dichotomic", "--beta", "2",
                                                "--h", "0.3"]).stdout)["values"]
    thermodynamic = json.loads(runner.invoke(cli, ["solve", "--measure", "dichotomic", "--beta", "2",
                                                   "--h", "0.15", "--field-units",
                                                   "thermodynamic"]).stdout)["values"]
    assert thermodynamic["x"] == pytest.approx(0.3)
    assert thermodynamic["M"] == pytest.approx(mechanical["M"])


def test_negative_beta_is_a_validation_error(runner):
    result = runner.invoke(cli, ["solve", "--measure", "dichotomic", "--beta", "-1", "--h", "0"])
    assert result.exit_code == 2
    report = json.loads(result.stdout)
    assert report["success"] is False
    assert report["error"] == "ValidationError"


def test_missing_measure_names_the_flag(runner):
    result = runner.invoke(cli, ["solve", "--beta", "1", "--h", "0"])
    assert result.exit_code == 2
    assert "--measure" in result.stdout


def test_unknown_flag(runner):
    result = runner.invoke(cli, ["solve", "--temperature", "1"])
    assert result.exit_code == 2


def test_malformed_range_flag(runner):
    result = runner.invoke(cli, ["sweep", "--measure", "dichotomic", "--beta", "3:1:0.1", "--h", "0"])
    assert result.exit_code == 2


def test_inline_and_file_measures(runner, tmp_path):
    spec = {"type": "atoms", "atoms": [[-1.0, 1.0], [0.0, 1.0], [1.0, 1.0]]}
    path = tmp_path / "three.json"
    path.write_text(json.dumps(spec))
    from_file = json.loads(runner.invoke(cli, ["critical", "--measure", str(path)]).stdout)
    inline = json.loads(runner.invoke(cli, ["critical", "--measure", json.dumps(spec)]).stdout)
    assert from_file == inline
    assert from_file["values"]["t_c"] == pytest.approx(1.5, abs=1e-4)
    assert from_file["values"]["bifurcation_t"] == pytest.approx(1.5, abs=1e-4)


def test_asymmetric_measure_needs_symmetrize(runner):
    spec = json.dumps({"type": "atoms", "atoms": [[-1.0, 1.0], [1.0, 3.0]]})
    result = runner.invoke(cli, ["critical", "--measure", spec])
    assert result.exit_code == 2
    assert json.loads(result.stdout)["error"] == "DomainError"
    result = runner.invoke(cli, ["critical", "--measure", spec, "--symmetrize"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["values"]["t_c"] == pytest.approx(1.0, abs=1e-6)


def test_sweep_crosses_critical_time(runner):
    result = runner.invoke(cli, ["sweep", "--measure", "dichotomic", "--beta", "0.5:1.5:0.2", "--h", "0"])
    assert result.exit_code == 0, result.output
    rows = _csv(result.stdout)
    assert list(rows[0]) == ["beta", "h", "M", "A", "f", "branch_count", "residual"]
    for row in rows:
        if float(row["beta"]) < 1.0:
            assert abs(float(row["M"])) < 1e-6
        else:
            assert float(row["M"]) > 0.1


def test_sweeps_run_without_measure_flags(runner):
    result = runner.invoke(cli, ["sweep", "--beta", "0.5:1.5:0.5", "--h", "0"])
    assert result.exit_code == 0, result.output
    assert len(_csv(result.stdout)) == 3
    result = runner.invoke(cli, ["bipartite-sweep", "--beta", "0.5,1.5", "--alpha", "0.25,1"])
    assert result.exit_code == 0, result.output
    assert len(_csv(result.stdout)) == 4


def test_sweep_output_is_deterministic(runner, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        result = runner.invoke(cli, ["sweep", "--measure", "uniform", "--beta", "1:4:1", "--h", "-0.5:0.5:0.25",
                                     "--output", str(path), "--workers", "3"])
        assert result.exit_code == 0, result.output
    assert paths[0].read_bytes() == paths[1].read_bytes()
    meta = [json.loads((tmp_path / (p.name + ".meta.json")).read_text()) for p in paths]
    assert meta[0]["config_hash"] == meta[1]["config_hash"]
    assert meta[0]["command"] == "sweep"
    assert "wall_time_seconds" in meta[0]


def test_config_file_merge_and_override(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"measure": "dichotomic", "beta": [3.0], "h": "0"}))
    result = runner.invoke(cli, ["solve", "--config", str(config), "--beta", "2"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["values"]["beta"] == 2.0
    assert "overrides config file value" in result.stderr


def test_config_file_unknown_key(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"measure": "dichotomic", "beta": [1.0], "h": [0.0], "colour": "red"}))
    result = runner.invoke(cli, ["solve", "--config", str(config)])
    assert result.exit_code == 2


def test_critical_record(runner):
    result = runner.invoke(cli, ["critical", "--measure", "dichotomic"])
    values = json.loads(result.stdout)["values"]
    assert values["t_c"] == pytest.approx(1.0, abs=1e-6)
    assert values["inverse_variance"] == pytest.approx(1.0)
    assert values["support_bound"] == 4.0
    assert values["concave_velocity"] is True


def test_critical_without_transition_reports_null(runner):
    result = runner.invoke(cli, ["critical", "--measure", json.dumps({"type": "atoms", "atoms": [[0.0, 1.0]]})])
    assert result.exit_code == 0, result.output
    values = json.loads(result.stdout)["values"]
    assert values["t_c"] is None
    assert values["inverse_variance"] is None
    assert values["bifurcation_t"] is None
    assert values["support_bound"] == 0.0


def test_tolerance_only_on_commands_with_residuals(runner):
    assert runner.invoke(cli, ["critical", "--measure", "dichotomic", "--tolerance", "1"]).exit_code == 2
    assert runner.invoke(cli, ["shock", "--measure", "dichotomic", "--t", "2",
                               "--tolerance", "1"]).exit_code == 2
    result = runner.invoke(cli, ["bipartite", "--measure-sigma", "dichotomic", "--measure-tau", "dichotomic",
                                 "--beta", "2", "--alpha", "1", "--tolerance", "1e-6"])
    assert result.exit_code == 0, result.output


def test_residual_warning_threshold():
    config = RunConfig(command="bipartite", measure_sigma={"type": "dichotomic"},
                       measure_tau={"type": "dichotomic"}, beta=[2.0], alpha=[1.0], tolerance=1e-12)
    assert residual_warning(config, 1e-9, beta=2.0, alpha=1.0) is True
    assert residual_warning(config, 1e-13, beta=2.0, alpha=1.0) is False


def test_shock_files(runner, tmp_path):
    out = tmp_path / "shock.csv"
    result = runner.invoke(cli, ["shock", "--measure", "dichotomic", "--t", "0.5:2:0.5", "--x0", "0.5:1:0.5",
                                 "--output", str(out)])
    assert result.exit_code == 0, result.output
    rows = _csv(out.read_text())
    assert list(rows[0]) == ["t", "m_plus", "m_minus", "rh_residual", "jump", "shock"]
    assert [float(r["t"]) for r in rows] == [0.5, 1.0, 1.5, 2.0]
    assert [r["shock"] for r in rows] == ["false", "false", "true", "true"]
    assert abs(float(rows[0]["jump"])) <= 1e-8
    shocks = rows[2:]
    assert all(float(r["rh_residual"]) <= 1e-7 for r in shocks)
    assert all(float(r["jump"]) == pytest.approx(2.0 * float(r["m_plus"])) for r in shocks)
    lines = (tmp_path / "shock.characteristics.dat").read_text().splitlines()
    assert lines[0] == "# x0 slope crossing_time"
    assert len(lines) == 3
    assert float(lines[1].split()[1]) == pytest.approx(-math.tanh(0.5))


def test_finiten_files(runner, tmp_path):
    out = tmp_path / "finite.csv"
    result = runner.invoke(cli, ["finiten", "--measure", "dichotomic", "--x", "0.3", "--t", "0.5",
                                 "--n", "25,50,100,200", "--output", str(out)])
    assert result.exit_code == 0, result.output
    rows = _csv(out.read_text())
    assert list(rows[0]) == ["n", "phi_n", "u_n", "err_phi", "err_u", "lemma1_margin"]
    assert [int(r["n"]) for r in rows] == [25, 50, 100, 200]
    assert all(float(r["lemma1_margin"]) >= 0.0 for r in rows)
    summary = json.loads((tmp_path / "finite.summary.json").read_text())
    assert -1.3 <= summary["fitted_slope_phi"] <= -0.7


def test_finiten_needs_single_time(runner):
    result = runner.invoke(cli, ["finiten", "--measure", "dichotomic", "--x", "0.3", "--t", "0.5,1",
                                 "--n", "10,20,40,80"])
    assert result.exit_code == 2


def test_bipartite_decoupled_reduction(runner):
    beta, h1 = 1.5, 0.4
    result = runner.invoke(cli, ["bipartite", "--measure-sigma", "dichotomic", "--measure-tau", "dichotomic",
                                 "--beta", str(beta), "--alpha", "0", "--h1", str(h1), "--counting",
                                 "--field-units", "thermodynamic"])
    assert result.exit_code == 0, result.output
    values = json.loads(result.stdout)["values"]
    assert values["pressure_A"] == pytest.approx(math.log(2.0) + math.log(math.cosh(beta * h1)), abs=1e-10)
    assert -beta * values["free_energy_f"] == pytest.approx(values["pressure_A"])


def test_bipartite_minmax(runner):
    result = runner.invoke(cli, ["bipartite", "--measure-sigma", "dichotomic", "--measure-tau", "dichotomic",
                                 "--beta", "2", "--alpha", "1", "--h1", "0.1", "--minmax"])
    assert result.exit_code == 0, result.output
    values = json.loads(result.stdout)["values"]
    assert values["cross_order_gap"] <= 1e-8
    assert max(values["residuals"]) <= 1e-10


def test_bipartite_sweep_columns(runner):
    result = runner.invoke(cli, ["bipartite-sweep", "--measure-sigma", "dichotomic", "--measure-tau", "dichotomic",
                                 "--beta", "0.5,1.5", "--alpha", "0.25,1"])
    assert result.exit_code == 0, result.output
    rows = _csv(result.stdout)
    assert list(rows[0]) == ["beta", "alpha", "m_tilde", "n_tilde", "d", "A", "f", "branch_count"]
    assert len(rows) == 4


def test_bipartite_finiten(runner):
    result = runner.invoke(cli, ["bipartite-finiten", "--measure-sigma", "dichotomic", "--measure-tau",
                                 "dichotomic", "--beta", "2", "--alpha", "1", "--n1", "4:8"])
    assert result.exit_code == 0, result.output
    rows = _csv(result.stdout)
    assert list(rows[0]) == ["beta", "alpha", "n1", "n2", "exact_pressure", "limit_pressure", "gap",
                             "scaled_gap"]
    assert [int(r["n2"]) for r in rows] == [4, 5, 6, 7, 8]


def test_budget_exceeded_exit_code(runner):
    result = runner.invoke(cli, ["bipartite-finiten", "--measure-sigma", "dichotomic", "--measure-tau",
                                 "dichotomic", "--beta", "1", "--alpha", "1", "--n1", "3000"])
    assert result.exit_code == 2
    assert json.loads(result.stdout)["error"] == "BudgetExceededError"


@pytest.mark.slow
def test_quick_check_passes(runner):
    result = runner.invoke(cli, ["check", "--quick"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["success"] is True
    assert {c["name"] for c in payload["checks"]} >= {"tanh_reduction", "critical_times", "minmax_consistency"}
