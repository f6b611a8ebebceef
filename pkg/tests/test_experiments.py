# tests/test_experiments.py
import json
import math
import os

import pandas as pd
import pytest

import dump_field
import run_experiment
import run_suite
from src.experiments import runner as experiment_runner
from src.experiments import (
    EXIT_CONFIG_ERROR,
    EXIT_FAILED,
    EXIT_OK,
    PARAM_DEFAULTS,
    REQUIRED_FIELDS,
    VALID_KINDS,
    ConfigError,
    build_field,
    config_hash,
    load_config,
    resolve_config,
    run_config,
    run_suite as run_named_suite,
    spectral_exactness_check,
    validate_config,
    write_outputs,
)
from src.spectral import FrequencyLattice, SpectralField, WeightModel
from src.utils.report import ExperimentReport


def seminorm_config(**changes):
    config = {
        "schema_version": 1,
        "kind": "seminorm",
        "weights": "explicit:4",
        "d": 1,
        "bandwidth": 4,
        "params": {"field": "cos:1", "scale": "Lambda", "theta": 1.0, "order": 1, "p": "inf"},
    }
    config.update(changes)
    return config


def test_valid_config_has_no_errors():
    assert validate_config(seminorm_config()) == []


@pytest.mark.parametrize("changes, fragment", [
    ({"kind": None}, "kind"),
    ({"colour": "red"}, "Неизвестное поле"),
    ({"d": "3"}, "некорректный тип"),
    ({"schema_version": 2}, "версия схемы"),
    ({"kind": "fit"}, "Некорректный вид"),
    ({"weights": "cubic:1"}, "Некорректный тип весов"),
    ({"bandwidths": [4, 0]}, "bandwidths"),
    ({"params": {"theta": "high"}}, "числом"),
    ({"params": {"radius": 2}}, "Неизвестный параметр"),
    ({"params": {"scale": "Holder"}}, "seminorm.scale"),
    ({"params": {"field": "tan:1"}}, "Некорректный тип поля"),
    ({"params": {"order": 1.5}}, "целым"),
])
def test_invalid_configs(changes, fragment):
    errors = validate_config(seminorm_config(**changes))
    assert errors
    assert any(fragment in error for error in errors)


def test_mc_config_checks():
    config = {"schema_version": 1, "kind": "mc-riesz", "weights": "explicit:1", "d": 1,
              "params": {"n_paths": 1, "checks": ["pairing", "teleport"]}}
    errors = validate_config(config)
    assert any("teleport" in error for error in errors)
    assert any("n_paths" in error for error in errors)
    assert validate_config([1, 2]) == ["Конфигурация должна быть JSON-объектом"]


def test_published_schema_matches_validator():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    with open(os.path.join(root, "schemas", "experiment_config.schema.json"), encoding="utf-8") as f:
        schema = json.load(f)
    assert schema["required"] == REQUIRED_FIELDS
    assert schema["properties"]["kind"]["enum"] == VALID_KINDS
    for kind in VALID_KINDS:
        properties = schema["$defs"][kind]["properties"]
        assert {name: spec["default"] for name, spec in properties.items()} == PARAM_DEFAULTS[kind]


def test_resolve_config_fills_defaults(env_output):
    resolved = resolve_config({"schema_version": 1, "kind": "classify", "weights": "power:0.5"})
    assert resolved["d"] == 3
    assert resolved["bandwidth"] == 8
    assert resolved["seed"] == 0
    assert resolved["xlsx"] is False
    assert resolved["output_dir"] == str(env_output)
    assert resolved["params"] == PARAM_DEFAULTS["classify"]
    # значения по умолчанию не разделяются между конфигурациями
    resolved["params"]["lambdas"].append(2.0)
    assert 2.0 not in PARAM_DEFAULTS["classify"]["lambdas"]


def test_resolve_config_rejects_short_weight_list():
    with pytest.raises(ConfigError) as error:
        resolve_config(seminorm_config(weights="explicit:1,4", d=3))
    assert error.value.errors


def test_config_hash_ignores_output_dir(env_output):
    first = resolve_config(seminorm_config(output_dir="a"))
    second = resolve_config(seminorm_config(output_dir="b"))
    assert config_hash(first) == config_hash(second)
    assert config_hash(first) != config_hash(resolve_config(seminorm_config(seed=1)))


def test_load_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(seminorm_config()), encoding="utf-8")
    assert load_config(str(path))["kind"] == "seminorm"
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(broken))


def test_build_field():
    lattice = FrequencyLattice((4, 4, 4))
    w = WeightModel.power(0.5, 3)
    assert build_field("cos:1", lattice).max_difference(SpectralField.cosine(lattice, (1, 0, 0))) == 0.0
    assert build_field("sin:0,2", lattice).max_difference(SpectralField.sine(lattice, (0, 2, 0))) == 0.0
    random = build_field("random:3:exponential:0.5", lattice)
    assert random.is_real() and random.is_mean_zero()
    assert build_field("random:3:spectral:1", lattice, w).is_real()
    assert build_field("lacunary:0.5", lattice).is_real()
    with pytest.raises(ValueError):
        build_field("tan:1", lattice)
    with pytest.raises(ValueError):
        build_field("cos:1,2,3,4", lattice)
    with pytest.raises(ValueError):
        build_field("random:x", lattice)


def test_run_config_writes_outputs(env_output):
    result = run_config(seminorm_config(xlsx=True))
    assert result.exit_code == EXIT_OK
    assert result.passed
    report = result.reports[0]
    assert report.constants["value"] == pytest.approx(0.8577639, abs=1e-6)
    assert report.provenance["config_hash"] == result.config_hash

    assert os.path.exists(env_output / "report.json")
    assert os.path.exists(env_output / "seminorms.tsv")
    assert os.path.exists(env_output / "tables.xlsx")
    summary = json.loads((env_output / "report.json").read_text(encoding="utf-8"))
    assert summary["config"]["params"]["field"] == "cos:1"
    assert summary["config_hash"] == result.config_hash
    assert summary["passed"] is True
    table = pd.read_csv(env_output / "seminorms.tsv", sep="\t")
    assert list(table.columns[:8]) == ["field_id", "scale", "theta", "order", "p", "value", "argmax", "flag"]


def test_run_config_rejects_bad_parameters(env_output):
    # theta вне (0, 2n) отклоняется до построения отчёта
    with pytest.raises(ConfigError):
        run_config(seminorm_config(params={"theta": 3.0}), write=False)
    assert not os.path.exists(env_output)


def test_write_outputs_disambiguates_tables(tmp_path):
    first = ExperimentReport(name="first", tag="t")
    second = ExperimentReport(name="second[x]", tag="t")
    first.tables["ratios"] = pd.DataFrame({"a": [1.0]})
    second.tables["ratios"] = pd.DataFrame({"a": [math.inf]})
    written = write_outputs([first, second], {"kind": "test"}, "abc", str(tmp_path))
    names = sorted(os.path.basename(path) for path in written)
    assert names == ["ratios.tsv", "ratios__second_x.tsv", "report.json"]


def test_spectral_exactness(torus3):
    w, lattice = torus3
    report = spectral_exactness_check(lattice, w, 3)
    assert report.passed
    assert report.constants["fields"] == 3


def test_unknown_suite(tmp_path):
    with pytest.raises(ConfigError):
        run_named_suite("nightly", str(tmp_path))


def test_cli_folds_flags_into_config():
    args = run_experiment.parse_args(["--log-level", "DEBUG", "seminorm", "--theta", "0.5", "--p", "inf",
                                      "--d", "2", "--bandwidths", "4,2"])
    assert args.log_level == "DEBUG"
    config = run_experiment.config_from_args(args)
    assert config["kind"] == "seminorm"
    assert config["weights"] == run_experiment.DEFAULT_WEIGHTS
    assert config["bandwidths"] == [4, 2]
    assert config["params"] == {"theta": 0.5, "p": math.inf}
    assert validate_config(config) == []


def test_cli_config_file_and_subcommand(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(seminorm_config()), encoding="utf-8")
    args = run_experiment.parse_args(["--config", str(path), "seminorm", "--theta", "0.5"])
    config = run_experiment.config_from_args(args)
    assert config["weights"] == "explicit:4"
    assert config["params"]["theta"] == 0.5
    assert config["params"]["field"] == "cos:1"

    with pytest.raises(ConfigError):
        run_experiment.config_from_args(run_experiment.parse_args(["--config", str(path), "classify"]))
    with pytest.raises(ConfigError):
        run_experiment.config_from_args(run_experiment.parse_args([]))


def test_cli_exit_codes(tmp_path, env_output):
    log = ["--log-level", "WARNING", "--log-file", str(tmp_path / "lab.log")]
    ok = run_experiment.main(log + ["seminorm", "--weights", "explicit:4", "--d", "1", "--bandwidth", "4",
                                    "--p", "inf", "--output-dir", str(tmp_path / "out")])
    assert ok == EXIT_OK
    assert os.path.exists(tmp_path / "out" / "report.json")

    bad = run_experiment.main(log + ["seminorm", "--scale", "Holder"])
    assert bad == EXIT_CONFIG_ERROR
    assert run_suite.main(["nightly"] + log) == EXIT_CONFIG_ERROR


def test_dump_field(tmp_path):
    log = ["--log-level", "WARNING", "--log-file", str(tmp_path / "lab.log")]
    output = tmp_path / "field.csv"
    code = dump_field.main(["cos:1", "--weights", "explicit:1", "--d", "1", "--bandwidth", "4",
                            "--output", str(output)] + log)
    assert code == 0
    frame = pd.read_csv(output)
    assert len(frame) == 9
    assert set(frame.loc[frame["re"] != 0, "n_1"]) == {-1, 1}
    assert dump_field.main(["tan:1", "--output", str(output)] + log) == 2


def experiment_config(kind, params, weights="explicit:1,2,4", d=3, **changes):
    config = {"schema_version": 1, "kind": kind, "weights": weights, "d": d, "params": params}
    config.update(changes)
    return config


@pytest.mark.parametrize("kind, params, fragment", [
    ("seminorm", {"theta": 3.0, "order": 1}, "0 < theta < 2n"),
    ("seminorm", {"scale": "L", "theta": 1.5, "order": 1}, "0 < theta <= k"),
    ("seminorm", {"scale": "Lambda-eta", "theta": 1.5, "eta": 0.5}, "2 eta"),
    ("seminorm", {"p": 0.5}, "p >= 1"),
    ("riesz-bounds", {"ps": [1.0, 2.0]}, "1 < p < inf"),
    ("kernel-bounds", {"checks": ["analyticity"], "ps": ["inf"]}, "1 < p < inf"),
    ("kernel-bounds", {"tmin": 10.0, "tmax": 1.0}, "tmin < tmax"),
    ("kernel-bounds", {"orders": [0]}, "orders"),
    ("gradient-bounds", {"tpoints": 1}, "tpoints"),
    ("classify", {"lambdas": [0.5, 1.5]}, "0 < lambda < 1"),
    ("seminorm-compare", {"comparisons": ["forward"], "theta": 0.5, "lam": 0.5}, "forward"),
    ("seminorm-compare", {"comparisons": ["herz"], "backward_theta": 1.0}, "backward_theta"),
    ("seminorm-compare", {"comparisons": ["riesz"], "p": "inf"}, "1 < p < inf"),
    ("poisson-regularity", {"p": "inf", "theta": 0.5, "lam": 0.3}, "theta/2"),
    ("poisson-regularity", {"profile": "gaussian:1"}, "profile"),
    ("mc-riesz", {"dt": 0.0}, "dt"),
])
def test_parameter_ranges_are_checked_up_front(kind, params, fragment):
    errors = validate_config(experiment_config(kind, params))
    assert any(fragment in error for error in errors), errors


@pytest.mark.parametrize("config", [
    experiment_config("classify", {}, weights="matrix:2,1;1,2", d=2),
    experiment_config("riesz-bounds", {"operators": ["R1R2"]}, weights="explicit:1", d=1),
    experiment_config("seminorm", {"field": "cos:9"}, bandwidth=4),
    experiment_config("mc-riesz", {"i": 2}, weights="explicit:1", d=1),
    experiment_config("mc-riesz", {"h": "cos:0"}, weights="explicit:1", d=1),
])
def test_model_constraints_are_config_errors(env_output, config):
    assert validate_config(config) == []
    with pytest.raises(ConfigError) as error:
        resolve_config(config)
    assert error.value.errors


def failing_seminorm(ctx):
    report = ExperimentReport(name="seminorm[Lambda]", tag="lipschitz-seminorm")
    report.record(-1.0, {"field": ctx.params["field"]})
    report.tables["seminorms"] = pd.DataFrame({"field_id": [ctx.params["field"]], "value": [1.0]})
    return [report]


def broken_seminorm(ctx):
    raise ValueError("деление на ноль в квадратуре")


def test_failed_report_still_writes_outputs(monkeypatch, tmp_path, env_output):
    monkeypatch.setitem(experiment_runner.RUNNERS, "seminorm", failing_seminorm)
    result = run_config(seminorm_config())
    assert result.exit_code == EXIT_FAILED
    assert not result.passed
    summary = json.loads((env_output / "report.json").read_text(encoding="utf-8"))
    assert summary["passed"] is False
    assert summary["reports"][0]["witness"]["field"] == "cos:1"
    assert os.path.exists(env_output / "seminorms.tsv")

    log = ["--log-level", "WARNING", "--log-file", str(tmp_path / "lab.log")]
    assert run_experiment.main(log + ["seminorm", "--output-dir", str(tmp_path / "cli")]) == EXIT_FAILED


def test_runtime_error_is_not_a_config_error(monkeypatch, tmp_path, env_output):
    monkeypatch.setitem(experiment_runner.RUNNERS, "seminorm", broken_seminorm)
    with pytest.raises(ValueError) as error:
        run_config(seminorm_config(), write=False)
    assert not isinstance(error.value, ConfigError)

    log = ["--log-level", "WARNING", "--log-file", str(tmp_path / "lab.log")]
    assert run_experiment.main(log + ["seminorm", "--weights", "explicit:4", "--d", "1"]) == EXIT_FAILED


def test_rerun_reproduces_outputs(tmp_path):
    output = tmp_path / "out"
    config = seminorm_config(output_dir=str(output), seed=5,
                             params={"field": "random:3", "theta": 0.5, "p": 2.0})

    def snapshot():
        run_config(config)
        summary = json.loads((output / "report.json").read_text(encoding="utf-8"))
        summary.pop("generated_at")
        return summary, (output / "seminorms.tsv").read_bytes()

    first = snapshot()
    assert first == snapshot()


@pytest.mark.slow
def test_quick_suite(tmp_path):
    summary, code = run_named_suite("quick", str(tmp_path))
    assert code == EXIT_OK
    assert all(entry["passed"] for entry in summary["criteria"])
    written = json.loads((tmp_path / "suite_quick.json").read_text(encoding="utf-8"))
    assert written["passed"] is True
    assert [entry["id"] for entry in written["criteria"]] == [entry["id"] for entry in summary["criteria"]]
