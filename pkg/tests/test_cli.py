import csv
import io
import json

import pytest

from mmse_lab import ScenarioRunError, run_scenario
from mmse_lab.cli import (
    CSV_HEADER,
    EXIT_ENGINE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERDICT,
    RunConfig,
    cmd_list,
    cmd_run,
    cmd_selftest,
    main,
)
from mmse_lab.scenarios import builtin_scenarios


def make_config(tmp_path, names, **kw):
    defaults = dict(scenario_names=tuple(names), seed=3,
                    output_dir=str(tmp_path), jobs=2)
    defaults.update(kw)
    return RunConfig(**defaults)


# --------------------------------------------------------------------------
# list
# --------------------------------------------------------------------------

def test_list_shows_the_whole_catalog():
    buf = io.StringIO()
    assert cmd_list(stream=buf) == EXIT_OK
    text = buf.getvalue()
    for name in ("example1", "example2", "example3", "example4"):
        assert name in text
    count = int(text.strip().splitlines()[-1].split()[0])
    assert count >= 8


def test_list_filter_narrows_to_matching_rows():
    buf = io.StringIO()
    cmd_list("example", stream=buf)
    assert buf.getvalue().strip().splitlines()[-1].startswith("4 ")


def test_list_unknown_filter_is_empty_but_ok():
    buf = io.StringIO()
    assert cmd_list("zzz-no-such", stream=buf) == EXIT_OK
    assert buf.getvalue().strip().splitlines()[-1].startswith("0 ")


# --------------------------------------------------------------------------
# run
# --------------------------------------------------------------------------

def test_run_writes_a_report_per_scenario(tmp_path):
    cfg = make_config(tmp_path, ["example1", "example3"])
    assert cmd_run(cfg, stream=io.StringIO(), err_stream=io.StringIO()) == EXIT_OK
    assert (tmp_path / "example1.csv").exists()
    assert (tmp_path / "example3.csv").exists()


def test_run_csv_round_trips_every_float(tmp_path):
    cfg = make_config(tmp_path, ["markov_degraded_family"])
    cmd_run(cfg, stream=io.StringIO(), err_stream=io.StringIO())
    text = (tmp_path / "markov_degraded_family.csv").read_text()
    lines = text.strip().splitlines()
    assert lines[0] == CSV_HEADER

    report = run_scenario(builtin_scenarios()["markov_degraded_family"],
                          cfg.n_grid(), tol_abs=cfg.tol_abs, seed=cfg.seed)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == len(report.rows)
    for got, want in zip(rows, report.rows):
        assert int(got["n"]) == want.n
        assert float(got["mmse"]) == want.mmse  # lossless repr round trip
        assert float(got["second_moment_y"]) == want.second_moment_y
        assert float(got["limit_mmse"]) == report.limit_value


def test_run_is_deterministic_byte_for_byte(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        cfg = make_config(out, ["example2", "example4"], format="json")
        assert cmd_run(cfg, stream=io.StringIO(),
                       err_stream=io.StringIO()) == EXIT_OK
    for name in ("example2.json", "example4.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_run_json_shape(tmp_path):
    cfg = make_config(tmp_path, ["example3"], format="json")
    cmd_run(cfg, stream=io.StringIO(), err_stream=io.StringIO())
    payload = json.loads((tmp_path / "example3.json").read_text())
    assert set(payload) == {"scenario", "rows", "diagnostics", "verdict"}
    assert payload["scenario"] == "example3"
    assert payload["verdict"]["matches"] is True
    assert {"n", "mmse", "std_err"} <= set(payload["rows"][0])


def test_run_tight_tolerance_exits_one_and_names_the_scenario(tmp_path):
    err = io.StringIO()
    cfg = make_config(tmp_path, ["example4"], tol_abs=1e-9)
    assert cmd_run(cfg, stream=io.StringIO(), err_stream=err) == EXIT_VERDICT
    assert "example4" in err.getvalue()


def test_run_unknown_scenario_exits_two(tmp_path):
    err = io.StringIO()
    cfg = make_config(tmp_path, ["no-such-family"])
    assert cmd_run(cfg, stream=io.StringIO(), err_stream=err) == EXIT_USAGE
    assert "no-such-family" in err.getvalue()


def test_run_empty_selection_exits_two(tmp_path):
    cfg = make_config(tmp_path, [])
    assert cmd_run(cfg, stream=io.StringIO(),
                   err_stream=io.StringIO()) == EXIT_USAGE


def test_run_engine_error_exits_three(tmp_path, monkeypatch):
    import dataclasses

    import mmse_lab.cli as cli_mod

    catalog = builtin_scenarios()

    def exploding_realize(n, seed):
        raise ScenarioRunError("synthetic engine failure")

    broken = dataclasses.replace(catalog["example3"], realize=exploding_realize)
    monkeypatch.setattr(cli_mod, "builtin_scenarios",
                        lambda: {"example3": broken})
    cfg = make_config(tmp_path, ["example3"])
    err = io.StringIO()
    assert cmd_run(cfg, stream=io.StringIO(), err_stream=err) == EXIT_ENGINE
    assert "engine error" in err.getvalue()


# --------------------------------------------------------------------------
# argument parsing / main
# --------------------------------------------------------------------------

def test_main_runs_space_and_comma_forms(tmp_path):
    base = ["run", "--n-stop", "8", "--seed", "2"]
    code = main(base + ["--scenarios", "example1", "example3",
                        "--out", str(tmp_path / "s")])
    assert code == EXIT_OK
    code = main(base + ["--scenarios", "example1,example3",
                        "--out", str(tmp_path / "c")])
    assert code == EXIT_OK
    for name in ("example1.csv", "example3.csv"):
        assert ((tmp_path / "s" / name).read_bytes()
                == (tmp_path / "c" / name).read_bytes())


def test_main_linear_spacing(tmp_path):
    out = tmp_path / "lin"
    code = main(["run", "--scenarios", "example3", "--n-start", "3",
                 "--n-stop", "6", "--n-spacing", "linear",
                 "--out", str(out)])
    assert code == EXIT_OK
    rows = (out / "example3.csv").read_text().strip().splitlines()[1:]
    assert [int(r.split(",")[1]) for r in rows] == [3, 4, 5, 6]


def test_main_rejects_inverted_grid(tmp_path, capsys):
    code = main(["run", "--scenarios", "example3", "--n-start", "9",
                 "--n-stop", "3", "--out", str(tmp_path)])
    assert code == EXIT_USAGE


def test_main_bad_flag_exits_two():
    assert main(["run", "--no-such-flag"]) == EXIT_USAGE


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("MMSE_LAB_SEED", "77")
    out_env = tmp_path / "env"
    main(["run", "--scenarios", "example2", "--n-stop", "4",
          "--out", str(out_env)])
    monkeypatch.delenv("MMSE_LAB_SEED")
    out_flag = tmp_path / "flag"
    main(["run", "--scenarios", "example2", "--n-stop", "4", "--seed", "77",
          "--out", str(out_flag)])
    assert ((out_env / "example2.csv").read_bytes()
            == (out_flag / "example2.csv").read_bytes())


def test_seed_env_must_be_integer(tmp_path, monkeypatch):
    monkeypatch.setenv("MMSE_LAB_SEED", "not-a-number")
    code = main(["run", "--scenarios", "example3", "--out", str(tmp_path)])
    assert code == EXIT_USAGE


# --------------------------------------------------------------------------
# selftest
# --------------------------------------------------------------------------

def test_selftest_passes_and_is_deterministic():
    a, b = io.StringIO(), io.StringIO()
    assert cmd_selftest(seed=0, stream=a) == EXIT_OK
    assert cmd_selftest(seed=0, stream=b) == EXIT_OK
    assert a.getvalue() == b.getvalue()
    assert "all suites passed" in a.getvalue()


def test_selftest_negative_control_fails():
    buf = io.StringIO()
    code = cmd_selftest(seed=0, stream=buf, estimator_perturbation=0.05)
    assert code == EXIT_VERDICT
    assert "FAIL" in buf.getvalue()
