from __future__ import annotations

import json
import math

import pytest

from paretogof import cli
from paretogof.errors import ParameterDomainError
from paretogof.study import (
    CSV_COLUMNS,
    PowerCell,
    PowerTable,
    StudyConfig,
    analyze_dataset,
    emit_table,
    parse_table_csv,
    run_study,
)
from paretogof.estimation import LIV_THRESHOLD, bundled_path


def small_config(tmp_path, **over):
    d = dict(
        alternatives=["p(1)", "ray(1)"], sample_sizes=[12], tests=["ds1", "ds2", "ds3"],
        M=6, B=30, level=0.05, master_seed=9, output_path=str(tmp_path / "out.csv"),
    )
    d.update(over)
    return d


def test_study_cardinality_and_determinism(tmp_path):
    cfg = StudyConfig.from_dict(small_config(tmp_path))
    table = run_study(cfg)
    assert len(table.cells) == 6
    first = (tmp_path / "out.csv").read_bytes()
    run_study(cfg)
    assert (tmp_path / "out.csv").read_bytes() == first
    assert first.decode().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert all(0.0 <= c.rate <= 1.0 for c in table.cells)


def test_study_workers_do_not_change_csv(tmp_path):
    cfg = StudyConfig.from_dict(small_config(tmp_path, output_path=None))
    assert emit_table(run_study(cfg, workers=1)) == emit_table(run_study(cfg, workers=2))


def test_failed_cell_is_recorded_and_run_continues(tmp_path):
    cfg = StudyConfig.from_dict(small_config(tmp_path, tests=["ds1", "kl:20"], alternatives=["p(1)"]))
    table = run_study(cfg)
    good, bad = table.cells
    assert good.errors == "" and bad.errors
    assert math.isnan(bad.rate)
    assert "err" in emit_table(table, "markdown")


def test_rounding_and_formats():
    table = PowerTable(("ds1",), [PowerCell("P(1)", 20, "ds1", 0.952, 0.01, 500, 500, 1)])
    assert "| P(1) | 20 | 95 |" in emit_table(table, "markdown")
    assert emit_table(table, "csv").splitlines()[1].split(",")[3] == "0.952"
    assert PowerCell("x", 2, "t", 0.125, 0, 1, 1, 1).percent == 13
    assert PowerCell("x", 2, "t", 0.0, 0, 1, 1, 1).percent == 0
    assert PowerCell("x", 2, "t", 1.0, 0, 1, 1, 1).percent == 100


def test_empty_table_is_header_only():
    assert emit_table(PowerTable(), "csv") == ",".join(CSV_COLUMNS) + "\n"
    assert emit_table(PowerTable(("ds1",)), "markdown").count("\n") == 2


def test_csv_round_trip(tmp_path):
    table = run_study(StudyConfig.from_dict(small_config(tmp_path, output_path=None)))
    again = parse_table_csv(emit_table(table, "csv"))
    assert again.cells == table.cells
    assert emit_table(again, "csv") == emit_table(table, "csv")


@pytest.mark.parametrize(
    "change",
    [{"alternatives": []}, {"tests": ["nope"]}, {"sample_sizes": [1]}, {"level": 1.5}, {"M": 0}, {"extra": 1}],
)
def test_config_validation(tmp_path, change):
    d = small_config(tmp_path)
    d.update(change)
    with pytest.raises((ParameterDomainError, KeyError)):
        StudyConfig.from_dict(d)


def test_analyze_report_matches_statistics():
    rep = analyze_dataset(bundled_path("liv_golf_2022"), LIV_THRESHOLD, ["ds1", "ks"], B=0)
    assert rep.n == 22
    assert rep.alpha_hat == pytest.approx(1.428, abs=1e-3)
    assert [round(r.statistic, 3) for r in rep.rows] == [0.078, 0.148]
    text = rep.to_text("markdown")
    assert "| DS1 | 0.078 |" in text


# ---------------------------------------------------------------- command line


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_analyze(capsys):
    args = ["analyze", "--data", "bundled:airplane", "--tests", "ds1,ks,i:2", "--B", "50", "--format", "csv"]
    code, out, _ = run_cli(args, capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "test,statistic,p_value,n,alpha_hat"
    assert lines[2].startswith("ks,0.377,")
    code2, out2, _ = run_cli(args, capsys)
    assert out2 == out


def test_cli_exit_codes(tmp_path, capsys):
    assert run_cli(["analyze", "--data", str(tmp_path / "missing.txt")], capsys)[0] == cli.EXIT_IO
    assert run_cli(["analyze", "--data", "bundled:airplane", "--tests", "zz"], capsys)[0] == cli.EXIT_VALIDATION
    assert run_cli(["analyze", "--data", "bundled:airplane", "--threshold", "1e9"], capsys)[0] == cli.EXIT_VALIDATION
    ones = tmp_path / "ones.txt"
    ones.write_text("1\n1\n1\n")
    assert run_cli(["analyze", "--data", str(ones), "--B", "0"], capsys)[0] == cli.EXIT_NUMERICAL
    bad = tmp_path / "bad.txt"
    bad.write_text("2\nxx\n")
    code, _, err = run_cli(["analyze", "--data", str(bad)], capsys)
    assert code == cli.EXIT_IO and "line 2" in err
    with pytest.raises(SystemExit) as info:
        cli.main(["analyze"])
    assert info.value.code == cli.EXIT_USAGE


def test_cli_study(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(small_config(tmp_path, alternatives=["p(1)"], tests=["ds1"])))
    code, out, _ = run_cli(["study", "--config", str(cfg), "--workers", "2"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "| alternative | n | ds1 |"
    assert (tmp_path / "out.csv").exists()
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run_cli(["study", "--config", str(broken)], capsys)[0] == cli.EXIT_IO
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({**small_config(tmp_path), "workers": 3}))
    assert run_cli(["study", "--config", str(unknown)], capsys)[0] == cli.EXIT_VALIDATION
