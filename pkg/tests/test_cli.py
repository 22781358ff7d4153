import csv
import io
import json
from fractions import Fraction

import pytest

from dpskey.cli import RATE_COLUMNS, main, parse_probability


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_probability():
    assert parse_probability("2^-58/6") == Fraction(1, 6 * 2**58)
    assert parse_probability("0.05") == 0.05
    assert parse_probability("1/20") == Fraction(1, 20)


def test_rate_optimised_row(capsys):
    code, out, _ = run(capsys, "rate", "--eta", "1", "--n-em", "1e13")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == RATE_COLUMNS
    assert float(rows[0]["mu"]) == pytest.approx(9.3e-3, rel=0.05)
    assert float(rows[0]["eps_sec"]) == pytest.approx(2.0**-27, rel=1e-9)


def test_rate_fixed_point_json(capsys):
    code, out, _ = run(capsys, "rate", "--distance", "50", "--mu", "1e-3", "--t", "0.9",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert doc["rows"][0]["mu"] == 1e-3


def test_degenerate_sweep_rejected(capsys):
    code, _, err = run(capsys, "curve", "--eta-min", "1", "--eta-max", "1", "--points", "2")
    assert code == 2 and err.count("\n") == 1


def test_unknown_flag_is_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rate", "--bogus"])
    assert exc.value.code == 2
    assert capsys.readouterr().err.count("\n") == 1


@pytest.mark.parametrize("argv", [["rate"], ["rate", "--eta", "2"],
                                  ["rate", "--eta", "1", "--mu", "0.1"],
                                  ["curve", "--points", "1"],
                                  ["curve", "--eta-min", "0", "--eta-max", "1"]])
def test_domain_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("dpskey: error:") and err.count("\n") == 1


def test_bad_probability_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rate", "--eta", "1", "--eps1", "3"])
    assert exc.value.code == 2


def test_all_abort_exit_3(capsys):
    code, out, _ = run(capsys, "curve", "--eta-min", "1e-3", "--eta-max", "2e-3", "--points", "2",
                       "--n-em", "1e10")
    assert code == 3 and out.count("\n") == 3


def test_compare_pairs(capsys):
    code, out, _ = run(capsys, "compare", "--eta-min", "0.1", "--eta-max", "1", "--points", "2",
                       "--n-em", "1e12")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["method"] for r in rows] == ["kato", "azuma", "kato", "azuma"]
    assert float(rows[0]["rate"]) >= float(rows[1]["rate"])


def test_crossover_json(capsys):
    code, out, _ = run(capsys, "crossover", "--n-em", "1e13", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert set(row) == {"n_em", "eta_star", "q3", "deviation"}
    assert 0.2 < row["eta_star"] < 0.4


def test_output_byte_stable_across_threads(capsys, monkeypatch, tmp_path):
    argv = ["curve", "--eta-min", "0.01", "--eta-max", "1", "--points", "6", "--log-spacing",
            "--n-em", "1e12", "--format", "json"]
    monkeypatch.setenv("DPSKEY_THREADS", "1")
    _, serial, _ = run(capsys, *argv)
    monkeypatch.setenv("DPSKEY_THREADS", "4")
    _, parallel, _ = run(capsys, *argv)
    assert serial == parallel
    etas = [r["eta"] for r in json.loads(serial)["rows"]]
    assert etas == sorted(etas)


def test_config_file_merged_under_flags(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"eta": 0.5, "n_em": 1e12, "method": "azuma"}))
    out_file = tmp_path / "o.csv"
    code = main(["rate", "--config", str(cfg), "--method", "kato", "--output", str(out_file)])
    rows = list(csv.DictReader(out_file.open()))
    assert code == 0 and rows[0]["method"] == "kato" and float(rows[0]["eta"]) == 0.5


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"nope": 1}))
    with pytest.raises(SystemExit) as exc:
        main(["rate", "--config", str(cfg)])
    assert exc.value.code == 2


def test_validate_small(capsys):
    code, out, _ = run(capsys, "validate", "--trials", "2000", "--steps", "500")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5 and all(r["ok"] == "true" for r in rows)
