"""cli: argument handling, config precedence, CSV/JSON output discipline."""

import json

import pytest

from hammersim.cli import SWEEP_CSV_COLUMNS, main, parse_pattern

SMALL_TIMINGS = {"refs_per_trefw": 12}


def run_cli(*argv):
    return main(list(argv))


def test_run_happy_path(capsys):
    assert run_cli("run", "--policy", "proteas", "--p", "0.1",
                   "--pattern", "uniform:j=4", "--seed", "42") == 0
    out = capsys.readouterr().out
    assert "max disturbance" in out
    assert "proteas" in out


def test_run_rejects_out_of_range_probability(capsys):
    assert run_cli("run", "--policy", "proteas", "--p", "1.5",
                   "--pattern", "uniform:j=4") == 2
    assert "sampling_p" in capsys.readouterr().err


def test_run_rejects_bad_pattern_kind(capsys):
    assert run_cli("run", "--pattern", "spiral:j=4") == 2
    assert "pattern" in capsys.readouterr().err


def test_run_missing_config_file(capsys):
    assert run_cli("run", "--config", "/nonexistent/conf.json") == 2


def test_parse_pattern_shorthands(tmp_path):
    p = parse_pattern("uniform:j=20", aligned=False)
    assert p.kind == "uniform" and p.j == 20
    p = parse_pattern("nonuniform:j=8,x=3,k=20", aligned=True)
    assert (p.j, p.x, p.k, p.aligned) == (8, 3, 20, True)
    f = tmp_path / "t.txt"
    f.write_text("1\n2\n")
    p = parse_pattern(f"trace:{f}", aligned=False)
    assert p.cycle == (1, 2)


def test_config_file_and_flag_precedence(tmp_path, capsys):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({
        "policy": "proteas", "p": 0.5, "pattern": "uniform:j=4",
        "seed": 1, "timings": SMALL_TIMINGS,
    }))
    csv1 = tmp_path / "a.csv"
    assert run_cli("run", "--config", str(conf), "--csv", str(csv1)) == 0
    # flag overrides the config file's p
    csv2 = tmp_path / "b.csv"
    assert run_cli("run", "--config", str(conf), "--p", "0.25",
                   "--csv", str(csv2)) == 0
    row1 = csv1.read_text().splitlines()[1].split(",")
    row2 = csv2.read_text().splitlines()[1].split(",")
    p_col = SWEEP_CSV_COLUMNS.index("sampling_p")
    assert row1[p_col] == "0.5" and row2[p_col] == "0.25"


def test_run_csv_and_manifest(tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"timings": SMALL_TIMINGS}))
    out = tmp_path / "one.csv"
    assert run_cli("run", "--config", str(conf), "--policy", "baseline",
                   "--pattern", "nonuniform:j=8,x=3,k=20", "--aligned",
                   "--csv", str(out)) == 0
    header, row = out.read_text().splitlines()
    assert header == ",".join(SWEEP_CSV_COLUMNS)
    assert row.startswith("N_j8_x3_k20_al,nonuniform,8,3,20,1,baseline")
    manifest = json.loads(out.with_suffix(".manifest.json").read_text())
    assert manifest["tool"] == "hammersim"
    assert manifest["config"]["pattern"] == "N_j8_x3_k20_al"


def test_sweep_csv_schema_and_rerun_bytes(tmp_path):
    conf = tmp_path / "spec.json"
    conf.write_text(json.dumps({
        "axis": "sampling_p", "values": [0.1, 0.5],
        "policy": "proteas", "seeds": 2, "seed": 3,
        "patterns": ["U_j4_un", "U_j20_un"],
    }))
    out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    assert run_cli("sweep", "--config", str(conf), "--out", str(out1),
                   "--workers", "1") == 0
    assert run_cli("sweep", "--config", str(conf), "--out", str(out2),
                   "--workers", "1") == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2  # reruns are byte-identical
    lines = b1.decode().splitlines()
    assert lines[0] == ",".join(SWEEP_CSV_COLUMNS)
    assert len(lines) == 1 + 2 * 2  # two axis values x two patterns
    summary = json.loads(out1.with_suffix(".json").read_text())
    assert summary["manifest"]["config"]["seeds"] == 2
    assert len(summary["summary"]["per_value"]) == 2


def test_sweep_requires_axis(capsys):
    assert run_cli("sweep", "--values", "0.1") == 2
    assert "axis" in capsys.readouterr().err


def test_rate_subcommand(capsys):
    assert run_cli("rate", "--mitigations-per-act", "0.012048",
                   "--miss-rate", "0.5") == 0
    assert capsys.readouterr().out.strip() == "0.024096"


def test_no_partial_csv_on_failure(tmp_path, capsys):
    out = tmp_path / "never.csv"
    assert run_cli("sweep", "--axis", "sampling_p", "--values", "oops",
                   "--out", str(out)) == 2
    assert not out.exists()
