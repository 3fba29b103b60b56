import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from parityscan import cli
from parityscan.engine import ScanConfig, canonical_json, empty_summary, run_scan
from parityscan.report import (EXIT_CAPACITY, EXIT_COUNTEREXAMPLE, EXIT_IO, EXIT_OK, EXIT_USAGE,
                               emit_report, exit_code, parse_report)
from parityscan.errors import UsageError

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("PARITYSCAN_UPDATE_GOLDEN") == "1"


def golden(name: str, data: bytes):
    path = GOLDEN / name
    if UPDATE:
        path.write_bytes(data)
    assert data == path.read_bytes(), f"{name} differs from its golden copy"


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- golden files ------------------------------------------------------------

GOLDEN_SCAN = ["scan", "--from", "3", "--to", "2000", "--check", "pairs", "--cap", "5"]


def test_golden_scan_json(capsys):
    code, out, _ = run_cli(GOLDEN_SCAN, capsys)
    assert code == EXIT_COUNTEREXAMPLE  # beyond_midpoint records (7, 11), (23, 29), (113, 127)
    golden("scan_3_2000.json", out.encode())


def test_golden_scan_csv(capsys):
    _, out, _ = run_cli(GOLDEN_SCAN + ["--format", "csv"], capsys)
    golden("scan_3_2000.csv", out.encode())


def test_golden_scan_text(capsys):
    _, out, _ = run_cli(GOLDEN_SCAN + ["--format", "text"], capsys)
    golden("scan_3_2000.txt", out.encode())


def test_golden_squares(capsys):
    code, out, _ = run_cli(["scan", "--from", "3", "--to", "100", "--check", "legendre,oppermann",
                            "--n-to", "200"], capsys)
    assert code == EXIT_OK
    golden("squares_1_200.json", out.encode())


def test_golden_demo(capsys):
    code, out, _ = run_cli(["demo-2329"], capsys)
    assert code == EXIT_OK
    assert "m_i=28 → L=782 (even)" in out
    assert "m_i=26 → L=667 (odd)" in out
    golden("demo_2329.txt", out.encode())


def test_golden_schema_version():
    doc = json.loads((GOLDEN / "scan_3_2000.json").read_bytes())
    assert doc["schema_version"] == 1


# -- report format -----------------------------------------------------------

def test_empty_summary_json():
    doc = json.loads(emit_report(empty_summary(ScanConfig(3, 5, checks={"parity", "andrica"}))))
    assert doc["counters"] == {"andrica": {"holds": 0, "fails": 0}, "parity": {"holds": 0, "fails": 0}}
    assert doc["counterexamples"] == [] and doc["pairs_checked"] == 0


def test_canonical_and_round_trip():
    s = run_scan(ScanConfig(3, 20000, checks={"parity", "andrica", "theorem1", "beyond_midpoint"},
                            counterexample_cap=2))
    a, b = emit_report(s), emit_report(s)
    assert a == b
    back = parse_report(a)
    assert back == s
    assert emit_report(back) == a
    assert json.loads(a)["extremes"]["max_andrica_pair"]["rank_key"].endswith("/4294967296")


def test_no_floats_anywhere():
    s = run_scan(ScanConfig(3, 5000, checks={"parity", "andrica", "theorem1", "eq14", "beyond_midpoint"}))

    def walk(x):
        assert not isinstance(x, float)
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)

    walk(json.loads(emit_report(s)))
    for fmt in ("csv", "text"):
        text = emit_report(s, fmt).decode()
        assert "e-" not in text and "0." not in text


def test_csv_rows():
    s = run_scan(ScanConfig(3, 200, checks={"beyond_midpoint"}))
    lines = emit_report(s, "csv").decode().splitlines()
    assert lines[0] == "check,subject,p_hi,details"
    assert lines[1:] == ["beyond_midpoint,7,11,L=98 m_i=10", "beyond_midpoint,23,29,L=782 m_i=28",
                         "beyond_midpoint,113,127,L=15368 m_i=124"]


def test_exit_code_iff_failures():
    clean = run_scan(ScanConfig(3, 2000, checks={"parity"}))
    assert exit_code(clean) == EXIT_OK
    s = run_scan(ScanConfig(3, 2000, checks={"beyond_midpoint"}, counterexample_cap=1))
    assert len(s.counterexamples) == 1 and s.suppressed == {"beyond_midpoint": 2}
    assert exit_code(s) == EXIT_COUNTEREXAMPLE


# -- argument parsing --------------------------------------------------------

def test_parse_args_example():
    inv = cli.parse_args(["scan", "--from", "3", "--to", "1000000", "--check", "parity,theorem1"])
    assert inv.subcommand == "scan"
    assert inv.config.range_lo == 3 and inv.config.range_hi == 10**6
    assert inv.config.checks == {"parity", "theorem1"}
    assert inv.format == "json"


@pytest.mark.parametrize("argv", [
    ["scan", "--from", "10", "--to", "5"],
    ["scan", "--from", "3", "--to", "100", "--check", "goldbach"],
    ["scan", "--from", "3", "--to", "100", "--bogus"],
    ["scan", "--from", "3", "--to", "x"],
    ["scan", "--from", "3", "--to", "100", "--resume"],
    ["scan", "--from", "3", "--to", "100", "--shard-size", "1"],
    ["frobnicate"],
])
def test_parse_args_rejects(argv):
    with pytest.raises(UsageError):
        cli.parse_args(argv)


@pytest.mark.parametrize("text,value", [("100", 100), ("10**8", 10**8), ("10^8", 10**8), ("1e8", 10**8),
                                        ("1_000", 1000)])
def test_parse_int(text, value):
    assert cli.parse_int(text) == value


def test_check_groups():
    inv = cli.parse_args(["scan", "--from", "3", "--to", "9", "--check", "core,brocard"])
    assert inv.config.checks == set(cli.CORE_CHECKS) | {"brocard"}
    assert cli.parse_args(["scan", "--from", "3", "--to", "9", "--check", "all"]).config.checks == \
        set(cli.CHECK_GROUPS["all"])


def test_workers_env(monkeypatch):
    monkeypatch.setenv(cli.WORKERS_ENV, "6")
    assert cli.parse_args(["scan", "--from", "3", "--to", "9"]).config.worker_count == 6
    assert cli.parse_args(["scan", "--from", "3", "--to", "9", "--workers", "2"]).config.worker_count == 2
    monkeypatch.setenv(cli.WORKERS_ENV, "lots")
    with pytest.raises(UsageError):
        cli.parse_args(["scan", "--from", "3", "--to", "9"])


# -- exit codes end to end ---------------------------------------------------

def test_exit_ok(capsys):
    assert run_cli(["scan", "--from", "3", "--to", "10**4", "--check", "parity"], capsys)[0] == EXIT_OK


def test_exit_counterexample(capsys):
    code, _, _ = run_cli(["scan", "--from", "23", "--to", "24", "--check", "beyond_midpoint"], capsys)
    assert code == EXIT_COUNTEREXAMPLE


def test_exit_usage(capsys):
    code, _, err = run_cli(["scan", "--from", "10", "--to", "5"], capsys)
    assert code == EXIT_USAGE and "--to" in err
    assert run_cli(["probe", "25"], capsys)[0] == EXIT_USAGE


def test_exit_capacity(capsys):
    code, _, err = run_cli(["scan", "--from", "3", "--to", "2**63"], capsys)
    assert code == EXIT_CAPACITY and "LIMIT" in err
    code, _, err = run_cli(["scan", "--from", "2**31+11", "--to", "2**31", "--check", "brocard"], capsys)
    assert code == EXIT_USAGE
    code, _, err = run_cli(["scan", "--from", str(2**31 + 11), "--to", str(2**31 + 400),
                            "--check", "brocard"], capsys)
    assert code == EXIT_CAPACITY and "shard 0" in err


def test_exit_io(tmp_path, capsys):
    missing = tmp_path / "no" / "such" / "dir" / "out.json"
    code, _, err = run_cli(["scan", "--from", "3", "--to", "100", "-o", str(missing)], capsys)
    assert code == EXIT_IO
    ck = tmp_path / "ck.json"
    ck.write_text("garbage")
    code, _, _ = run_cli(["scan", "--from", "3", "--to", "100", "--checkpoint", str(ck), "--resume"], capsys)
    assert code == EXIT_IO


def test_resume_mismatch_is_usage(tmp_path, capsys):
    ck = tmp_path / "ck.json"
    assert run_cli(["scan", "--from", "3", "--to", "100", "--checkpoint", str(ck)], capsys)[0] == EXIT_OK
    code, _, err = run_cli(["scan", "--from", "3", "--to", "200", "--checkpoint", str(ck), "--resume"], capsys)
    assert code == EXIT_USAGE and "refused" in err


def test_output_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run_cli(["scan", "--from", "3", "--to", "100", "-o", str(out)], capsys)[0] == EXIT_OK
    assert parse_report(out.read_bytes()).pairs_checked == 24


def test_probe(capsys):
    code, out, _ = run_cli(["probe", "113"], capsys)
    assert code == EXIT_OK
    assert "pair (113, 127), midpoint m = 120" in out
    assert "m_i=124 → L=15368 (even)" in out
    code, out, _ = run_cli(["probe", "23", "--format", "json"], capsys)
    rep = json.loads(out)
    assert rep["parity_holds"] and [r["m_i"] for r in rep["rows"]] == [24, 25, 26, 27, 28]


def test_demo_json(capsys):
    code, out, _ = run_cli(["demo-2329", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["reproduced"] is True
    rows = {r["m_i"]: r for r in doc["walkthrough"]["rows"]}
    assert rows[26]["L"] == 667 and rows[28]["L"] == 782 and not rows[28]["odd"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "parityscan", "demo-2329"], capture_output=True, timeout=60)
    assert r.returncode == 0
    assert "m_i=28 → L=782 (even)" in r.stdout.decode()
