import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from shagate.cli import main, scan

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("SHAGATE_REGEN_GOLDEN") == "1"


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


@pytest.mark.parametrize("n, code", [(3, 2), (17, 0), (41, 0), (65, 0), (145, 0), (221, 2)])
def test_classify_golden(n, code):
    got_code, text = run("classify", n)
    assert got_code == code
    path = GOLDEN / f"classify_{n}.json"
    if REGEN:
        path.write_text(text)
    assert json.loads(text) == json.loads(path.read_text())


def test_classify_values():
    _, text = run("classify", 17)
    doc = json.loads(text)
    assert doc["schema_version"] == 1
    assert (doc["verdict"], doc["k"], doc["d"], doc["h8"]) == ("rank0_sha_2_2k", 1, 17, 0)
    _, text = run("classify", 41)
    assert json.loads(text)["verdict"] == "criterion_failed"


def test_exit_codes():
    assert run("classify", 0)[0] == 1
    assert run("classify", "abc")[0] == 1
    assert run("classify", 18)[0] == 1            # not square-free
    assert run("classify", 3)[0] == 2
    assert run("bogus")[0] == 1
    assert run("pairing", 221)[0] == 1


def test_scan_membership():
    code, text = run("scan", "--from", 1, "--to", 300, "--filter", "t1-family")
    assert code == 0
    ns = [json.loads(line)["n"] for line in text.splitlines()]
    assert {17, 41, 65, 145, 185} <= set(ns)
    assert 221 not in ns                         # 221 = 5 mod 8
    assert ns == sorted(ns)


def test_scan_jobs_byte_identical():
    one = run("scan", "--from", 1, "--to", 3000, "--filter", "t1-family", "--jobs", 1)[1]
    many = run("scan", "--from", 1, "--to", 3000, "--filter", "t1-family", "--jobs", 4)[1]
    assert one == many


def test_scan_csv_and_timing():
    code, text = run("scan", "--from", 1, "--to", 100, "--format", "csv")
    lines = text.splitlines()
    assert lines[0].split(",")[:3] == ["schema_version", "n", "family"]
    assert code == 0
    _, text = run("scan", "--from", 17, "--to", 17, "--timing")
    assert "seconds" in json.loads(text)
    assert run("scan", "--from", 10, "--to", 5)[0] == 1


def test_scan_finds_k2_instance():
    recs = scan(4700, 4800, "all-1-mod-8")
    hits = [r for r in recs if r["verdict"] == "rank0_sha_2_2k" and r["k"] == 2]
    assert hits and hits[0]["n"] == 4777


def test_selmer_genus_pairing_classgroup():
    code, text = run("selmer", 17)
    doc = json.loads(text)
    assert code == 0 and doc["s2"] == 2 and len(doc["selmer_group"]) == 4
    code, text = run("genus", 221)
    doc = json.loads(text)
    assert doc["redei_matrix"] == [[0, 0, 1], [0, 0, 0]] and doc["h8"] == 1
    code, text = run("genus", 4777, "--decomposition", "17,281")
    assert json.loads(text)["h8_r_star"] == json.loads(text)["h8"]
    code, text = run("pairing", 1513, "--decomposition", "17,89")
    doc = json.loads(text)
    assert code == 0 and doc["cor2"] is False and doc["mainthm2"] is False
    assert doc["block_formula_mismatches"] == []
    code, text = run("classgroup", 221)
    doc = json.loads(text)
    assert doc["invariant_factors"] == [8, 2] and (doc["h2"], doc["h4"], doc["h8"]) == (2, 1, 1)


def test_verify_worked_example_221():
    code, text = run("verify", "remark1")
    doc = json.loads(text)
    assert code == 0 and doc["ok"]


def test_verify_pairing_small():
    code, text = run("verify", "pairing", "--bound", 2000)
    assert code == 0 and json.loads(text)["failure_count"] == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "shagate.cli", "classify", "17"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "rank0_sha_2_2k"
