import csv
import io
import json
import os
import subprocess

import pytest

BENCH = os.environ.get("CRYPTOMAZE_BENCH", "build/tools/bench")


def bench(*args):
    return subprocess.run([BENCH, *args], capture_output=True, text=True, timeout=300)


def test_run_fixture_csv():
    p = bench("run", "--graph", "fixture:diamond", "--protocols", "cryptomaze,amp,mhhtlc")
    assert p.returncode == 0, p.stderr
    rows = list(csv.DictReader(io.StringIO(p.stdout)))
    assert [r["protocol"] for r in rows] == ["cryptomaze", "amp", "mhhtlc"]
    assert [int(r["n_contracts"]) for r in rows] == [6, 8, 8]
    assert all(r["outcome"] == "success" for r in rows)
    assert rows[0]["amount"] == "5.1"


def test_run_ba_writes_file(tmp_path):
    out = tmp_path / "rows.csv"
    p = bench("run", "--graph", "ba:80,2", "--amounts", "0.01,0.02", "--trials", "2", "--out", str(out))
    assert p.returncode == 0, p.stderr
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 * 2 * 3


@pytest.mark.parametrize(
    "args",
    [
        ["run", "--graph", "ba:50,2", "--trials", "0"],
        ["run", "--graph", "ba:50,2", "--amounts", "0"],
        ["run", "--graph", "ba:50"],
        ["run", "--graph", "/no/such/snapshot.json"],
        ["run", "--graph", "ba:50,2", "--protocols", "lightning"],
        ["run", "--graph", "ba:50,2", "--router", "widest"],
        ["run"],
        ["attack", "--kind", "wormhole", "--colluders", "2,3"],
        ["attack", "--kind", "linkability", "--fixture", "fan3"],
        ["no-such-command"],
    ],
)
def test_bad_input_exits_1(args):
    p = bench(*args)
    assert p.returncode == 1, (p.stdout, p.stderr)


def test_shared_edges_diamond():
    p = bench("shared-edges", "--graph", "fixture:diamond")
    assert p.returncode == 0, p.stderr
    j = json.loads(p.stdout)
    assert j["contracts_saved"] == 2
    assert j["mean_savings_pct"] == pytest.approx(25.0)


def test_attack_wormhole():
    p = bench("attack", "--kind", "wormhole", "--protocol", "cryptomaze")
    assert p.returncode == 0, p.stderr
    j = json.loads(p.stdout)
    assert j["blocked"] is True
    p = bench("attack", "--kind", "wormhole", "--protocol", "htlc")
    assert json.loads(p.stdout)["succeeded"] is True


def test_attack_linkability_default_colluders():
    p = bench("attack", "--kind", "linkability", "--variant", "strawman", "--trials", "20")
    assert p.returncode == 0, p.stderr
    assert json.loads(p.stdout)["statistic"] == 1.0
    p = bench("attack", "--kind", "linkability", "--trials", "20")
    assert json.loads(p.stdout)["pass"] is True


def test_trace_is_jsonl():
    p = bench("trace", "--fixture", "diamond")
    assert p.returncode == 0, p.stderr
    lines = [json.loads(l) for l in p.stdout.splitlines() if l.strip()]
    assert sum(1 for e in lines if e["kind"] == "forward") == 6


def test_help():
    assert bench("--help").returncode == 0
