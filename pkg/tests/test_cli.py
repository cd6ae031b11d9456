"""Tests for the command-line front end."""

import io
import json
import contextlib

from emgraph import cli
from emgraph.tuples import PairRecord


def run_capture(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.run(argv)
    return code, buf.getvalue()


def test_search_pairs_stream():
    code, out = run_capture(["search-pairs", "--lo", "2", "--hi", "1000",
                             "--irreducible-only"])
    assert code == 0
    lines = out.strip().splitlines()
    records = [PairRecord.from_json_line(l) for l in lines]
    assert {r.modulus for r in records} == {30, 210, 546, 595, 858}
    assert all("\"modulus\"" in l for l in lines)


def test_search_pairs_round_trip_and_determinism(tmp_path):
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    argv = ["search-pairs", "--lo", "2", "--hi", "2000",
            "--irreducible-only"]
    assert cli.run(argv + ["--out", str(out1)]) == 0
    assert cli.run(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    records = [PairRecord.from_json_line(l)
               for l in out1.read_text().splitlines()]
    assert all(r.to_json_line() == l
               for r, l in zip(records, out1.read_text().splitlines()))


def test_verify_theorem_exit_code():
    code, out = run_capture(["verify-theorem"])
    assert code == 0
    assert out.strip().splitlines()[-1] == "OK"
    assert all(line.startswith("PASS") for line in
               out.strip().splitlines()[:-1])


def test_expand_levels_csv():
    code, out = run_capture(["expand", "--root", "1", "--max-level", "8",
                             "--format", "csv"])
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "level,nodes,composites"
    assert rows[-1] == "8,24,0"


def test_expand_levels_jsonl():
    code, out = run_capture(["expand", "--root", "1", "--max-level", "5"])
    assert code == 0
    last = json.loads(out.strip().splitlines()[-1])
    assert last == {"level": "5", "nodes": "2", "composites": "0"}


def test_sequence_least_and_largest():
    code, out = run_capture(["sequence", "--rule", "least", "--steps", "8"])
    assert code == 0
    assert out.split() == ["2", "3", "7", "43", "13", "53", "5", "6221671"]
    code, out = run_capture(["sequence", "--rule", "largest", "--steps", "6"])
    assert code == 0
    assert out.split() == ["2", "3", "7", "43", "139", "50207"]


def test_explore_with_watch(tmp_path):
    watch = tmp_path / "watch.jsonl"
    watch.write_text('{"a": "19", "m": "30"}\n')
    code, out = run_capture(["explore", "--root", "19", "--bound", "5",
                             "--max-level", "3", "--watch", str(watch)])
    assert code == 0
    hits = [json.loads(l) for l in out.strip().splitlines()]
    assert any(h["value"] == "19" for h in hits)
    assert all(h["hit_m"] == "30" for h in hits)


def test_explore_streams_nodes():
    code, out = run_capture(["explore", "--root", "1", "--bound", "5",
                             "--max-level", "3"])
    assert code == 0
    values = {json.loads(l)["value"] for l in out.strip().splitlines()}
    assert values == {"1", "2", "6"}


def test_chains_cli():
    code, out = run_capture(["chains", "--ell", "4", "--root", "1",
                             "--bound", "100", "--max-level", "2"])
    assert code == 0
    values = [json.loads(l)["value"] for l in out.strip().splitlines()]
    assert "1" in values


def test_simulate_deterministic_output():
    code1, out1 = run_capture(["simulate", "--k", "500", "--trials", "3",
                               "--seed", "11"])
    code2, out2 = run_capture(["simulate", "--k", "500", "--trials", "3",
                               "--seed", "11"])
    assert code1 == code2 == 0 and out1 == out2
    obj = json.loads(out1)
    assert obj["k_max"] == "500" and len(obj["ratios"]) == 3


def test_tables_csv(tmp_path):
    recs = tmp_path / "recs.jsonl"
    assert cli.run(["search-pairs", "--lo", "2", "--hi", "2000",
                    "--out", str(recs)]) == 0
    code, out = run_capture(["tables", "--records", str(recs)])
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == cli.TABLE_HEADER
    assert any(",1722," in r for r in rows)


def test_tables_empty_input(tmp_path):
    recs = tmp_path / "empty.jsonl"
    recs.write_text("")
    code, out = run_capture(["tables", "--records", str(recs)])
    assert code == 0
    assert out.strip() == cli.TABLE_HEADER


def test_usage_errors_exit_one():
    assert cli.run(["search-pairs", "--lo", "2"]) == 1
    assert cli.run(["no-such-command"]) == 1
    assert cli.run([]) == 1


def test_runtime_error_exit_two(tmp_path):
    # unreadable watch file -> runtime failure
    code = cli.run(["explore", "--root", "1", "--bound", "5",
                    "--max-level", "2", "--watch",
                    str(tmp_path / "missing.jsonl")])
    assert code == 2


def test_policy_env_override(tmp_path, monkeypatch):
    pol = tmp_path / "policy.json"
    pol.write_text(json.dumps({"trial_bound": 100, "rho_iterations": 5,
                               "ecm_curves": 0}))
    monkeypatch.setenv(cli.POLICY_ENV, str(pol))
    code, out = run_capture(["sequence", "--steps", "12"])
    assert code == 0
    # the cheap policy cannot certify all 12 terms
    assert len(out.split()) < 12
    monkeypatch.delenv(cli.POLICY_ENV)


def test_policy_flag_overrides_env(tmp_path, monkeypatch):
    pol = tmp_path / "policy.json"
    pol.write_text(json.dumps({"trial_bound": 100, "rho_iterations": 5,
                               "ecm_curves": 0}))
    monkeypatch.setenv(cli.POLICY_ENV, str(pol))
    code, out = run_capture(["sequence", "--steps", "8",
                             "--rho-iterations", "400000",
                             "--ecm-curves", "50"])
    assert code == 0
    assert len(out.split()) == 8


def test_cache_flag(tmp_path):
    cache = tmp_path / "cache.txt"
    blocked = 2 ** 101 - 2
    cache.write_text(f"{blocked + 1}=7432339208719\n")
    code, out = run_capture(["sequence", "--steps", "1", "--start",
                             str(blocked), "--cache", str(cache),
                             "--rho-iterations", "0", "--ecm-curves", "0"])
    assert code == 0
    assert out.split() == ["7432339208719"]