"""Command-line parsing, exit codes and reproducible experiment reports."""

import json

import pytest

from cloneminors.cli import InputError, main, parse_chain, parse_clone, parse_op, parse_relation
from cloneminors.core import OpTable
from cloneminors.experiments import ExperimentReport, cmd_crosscheck, cmd_intersections, cmd_table1
from cloneminors.relations import ChainE, Relational, make_central_sigma, slupecki_chain
from cloneminors.search import Session
from cloneminors.witnesses import discriminator

CHAIN3 = ChainE.from_partitions(3, [[[0, 1], [2]]])


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_compact_forms():
    assert parse_op("3:2:021102210") == OpTable.from_function(3, 2, lambda x, y: (x + 2 * y) % 3)
    assert parse_op("2:1:1,0") == OpTable(2, 1, (1, 0))
    rel = parse_relation("3:2:00,11,22,01,10")
    assert rel.size == 5 and (0, 1) in rel
    assert parse_chain("3:0,1;2") == CHAIN3
    assert parse_chain("2:") == ChainE(2)
    assert parse_clone("slupecki:3:2") == slupecki_chain(3, 2)
    assert parse_clone("sigma-c:3:0") == Relational(
        3, (make_central_sigma(3, 0),), subsets=(frozenset({0}),))


def test_parse_json_forms(tmp_path):
    f = discriminator(2)
    assert parse_op(json.dumps(f.to_json())) == f
    path = tmp_path / "op.json"
    path.write_text(json.dumps(f.to_json()))
    assert parse_op(f"@{path}") == f


def test_parse_errors():
    with pytest.raises(InputError):
        parse_op("3:2")
    with pytest.raises(InputError):
        parse_clone("nonsense:3")
    with pytest.raises(InputError):
        parse_clone("slupecki:3")


def test_member_and_minor_commands(capsys):
    code, out, _ = run(capsys, "member", "--op", "3:1:012", "--clone", "sigma:3:0")
    assert code == 0 and out.strip() == "yes"
    code, out, _ = run(capsys, "--format", "json", "minor", "--f", "2:1:00", "--g", "2:1:01",
                       "--clone", "full:2")
    data = json.loads(out)
    assert code == 0 and data["minor"] and data["witness"] is not None
    code, out, _ = run(capsys, "equiv", "--f", "2:1:01", "--g", "2:1:00", "--clone", "full:2")
    assert code == 0 and out.startswith("no")


def test_error_and_budget_exit_codes(capsys):
    code, _, err = run(capsys, "member", "--op", "3:2", "--clone", "full:3")
    assert code == 1 and "error" in err
    code, _, err = run(capsys, "--budget-assignments", "3", "minor", "--f", "3:2:012120201",
                       "--g", "3:2:021102210", "--clone", "full:3")
    assert code == 3 and "budget" in err


def test_tree_core_and_iso_commands(capsys):
    code, out, _ = run(capsys, "tree", "--op", "3:1:012", "--chain", "3:0,1;2")
    assert code == 0 and "level sizes [3, 2, 1]" in out
    code, out, _ = run(capsys, "--format", "json", "core", "--op", "3:2:000000000",
                       "--chain", "3:0,1;2")
    data = json.loads(out)
    assert code == 0 and data["trace"]
    code, out, _ = run(capsys, "--format", "json", "iso", "--f", "3:1:000",
                       "--g", "3:2:000000000", "--chain", "3:0,1;2")
    data = json.loads(out)
    assert data["f_below_g"] and data["g_below_f"] and not data["cores_isomorphic"]


def test_witness_command(capsys):
    code, out, _ = run(capsys, "witness", "--family", "SlupCentral", "--k", "3", "--n", "2",
                       "--sanity")
    assert code == 0 and "FAILED" not in out
    code, out, _ = run(capsys, "--format", "json", "witness", "--family", "SlupCentral",
                       "--k", "3", "--n", "2")
    assert code == 0 and json.loads(out)["arity"] == 2
    code, _, _ = run(capsys, "witness", "--family", "CentralR", "--k", "3", "--n", "2")
    assert code == 1


def test_growth_and_restrict_commands(capsys):
    code, out, _ = run(capsys, "--format", "json", "growth", "--clone", "sigma:3:0",
                       "--n-max", "2")
    assert code == 0 and [r["n"] for r in json.loads(out)] == [1, 2]
    code, out, _ = run(capsys, "restrict", "--clone", "full:3", "--subset", "0,2",
                       "--arity", "2")
    assert code == 0 and out.startswith("16 members")


def test_report_exit_codes():
    report = ExperimentReport("demo", {})
    report.run("a", lambda: (True, "fine"))
    assert report.exit_code == 0
    report.record("b", "skipped", "scope: too large")
    assert report.exit_code == 3
    report.run("c", lambda: (False, "counterexample [0, 1]"))
    assert report.exit_code == 2
    with pytest.raises(ValueError):
        report.record("d", "skipped")
    with pytest.raises(ValueError):
        report.record("a", "pass")


def test_crosscheck_is_deterministic_and_passes(capsys):
    a = cmd_crosscheck(CHAIN3, 1, seed=4, max_pairs=200)
    b = cmd_crosscheck(CHAIN3, 1, seed=4, max_pairs=200)
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
    assert a.exit_code == 0
    code, out, _ = run(capsys, "--format", "json", "--seed", "4", "crosscheck",
                       "--chain", "3:0,1;2", "--max-pairs", "200")
    assert code == 0 and json.loads(out) == a.to_json()


def test_table1_k3_passes_and_is_byte_identical(capsys):
    code1, out1, _ = run(capsys, "--format", "json", "table1", "--k", "3", "--sample", "10")
    code2, out2, _ = run(capsys, "--format", "json", "table1", "--k", "3", "--sample", "10")
    assert code1 == code2 == 0 and out1 == out2
    report = cmd_table1(3, sample=10)
    assert report.counts()["fail"] == 0
    assert json.loads(out1)["output_digest"] == report.to_json()["output_digest"]


def test_mismatch_reports_counterexample(monkeypatch):
    """A disagreement between the two routes is a failure carrying the offending pair."""
    import cloneminors.experiments as exp
    monkeypatch.setattr(exp, "minor_via_trees", lambda f, g, chain: True)
    report = exp.cmd_crosscheck(CHAIN3, 1, seed=0, max_pairs=20, session=Session())
    assert report.exit_code == 2
    failed = [c for c in report.checks.values() if c.outcome == "fail"]
    assert failed and failed[0].data["counterexamples"]


def test_intersections_report():
    report = cmd_intersections(3)
    counts = report.counts()
    assert counts["fail"] == 0 and counts["pass"] >= 40
    skipped = [c for c in report.checks.values() if c.outcome == "skipped"]
    assert all(c.detail.startswith(("scope:", "budget:")) for c in skipped)
    assert "B_(k-1) with Pol sigma_0 (no)/oracle f_5 not below f_4" in {c.check_id for c in skipped}
    assert report.exit_code == 3
