import json
from importlib import resources

import jsonschema
import pytest

from fluid.cli import main
from fluid.syntax import parse_source

from support import by_mode, corpus_names, corpus_path, load

SCHEMA = json.loads((resources.files("fluid") / "report.schema.json").read_text())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def expected_code(name):
    return {"valid": 0, "accepted": 0, "budget-exhausted": 1, "rejected": 2}[load(name).expect]


@pytest.mark.parametrize("name", corpus_names())
def test_fixture_exit_codes(capsys, name):
    mode = load(name).headers["mode"]
    code, out = run(capsys, mode, corpus_path(name))
    assert code == expected_code(name), out


def test_insert_nil(capsys):
    code, out = run(capsys, "prove", corpus_path("insert_nil"))
    assert code == 0 and "valid at round 1" in out


def test_comm_direct(capsys):
    code, _ = run(capsys, "prove", corpus_path("peano_comm_direct"), "--max-rounds", 5)
    assert code == 1


def test_std_R_lists_the_rejected_obligation(capsys):
    code, out = run(capsys, "check-acyclicity", corpus_path("std_R"))
    assert code == 2
    rows = [line for line in out.splitlines() if line.split()[:3] in (["1", "R", "R"], ["2", "R", "R"])]
    assert rows and all("rejected" in r for r in rows)


def test_acyclicity_table_columns(capsys):
    _, out = run(capsys, "check-acyclicity", corpus_path("merge"))
    assert out.splitlines()[0].split() == ["#", "caller", "callee", "path", "condition", "tier", "status"]
    assert out.count("accepted-semantic") == 2


@pytest.mark.parametrize("name", corpus_names())
def test_json_matches_schema(capsys, name):
    mode = load(name).headers["mode"]
    _, out = run(capsys, mode, corpus_path(name), "--json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["exit_code"] == expected_code(name)


@pytest.mark.parametrize("mode", ["reduce", "simulate"])
def test_json_schema_other_modes(capsys, mode):
    _, out = run(capsys, mode, corpus_path("length_contract"), "--json")
    jsonschema.validate(json.loads(out), SCHEMA)


def test_several_files_give_an_array_and_the_worst_code(capsys):
    code, out = run(capsys, "prove", corpus_path("insert_nil"), corpus_path("peano_comm_direct"), "--json", "--jobs", 2)
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert [r["exit_code"] for r in report] == [0, 1] and code == 1


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.fluid"
    bad.write_text("(declare-adt List ((Nil) (Cons (head Int) (tail List))))\n(goal (= (head 5) 0))\n")
    code, out = run(capsys, "prove", bad)
    assert code == 2 and "bad.fluid:2:" in out


def test_missing_file(capsys, tmp_path):
    code, _ = run(capsys, "prove", tmp_path / "absent.fluid")
    assert code == 2


def test_not_fluid_is_an_input_error(capsys):
    code, out = run(capsys, "prove", corpus_path("std_R"))
    assert code == 2 and "not in FLUID" in out


def test_unsafe_skip_fluid(capsys):
    code, _ = run(capsys, "prove", corpus_path("std_R"), "--unsafe-skip-fluid", "--max-rounds", 1)
    assert code == 1


def test_solver_failure_exit_code(capsys):
    code, _ = run(capsys, "prove", corpus_path("insert_nil"), "--solver", "/nonexistent/solver")
    # the FLUID check is structural here, so the failure surfaces in the proof run
    assert code == 3


def test_strict_guards(capsys):
    code, out = run(capsys, "check-acyclicity", corpus_path("std_R"), "--guards", "strict")
    assert code == 2 and "unguarded destructor (head x)" in out


def test_reduce_prints_parseable_fluid(capsys):
    code, out = run(capsys, "reduce", corpus_path("insert_contracts"))
    assert code == 0
    sf = parse_source(out)
    assert "Contract_insert" in {d.name for d in sf.defs}


def test_simulate(capsys):
    code, out = run(capsys, "simulate", corpus_path("length_contract"), "-k", 3)
    assert code == 0 and "simulation agrees" in out


def test_prove_contracts(capsys):
    code, _ = run(capsys, "prove-contracts", corpus_path("insert_contracts"))
    assert code == 0
    code, _ = run(capsys, "prove", corpus_path("insert_contracts"), "--max-rounds", 3)
    assert code == 1


def test_trace_output(capsys):
    _, out = run(capsys, "prove", corpus_path("insert_nil"), "--trace=full")
    assert "  + (= (insert Nil" in out


def test_set_encoding_flag(capsys, tmp_path):
    text = corpus_path("sorted_membership_sets").read_text()
    plain = tmp_path / "sets.fluid"
    plain.write_text("\n".join(line for line in text.splitlines() if not line.startswith("; flags")))
    assert run(capsys, "prove", plain, "--max-rounds", 2)[0] == 2
    assert run(capsys, "prove", plain, "--max-rounds", 2, "--enable-set-encoding")[0] == 1


def test_emit_smt_is_deterministic(capsys, tmp_path):
    files = [corpus_path(n) for n in by_mode("prove")]
    outs = []
    for d in ("a", "b"):
        _, out = run(capsys, "prove", *files, "--json", "--emit-smt", tmp_path / d)
        outs.append(out)
    assert outs[0] == outs[1]
    a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.smt2"))
    b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*.smt2"))
    assert a == b and a
    for rel in a:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_bad_arguments(capsys):
    with pytest.raises(SystemExit) as e:
        main(["explode", str(corpus_path("insert_nil"))])
    assert e.value.code == 2
    with pytest.raises(SystemExit):
        main(["prove", str(corpus_path("insert_nil")), "--timeout", "0"])
