import stat
import sys
from pathlib import Path

import pytest

from fluid.engine import initial_state
from fluid.logic import Const, IntLit, Var, builtin, neg
from fluid.smt import (
    PROCESS_ERROR,
    SAT,
    TIMEOUT,
    UNSAT,
    EncodingError,
    QfQuery,
    SolverConfig,
    SolverSession,
    check_sat,
    encode_query,
    smt_term,
)

from support import load, task

GOLDEN = Path(__file__).parent / "golden"


def test_golden_round_zero_script():
    t = task("insert_nil")
    s = initial_state(t)
    text = encode_query(t.sig, QfQuery(t.sig, s.consts, s.formulas))
    assert text == (GOLDEN / "insert_nil_round_0.smt2").read_text()


def test_encoding_is_byte_identical():
    t = task("insert_vc_inductive")
    s = initial_state(t)
    q = QfQuery(t.sig, s.consts, s.formulas)
    assert encode_query(t.sig, q) == encode_query(task("insert_vc_inductive").sig, q)


def test_testers_and_negative_literals():
    sig = load("insert_nil").sig
    x = Const("c", "List")
    assert smt_term(sig.app("is-Cons", x)) == "((_ is Cons) c)"
    assert smt_term(sig.app("is-Cons", x), "prefix") == "(is-Cons c)"
    assert smt_term(IntLit(-4)) == "(- 4)"


def test_quantifiers_are_not_encoded():
    sig = load("insert_nil").sig
    from fluid.logic import forall

    v = Var("x", "List")
    with pytest.raises(EncodingError):
        smt_term(forall((v,), sig.app("sorted", v)))


def test_check_sat_verdicts():
    sig = load("insert_nil").sig
    c = Const("c", "List")
    rec = sig.app("is-Nil", c)
    cfg = SolverConfig()
    assert check_sat(cfg, QfQuery(sig, (c,), (rec,))).outcome == SAT
    assert check_sat(cfg, QfQuery(sig, (c,), (rec, neg(rec)))).outcome == UNSAT


def test_prefix_testers_are_accepted_by_z3():
    sig = load("insert_nil").sig
    c = Const("c", "List")
    cfg = SolverConfig(tester_syntax="prefix")
    q = QfQuery(sig, (c,), (sig.app("is-Cons", c), sig.app("is-Nil", c)))
    assert check_sat(cfg, q).outcome == UNSAT


def test_incremental_session_sends_only_the_delta():
    sig = load("insert_nil").sig
    c = Const("c", "List")
    with SolverSession(sig) as s:
        s.add((c,), [sig.app("is-Cons", c)])
        assert s.check().outcome == SAT
        n = len(s.transcript)
        s.add((), [sig.app("is-Nil", c)])
        assert s.check().outcome == UNSAT
        delta = s.transcript[n:]
    assert delta == ["(assert ((_ is Nil) c))", "(check-sat)", '(echo "fluid-sync")']


def test_non_incremental_restarts():
    sig = load("insert_nil").sig
    c = Const("c", "List")
    with SolverSession(sig, SolverConfig(incremental=False)) as s:
        s.add((c,), [sig.app("is-Cons", c)])
        assert s.check().outcome == SAT
        s.add((), [sig.app("is-Nil", c)])
        assert s.check().outcome == UNSAT


def test_missing_solver_is_a_process_error():
    sig = load("insert_nil").sig
    cfg = SolverConfig(executable="/nonexistent/solver")
    assert check_sat(cfg, QfQuery(sig, (), (builtin("=", IntLit(1), IntLit(1)),))).outcome == PROCESS_ERROR


def test_solver_error_output_is_a_process_error():
    sig = load("insert_nil").sig
    cfg = SolverConfig(logic="NOT_A_LOGIC")
    v = check_sat(cfg, QfQuery(sig, (), (builtin("=", IntLit(1), IntLit(1)),)))
    assert v.outcome == PROCESS_ERROR


@pytest.fixture
def silent_solver(tmp_path):
    p = tmp_path / "silent"
    p.write_text(f"#!{sys.executable}\nimport sys, time\nfor _ in sys.stdin:\n    time.sleep(0)\n")
    p.chmod(p.stat().st_mode | stat.S_IEXEC)
    return str(p)


def test_timeout_kills_and_restarts(silent_solver):
    sig = load("insert_nil").sig
    cfg = SolverConfig(executable=silent_solver, args=(), timeout_ms=300)
    with SolverSession(sig, cfg) as s:
        s.add((), [builtin("=", IntLit(1), IntLit(1))])
        assert s.check().outcome == TIMEOUT
        assert s._proc is None
        assert s.check().outcome == TIMEOUT
