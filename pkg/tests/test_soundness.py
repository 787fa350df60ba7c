"""Valid verdicts checked against the standard model on random ground instances."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluid.contracts import run_uqfr_contracts
from fluid.engine import VALID, run_uqfr
from fluid.interp import GuardViolation, eval_standard
from fluid.logic import DApplication, IntLit, Quant, _subst, depth, normalize

from randomvalues import MAX_DEPTH, random_term
from support import by_mode, ctask, load, task

SAMPLES = 100


def valid_fixtures():
    out = [n for n in by_mode("prove") if load(n).expect == "valid"]
    out += [n for n in by_mode("prove-contracts") if load(n).expect == "valid"]
    return out


def counterexamples(name, seed=0):
    sf = load(name)
    rng = random.Random(f"{name}-{seed}")
    goal = sf.goal
    vs, body = (goal.vars, goal.body) if isinstance(goal, Quant) else ((), goal)
    bad = []
    for _ in range(SAMPLES):
        binding = {v: random_term(sf.sig, v.sort, rng) for v in vs}
        assert all(depth(t) <= MAX_DEPTH + 1 for t in binding.values())
        value = eval_standard(sf.sig, sf.defs, _subst(body, binding), fuel=10**5, lazy_connectives=True)
        if value is not True:
            bad.append(binding)
    return bad


@pytest.mark.parametrize("name", valid_fixtures())
def test_valid_fixtures_hold_on_random_instances(name):
    if name in by_mode("prove"):
        assert run_uqfr(task(name)).outcome == VALID
    else:
        assert run_uqfr_contracts(ctask(name)).outcome == VALID
    assert counterexamples(name) == []


def test_smoke_test_finds_a_planted_bug():
    # sortedness is not preserved by consing an arbitrary element
    from fluid.syntax import parse_source

    src = (
        "(declare-adt List ((Nil) (Cons (head Int) (tail List))))\n"
        "(define-rec (sorted (x List)) Bool (ite (is-Nil x) true (ite (is-Nil (tail x)) true"
        " (and (<= (head x) (head (tail x))) (sorted (tail x))))))\n"
        "(goal (forall ((x List) (k Int)) (=> (sorted x) (sorted (Cons k x)))))"
    )
    sf = parse_source(src)
    rng = random.Random(1)
    found = 0
    for _ in range(SAMPLES):
        x = random_term(sf.sig, "List", rng)
        k = random_term(sf.sig, "Int", rng)
        body = _subst(sf.goal.body, dict(zip(sf.goal.vars, (x, k))))
        found += eval_standard(sf.sig, sf.defs, body, lazy_connectives=True) is False
    assert found > 0


list_sig = load("insert_nil").sig


@st.composite
def list_terms(draw, depth=4):
    # ground list terms mixing constructors and destructors
    if depth == 0 or draw(st.booleans()):
        xs = draw(st.lists(st.integers(-20, 20), max_size=4))
        t = list_sig.app("Nil")
        for h in reversed(xs):
            t = list_sig.app("Cons", IntLit(h), t)
        return t
    inner = draw(list_terms(depth - 1))
    if draw(st.booleans()):
        return list_sig.app("tail", inner)
    return list_sig.app("Cons", IntLit(draw(st.integers(-20, 20))), inner)


@settings(max_examples=200, deadline=None)
@given(list_terms())
def test_normalize_is_idempotent_and_preserves_values(t):
    n = normalize(t, list_sig)
    assert normalize(n, list_sig) == n
    try:
        v = eval_standard(list_sig, [], t)
    except GuardViolation:
        return
    assert eval_standard(list_sig, [], n) == v


@settings(max_examples=100, deadline=None)
@given(list_terms(), st.integers(-20, 20))
def test_dapplications_are_hashable_keys(t, k):
    a = DApplication("insert", (normalize(t, list_sig), IntLit(k)))
    assert {a: 1}[DApplication(a.symbol, a.args)] == 1
