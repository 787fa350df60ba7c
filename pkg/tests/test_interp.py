"""The standard-model interpreter against plain Python reference code."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluid.interp import CtorValue, FuelExhausted, GuardViolation, eval_standard, value_to_term
from fluid.logic import App, IntLit

from support import load


# reference implementations on Python lists, written before the interpreter was consulted
def ref_insert(xs, k):
    out = []
    for i, h in enumerate(xs):
        if h >= k:
            return out + [k] + xs[i:]
        out.append(h)
    return out + [k]


def ref_sorted(xs):
    return all(a <= b for a, b in zip(xs, xs[1:]))


def ref_merge(xs, ys):
    if not xs:
        return ys
    if not ys:
        return xs
    if xs[0] <= ys[0]:
        return [xs[0]] + ref_merge(xs[1:], ys)
    return [ys[0]] + ref_merge(xs, ys[1:])


def to_list(v):
    out = []
    while v.name == "Cons":
        out.append(v.args[0])
        v = v.args[1]
    return out


def list_term(sig, xs):
    t = sig.app("Nil")
    for h in reversed(xs):
        t = sig.app("Cons", IntLit(h), t)
    return t


def test_reference_insert_examples():
    assert ref_insert([], 3) == [3]
    assert ref_insert([1, 4], 3) == [1, 3, 4]
    assert ref_insert([5], 5) == [5, 5]
    assert ref_sorted([1, 1, 2]) and not ref_sorted([2, 1])


ints = st.lists(st.integers(-20, 20), max_size=8)


@settings(max_examples=60, deadline=None)
@given(ints, st.integers(-20, 20))
def test_insert_matches_reference(xs, k):
    sf = load("insert_nil")
    v = eval_standard(sf.sig, sf.defs, sf.sig.app("insert", list_term(sf.sig, xs), IntLit(k)))
    assert to_list(v) == ref_insert(xs, k)


@settings(max_examples=60, deadline=None)
@given(ints)
def test_sorted_matches_reference(xs):
    sf = load("insert_nil")
    assert eval_standard(sf.sig, sf.defs, sf.sig.app("sorted", list_term(sf.sig, xs))) == ref_sorted(xs)


@settings(max_examples=40, deadline=None)
@given(ints, ints)
def test_merge_matches_reference(xs, ys):
    sf = load("merge")
    t = sf.sig.app("merge", list_term(sf.sig, xs), list_term(sf.sig, ys))
    assert to_list(eval_standard(sf.sig, sf.defs, t)) == ref_merge(xs, ys)


def test_peano_plus():
    sf = load("peano_zeroL")
    sig = sf.sig

    def nat(n):
        t = sig.app("Z")
        for _ in range(n):
            t = sig.app("S", t)
        return t

    v = eval_standard(sig, sf.defs, sig.app("plus", nat(2), nat(3)))
    assert v == eval_standard(sig, sf.defs, nat(5))


def test_forever_runs_out_of_fuel():
    sf = load("forever")
    with pytest.raises(FuelExhausted):
        eval_standard(sf.sig, sf.defs, sf.sig.app("forever", sf.sig.app("Nil")), fuel=1000)


def test_destructor_on_wrong_constructor():
    sf = load("insert_nil")
    with pytest.raises(GuardViolation):
        eval_standard(sf.sig, sf.defs, sf.sig.app("head", sf.sig.app("Nil")))


def test_lazy_connectives_skip_guarded_operand():
    sf = load("insert_vc_inductive")
    sig = sf.sig
    nil = sig.app("Nil")
    guarded = App("=>", (App("not", (App("=", (nil, nil), "Bool", "builtin"),), "Bool", "builtin"),
                         App(">=", (sig.app("head", nil), IntLit(0)), "Bool", "builtin")), "Bool", "builtin")
    with pytest.raises(GuardViolation):
        eval_standard(sig, sf.defs, guarded)
    assert eval_standard(sig, sf.defs, guarded, lazy_connectives=True) is True


def test_value_to_term_roundtrip():
    sf = load("insert_nil")
    v = CtorValue("Cons", (1, CtorValue("Nil", ())))
    t = value_to_term(sf.sig, v, "List")
    assert eval_standard(sf.sig, sf.defs, t) == v
