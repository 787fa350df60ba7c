import pytest

from fluid.defs import RankSpec
from fluid.logic import Quant, show
from fluid.sexpr import ParseError, read_all
from fluid.syntax import parse_source, print_source

from support import corpus_names, corpus_path, load

LIST = "(declare-adt List ((Nil) (Cons (head Int) (tail List))))\n"


@pytest.mark.parametrize("name", corpus_names())
def test_round_trip(name):
    sf = load(name)
    once = print_source(sf)
    again = parse_source(once, name)
    assert print_source(again) == once
    assert show(again.goal) == show(sf.goal)
    assert [show(d.body) for d in again.defs] == [show(d.body) for d in sf.defs]


@pytest.mark.parametrize("name", corpus_names())
def test_every_fixture_has_an_expectation(name):
    sf = load(name)
    assert sf.expect in ("valid", "budget-exhausted", "accepted", "rejected")
    assert sf.headers.get("mode") in ("prove", "prove-contracts", "check-acyclicity")


def test_sexpr_positions():
    forms = read_all("; comment\n(a\n  (b c))")
    assert forms[0].line == 2
    assert forms[0][1].line == 3 and forms[0][1].col == 3


def test_sexpr_unbalanced():
    with pytest.raises(ParseError) as e:
        read_all("(a (b c)")
    assert e.value.line == 1


def test_destructor_on_int_is_a_sort_error():
    src = LIST + "(goal (forall ((x List)) (= (head 5) 0)))"
    with pytest.raises(ParseError) as e:
        parse_source(src)
    assert "sort" in str(e.value)
    assert e.value.line == 2


def test_arity_error():
    src = LIST + "(goal (forall ((x List)) (= (Cons 1) x)))"
    with pytest.raises(ParseError):
        parse_source(src)


def test_unknown_symbol():
    src = LIST + "(goal (forall ((x List)) (frob x)))"
    with pytest.raises(ParseError):
        parse_source(src)


def test_exactly_one_goal():
    with pytest.raises(ParseError):
        parse_source(LIST)
    with pytest.raises(ParseError):
        parse_source(LIST + "(goal true)\n(goal true)")


def test_unguarded_destructor_is_a_warning_by_default():
    src = LIST + "(goal (forall ((x List)) (>= (head x) 0)))"
    assert parse_source(src).warnings
    with pytest.raises(ParseError):
        parse_source(src, strict_guards=True)


def test_annotations():
    sf = load("merge")
    merge = {d.name: d for d in sf.defs}["merge"]
    assert merge.stratum == 1
    assert isinstance(merge.rank, RankSpec) and merge.rank.kind == "expr"
    assert show(merge.rank.expr) == "(+ (length x) (length y))"


def test_contracts_parse():
    sf = load("insert_contracts")
    (c,) = sf.contracts
    assert c.symbol == "insert"
    assert show(c.pre) == "(sorted x)" and show(c.post) == "(sorted r)"


def test_peano_zeroL_goal():
    sf = load("peano_zeroL")
    assert isinstance(sf.goal, Quant)
    assert show(sf.goal) == "(forall ((n Peano)) (= (plus Z n) n))"


def test_set_encoding_needs_flag():
    text = corpus_path("sorted_membership_sets").read_text()
    body = "\n".join(line for line in text.splitlines() if not line.startswith(";"))
    with pytest.raises(ParseError):
        parse_source(body)
    sf = parse_source(body, set_encoding=True)
    elems = {d.name: d for d in sf.defs}["elems"]
    assert elems.symbol.arg_sorts == ("List", "Int")
    assert elems.symbol.result_sort == "Bool"
