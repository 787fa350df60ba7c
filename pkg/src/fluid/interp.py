"""Eager evaluation over the standard model (finite constructor terms, integers, booleans)."""

from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Union

from .logic import (
    BUILTIN,
    CONSTRUCTOR,
    DEFINED,
    DESTRUCTOR,
    RECOGNIZER,
    App,
    BoolLit,
    Const,
    IntLit,
    Ite,
    Quant,
    Signature,
    Term,
    Var,
    show,
)

DEFAULT_FUEL = 10**5
MAX_CALL_DEPTH = 500


@dataclass(frozen=True)
class CtorValue:
    name: str
    args: tuple

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return "(" + " ".join([self.name] + [str(a) for a in self.args]) + ")"


Value = Union[int, bool, CtorValue]


class EvalError(Exception):
    pass


class FuelExhausted(EvalError):
    pass


class GuardViolation(EvalError):
    """A destructor was applied to a value built with another constructor."""


class _Fuel:
    def __init__(self, n: int) -> None:
        self.left = n
        self.depth = 0


@contextmanager
def _recursion_headroom(limit: int):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def eval_standard(sig: Signature, defs, t: Term, fuel: int = DEFAULT_FUEL, lazy_connectives: bool = False) -> Value:
    """Evaluate a ground term in the standard model.

    ``defs`` maps defined-symbol names to objects with ``params`` and
    ``body`` (see :class:`fluid.defs.Definition`).  ite evaluates its
    condition and then one branch; everything else is evaluated arguments
    first.  ``lazy_connectives`` additionally short-circuits ``and``, ``or``
    and ``=>`` (useful for goals whose destructors are guarded by
    implications).  Raises :class:`FuelExhausted` after ``fuel`` call
    expansions or when the call stack gets too deep.
    """
    table = defs if isinstance(defs, dict) else {d.name: d for d in defs}
    f = _Fuel(fuel)
    with _recursion_headroom(MAX_CALL_DEPTH * 40):
        return _eval(sig, table, t, {}, f, lazy_connectives)


def _eval(sig, defs, t, env, fuel, lazy) -> Value:
    if isinstance(t, IntLit):
        return t.value
    if isinstance(t, BoolLit):
        return t.value
    if isinstance(t, Var):
        if t in env:
            return env[t]
        raise EvalError(f"unbound variable {t.name}")
    if isinstance(t, Const):
        raise EvalError(f"cannot evaluate uninterpreted constant {t.name}")
    if isinstance(t, Quant):
        raise EvalError("cannot evaluate a quantified formula")
    if isinstance(t, Ite):
        c = _eval(sig, defs, t.cond, env, fuel, lazy)
        return _eval(sig, defs, t.then if c else t.orelse, env, fuel, lazy)
    assert isinstance(t, App)
    if lazy and t.kind == BUILTIN and t.op in ("and", "or", "=>"):
        return _lazy_connective(sig, defs, t, env, fuel, lazy)
    vals = [_eval(sig, defs, a, env, fuel, lazy) for a in t.args]
    if t.kind == BUILTIN:
        return _builtin(t.op, vals)
    if t.kind == CONSTRUCTOR:
        return CtorValue(t.op, tuple(vals))
    if t.kind == DESTRUCTOR:
        _, ctor, i = sig.constructor_of_destructor(t.op)
        v = vals[0]
        if v.name != ctor.name:
            raise GuardViolation(f"{t.op} applied to {v} in {show(t)}")
        return v.args[i]
    if t.kind == RECOGNIZER:
        _, ctor = sig.constructor_of_recognizer(t.op)
        return vals[0].name == ctor.name
    if t.kind == DEFINED:
        d = defs[t.op]
        if fuel.left <= 0:
            raise FuelExhausted(f"fuel exhausted at {t.op}")
        if fuel.depth >= MAX_CALL_DEPTH:
            raise FuelExhausted(f"call depth exceeded at {t.op}")
        fuel.left -= 1
        fuel.depth += 1
        try:
            return _eval(sig, defs, d.body, dict(zip(d.params, vals)), fuel, lazy)
        finally:
            fuel.depth -= 1
    raise EvalError(f"no standard interpretation for {t.kind} {t.op}")


def _lazy_connective(sig, defs, t, env, fuel, lazy) -> bool:
    if t.op == "and":
        return all(_eval(sig, defs, a, env, fuel, lazy) for a in t.args)
    if t.op == "or":
        return any(_eval(sig, defs, a, env, fuel, lazy) for a in t.args)
    return (not _eval(sig, defs, t.args[0], env, fuel, lazy)) or _eval(sig, defs, t.args[1], env, fuel, lazy)


def _builtin(op: str, v: list) -> Value:
    if op == "and":
        return all(v)
    if op == "or":
        return any(v)
    if op == "not":
        return not v[0]
    if op == "=>":
        return (not v[0]) or v[1]
    if op == "=":
        return v[0] == v[1]
    if op == "<":
        return v[0] < v[1]
    if op == "<=":
        return v[0] <= v[1]
    if op == ">":
        return v[0] > v[1]
    if op == ">=":
        return v[0] >= v[1]
    if op == "+":
        return sum(v)
    if op == "-":
        return -v[0] if len(v) == 1 else v[0] - sum(v[1:])
    if op == "*":
        out = 1
        for x in v:
            out *= x
        return out
    raise EvalError(f"unknown builtin {op}")


def value_to_term(sig: Signature, v: Value, sort: str) -> Term:
    if sort == "Int":
        return IntLit(v)
    if sort == "Bool":
        return BoolLit(v)
    _, ctor = sig.constructor(v.name)
    return App(v.name, tuple(value_to_term(sig, a, s) for a, s in zip(v.args, ctor.arg_sorts)), sort, CONSTRUCTOR)
