"""Parser and printer for ``.fluid`` source files.

A file is a sequence of s-expression commands::

    ; expect: valid
    (declare-adt List ((Nil) (Cons (head Int) (tail List))))
    (declare-fun f (Int) Int)
    (define-rec (length (x List)) Int :stratum 0
      (ite (is-Nil x) 0 (+ 1 (length (tail x)))))
    (contract length :post (>= r 0) :ret r)
    (goal (forall ((x List)) (>= (length x) 0)))

Comment lines of the form ``; key: value`` before or between commands are
collected as headers (``expect``, ``mode``, ``max-rounds``, ``flags``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .defs import Contract, Definition, RankSpec
from .logic import (
    ARITH_OPS,
    BOOL,
    BOOL_OPS,
    COMPARE_OPS,
    DEFINED,
    FALSE,
    INT,
    TRUE,
    AdtDecl,
    App,
    BoolLit,
    Constructor,
    IntLit,
    Quant,
    Signature,
    SortError,
    Symbol,
    Term,
    Var,
    BACKGROUND,
    builtin,
    check_guards,
    eq,
    ite,
    show,
)
from .sexpr import Atom, ParseError, SExpr, SList, is_int, read_all

_HEADER = re.compile(r"^\s*;\s*(expect|mode|max-rounds|flags)\s*:\s*(.*?)\s*$")


@dataclass
class SourceFile:
    sig: Signature
    defs: list[Definition]
    goal: Term
    contracts: list[Contract] = field(default_factory=list)
    headers: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    name: str = "<input>"

    @property
    def expect(self) -> Optional[str]:
        return self.headers.get("expect")


def recognizer_name(ctor: str) -> str:
    return f"is-{ctor}"


# ---------------------------------------------------------------------------
# Parsing


class _SetSort:
    """Marker for ``(Set E)`` while set encoding is enabled."""

    def __init__(self, elem: str) -> None:
        self.elem = elem


class _Parser:
    def __init__(self, forms: list[SExpr], set_encoding: bool) -> None:
        self.forms = forms
        self.set_encoding = set_encoding
        self.sig = Signature()
        self.set_valued: dict[str, str] = {}  # defined symbol -> element sort

    # -- helpers

    def fail(self, msg: str, at: SExpr) -> ParseError:
        return ParseError(msg, at.line, at.col)

    def atom(self, sx: SExpr, what: str) -> str:
        if not isinstance(sx, Atom):
            raise self.fail(f"expected {what}", sx)
        return sx.text

    def sort(self, sx: SExpr, known: set[str], allow_set: bool = False):
        if isinstance(sx, SList):
            if (
                allow_set
                and self.set_encoding
                and len(sx) == 2
                and isinstance(sx[0], Atom)
                and sx[0].text == "Set"
            ):
                return _SetSort(self.sort(sx[1], known))
            if isinstance(sx[0], Atom) and sx[0].text == "Set" and not self.set_encoding:
                raise self.fail("set sorts need --enable-set-encoding", sx)
            raise self.fail("malformed sort", sx)
        name = sx.text
        if name not in known:
            raise self.fail(f"unknown sort {name!r}", sx)
        return name

    # -- top level

    def run(self) -> tuple[list[Definition], list[Contract], Term]:
        groups: dict[str, list[SList]] = {k: [] for k in ("declare-adt", "declare-fun", "define-rec", "contract", "goal")}
        for f in self.forms:
            if not isinstance(f, SList) or not f.items or not isinstance(f[0], Atom):
                raise self.fail("expected a command", f)
            if f[0].text not in groups:
                raise self.fail(f"unknown command {f[0].text!r}", f)
            groups[f[0].text].append(f)
        adts, funs, recs = groups["declare-adt"], groups["declare-fun"], groups["define-rec"]
        contracts, goals = groups["contract"], groups["goal"]
        known = {INT, BOOL}
        for f in adts:
            if len(f) != 3:
                raise self.fail("declare-adt expects a name and a constructor list", f)
            known.add(self.atom(f[1], "sort name"))
        for f in adts:
            self.sig.adts.append(self.adt(f, known))
        for f in funs:
            self.sig.functions.append(self.declare_fun(f, known))
        headers = [self.rec_header(f, known) for f in recs]
        self.sig.defined.extend(h[0] for h in headers)
        self.sig.__dict__.pop("_index", None)
        defs = [self.define_rec(f, h) for f, h in zip(recs, headers)]
        table = {d.name: d for d in defs}
        cs = [self.contract(f, table) for f in contracts]
        if len(goals) != 1:
            at = goals[1] if goals else (self.forms[-1] if self.forms else Atom("", 1, 1))
            raise self.fail(f"expected exactly one goal, found {len(goals)}", at)
        g = goals[0]
        if len(g) != 2:
            raise self.fail("goal expects one formula", g)
        goal = self.formula(g[1], {})
        return defs, cs, goal

    def adt(self, f: SList, known: set[str]) -> AdtDecl:
        name = f[1].text
        if not isinstance(f[2], SList):
            raise self.fail("expected a constructor list", f[2])
        ctors = []
        for c in f[2]:
            if not isinstance(c, SList) or not c.items:
                raise self.fail("expected (Ctor (field Sort) ...)", c)
            cname = self.atom(c[0], "constructor name")
            fields = []
            for fd in c.items[1:]:
                if not isinstance(fd, SList) or len(fd) != 2:
                    raise self.fail("expected (field Sort)", fd)
                fields.append((self.atom(fd[0], "destructor name"), self.sort(fd[1], known)))
            ctors.append(Constructor(cname, tuple(fields), recognizer_name(cname)))
        return AdtDecl(name, tuple(ctors))

    def declare_fun(self, f: SList, known: set[str]) -> Symbol:
        if len(f) != 4 or not isinstance(f[2], SList):
            raise self.fail("declare-fun expects a name, argument sorts and a result sort", f)
        return Symbol(
            self.atom(f[1], "function name"),
            BACKGROUND,
            tuple(self.sort(s, known) for s in f[2]),
            self.sort(f[3], known),
        )

    def rec_header(self, f: SList, known: set[str]):
        if len(f) < 4 or not isinstance(f[1], SList) or not f[1].items:
            raise self.fail("define-rec expects (name (param Sort) ...) ResultSort [attributes] body", f)
        name = self.atom(f[1][0], "function name")
        params = []
        for p in f[1].items[1:]:
            if not isinstance(p, SList) or len(p) != 2:
                raise self.fail("expected (param Sort)", p)
            params.append(Var(self.atom(p[0], "parameter name"), self.sort(p[1], known)))
        if len({p.name for p in params}) != len(params):
            raise self.fail(f"{name} repeats a parameter name", f[1])
        res = self.sort(f[2], known, allow_set=True)
        if isinstance(res, _SetSort):
            # characteristic predicate with an extra element parameter
            self.set_valued[name] = res.elem
            params.append(Var(_fresh_elem(params), res.elem))
            res = BOOL
        return Symbol(name, DEFINED, tuple(p.sort for p in params), res), tuple(params)

    def define_rec(self, f: SList, header) -> Definition:
        sym, params = header
        rest = list(f.items[3:])
        stratum, rank_sx = None, None
        while len(rest) > 1 and isinstance(rest[0], Atom) and rest[0].text.startswith(":"):
            key = rest[0].text
            if key == ":stratum":
                if not is_int(rest[1]) or int(rest[1].text) < 0:
                    raise self.fail(":stratum expects a natural number", rest[1])
                stratum = int(rest[1].text)
            elif key == ":rank":
                rank_sx = rest[1]
            else:
                raise self.fail(f"unknown attribute {key}", rest[0])
            rest = rest[2:]
        if len(rest) != 1:
            raise self.fail("define-rec expects exactly one body", f)
        env = {p.name: p for p in params}
        if sym.name in self.set_valued:
            body = self.set_term(rest[0], env, params[-1])
        else:
            body = self.term(rest[0], env)
        if body.sort != sym.result_sort:
            raise self.fail(f"body of {sym.name} has sort {body.sort}, expected {sym.result_sort}", rest[0])
        rank = None
        if rank_sx is not None:
            rank = RankSpec("expr", self.term(rank_sx, env))
        return Definition(sym, params, body, stratum, rank)

    def contract(self, f: SList, table: dict[str, Definition]) -> Contract:
        if len(f) < 2:
            raise self.fail("contract expects a symbol", f)
        name = self.atom(f[1], "symbol")
        if name not in table:
            raise self.fail(f"contract for {name!r}, which has no definition", f[1])
        d = table[name]
        attrs: dict[str, SExpr] = {}
        rest = list(f.items[2:])
        while rest:
            if len(rest) < 2 or not isinstance(rest[0], Atom) or rest[0].text not in (":pre", ":post", ":ret"):
                raise self.fail("contract expects :pre, :post and :ret attributes", rest[0])
            attrs[rest[0].text] = rest[1]
            rest = rest[2:]
        if ":post" not in attrs:
            raise self.fail("contract needs :post", f)
        rname = self.atom(attrs[":ret"], "return variable") if ":ret" in attrs else "r"
        ret = Var(rname, d.symbol.result_sort)
        env = {p.name: p for p in d.params}
        if rname in env:
            raise self.fail(f"return variable {rname!r} clashes with a parameter", attrs.get(":ret", f))
        pre = self.formula(attrs[":pre"], env) if ":pre" in attrs else TRUE
        env[rname] = ret
        post = self.formula(attrs[":post"], env)
        return Contract(name, d.params, pre, post, ret)

    # -- terms

    def formula(self, sx: SExpr, env: dict[str, Var]) -> Term:
        t = self.term(sx, env)
        if t.sort != BOOL:
            raise self.fail(f"expected a formula, got a term of sort {t.sort}", sx)
        return t

    def term(self, sx: SExpr, env: dict[str, Var]) -> Term:
        try:
            return self._term(sx, env)
        except SortError as e:
            raise self.fail(str(e), sx) from None

    def _term(self, sx: SExpr, env: dict[str, Var]) -> Term:
        if isinstance(sx, Atom):
            text = sx.text
            if is_int(sx):
                return IntLit(int(text))
            if text == "true":
                return TRUE
            if text == "false":
                return FALSE
            if text in env:
                return env[text]
            sym = self.sig.lookup(text)
            if sym is not None and not sym.arg_sorts:
                return App(text, (), sym.result_sort, sym.kind)
            raise self.fail(f"unknown identifier {text!r}", sx)
        if not sx.items:
            raise self.fail("empty application", sx)
        head = sx[0]
        if not isinstance(head, Atom):
            raise self.fail("expected an operator", head)
        op, args = head.text, sx.items[1:]
        if op in ("forall", "exists"):
            return self.quant(sx, env)
        if op == "ite":
            if len(args) != 3:
                raise self.fail("ite expects 3 arguments", sx)
            return ite(*(self.term(a, env) for a in args))
        if op == "member" and self.set_encoding:
            if len(args) != 2:
                raise self.fail("member expects an element and a set", sx)
            k = self.term(args[0], env)
            return self.set_term(args[1], env, k)
        if op in BOOL_OPS or op in ARITH_OPS or op in COMPARE_OPS or op == "=":
            return builtin(op, *(self.term(a, env) for a in args))
        if op in self.set_valued:
            raise self.fail(f"set-valued {op} may only appear under member", sx)
        if self.sig.lookup(op) is None:
            raise self.fail(f"unknown function {op!r}", head)
        return self.sig.app(op, *(self.term(a, env) for a in args))

    def quant(self, sx: SList, env: dict[str, Var]) -> Term:
        if len(sx) != 3 or not isinstance(sx[1], SList):
            raise self.fail(f"{sx[0].text} expects a variable list and a body", sx)
        vs = []
        inner = dict(env)
        known = {INT, BOOL} | {a.sort for a in self.sig.adts}
        for b in sx[1]:
            if not isinstance(b, SList) or len(b) != 2:
                raise self.fail("expected (var Sort)", b)
            v = Var(self.atom(b[0], "variable"), self.sort(b[1], known))
            if v.name in inner:
                raise self.fail(f"variable {v.name} is bound twice", b)
            inner[v.name] = v
            vs.append(v)
        return Quant(sx[0].text, tuple(vs), self.formula(sx[2], inner))

    def set_term(self, sx: SExpr, env: dict[str, Var], elem: Term) -> Term:
        """Lower a set expression to the formula "elem is in the set"."""
        if isinstance(sx, Atom):
            if sx.text == "emptyset":
                return FALSE
            raise self.fail(f"expected a set expression, got {sx.text!r}", sx)
        if not sx.items or not isinstance(sx[0], Atom):
            raise self.fail("expected a set expression", sx)
        op, args = sx[0].text, sx.items[1:]
        try:
            if op == "singleton" and len(args) == 1:
                return eq(elem, self.term(args[0], env))
            if op == "union":
                return builtin("or", *(self.set_term(a, env, elem) for a in args))
            if op == "ite" and len(args) == 3:
                return ite(self.formula(args[0], env), self.set_term(args[1], env, elem), self.set_term(args[2], env, elem))
            if op in self.set_valued:
                return self.sig.app(op, *(self.term(a, env) for a in args), elem)
        except SortError as e:
            raise self.fail(str(e), sx) from None
        raise self.fail(f"unsupported set expression {op!r}", sx)


def _fresh_elem(params: list[Var]) -> str:
    names = {p.name for p in params}
    n = "e"
    i = 0
    while n in names:
        i += 1
        n = f"e{i}"
    return n


def read_headers(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in text.splitlines():
        m = _HEADER.match(line)
        if m:
            out.setdefault(m.group(1), m.group(2))
    return out


def parse_source(
    text: str,
    name: str = "<input>",
    set_encoding: Optional[bool] = None,
    strict_guards: bool = False,
) -> SourceFile:
    """Parse a ``.fluid`` file.

    ``set_encoding`` defaults to whether the file's ``flags`` header asks for
    ``--enable-set-encoding``.  Unguarded destructors are reported as
    warnings, or raised as errors with ``strict_guards``.
    """
    headers = read_headers(text)
    if set_encoding is None:
        set_encoding = "--enable-set-encoding" in headers.get("flags", "").split()
    forms = read_all(text)
    p = _Parser(forms, set_encoding)
    defs, contracts, goal = p.run()
    warnings = []
    for where, f in [(f"definition of {d.name}", d.body) for d in defs] + [("goal", goal)]:
        for issue in check_guards(f, p.sig).unguarded:
            warnings.append(f"{where}: unguarded destructor {show(issue.destructor)}")
    if strict_guards and warnings:
        raise ParseError("; ".join(warnings))
    return SourceFile(p.sig, defs, goal, contracts, headers, warnings, name)


# ---------------------------------------------------------------------------
# Printing


def print_adt(a: AdtDecl) -> str:
    cs = []
    for c in a.constructors:
        cs.append("(" + " ".join([c.name] + [f"({d} {s})" for d, s in c.fields]) + ")")
    return f"(declare-adt {a.sort} ({' '.join(cs)}))"


def print_definition(d: Definition) -> str:
    params = "".join(f" ({p.name} {p.sort})" for p in d.params)
    out = f"(define-rec ({d.name}{params}) {d.symbol.result_sort}"
    if d.stratum is not None:
        out += f" :stratum {d.stratum}"
    if d.rank is not None and not d.rank.inferred and d.rank.kind == "expr":
        out += f" :rank {show(d.rank.expr)}"
    return out + f"\n  {show(d.body)})"


def print_contract(c: Contract) -> str:
    out = f"(contract {c.symbol}"
    if c.pre != TRUE:
        out += f" :pre {show(c.pre)}"
    return out + f" :post {show(c.post)} :ret {c.ret.name})"


def print_source(sf: SourceFile) -> str:
    lines = [f"; {k}: {v}" for k, v in sf.headers.items()]
    lines += [print_adt(a) for a in sf.sig.adts]
    for f in sf.sig.functions:
        lines.append(f"(declare-fun {f.name} ({' '.join(f.arg_sorts)}) {f.result_sort})")
    lines += [print_definition(d) for d in sf.defs]
    lines += [print_contract(c) for c in sf.contracts]
    lines.append(f"(goal {show(sf.goal)})")
    return "\n".join(lines) + "\n"
