"""Multi-sorted first-order terms over algebraic datatypes.

Terms and formulas share one AST: a formula is simply a term of sort ``Bool``.
Every node is an immutable, hashable dataclass, so terms can be used directly
as dictionary keys and set members (this is how D-applications are deduplicated).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, NamedTuple, Optional, Union

INT = "Int"
BOOL = "Bool"

# sort kinds
FOREGROUND = "foreground-adt"
BG_INT = "background-int"
BG_BOOL = "background-bool"

# symbol kinds
CONSTRUCTOR = "constructor"
DESTRUCTOR = "destructor"
RECOGNIZER = "recognizer"
BACKGROUND = "background-function"
DEFINED = "defined-function"
BUILTIN = "builtin"

BOOL_OPS = ("and", "or", "not", "=>")
ARITH_OPS = ("+", "-", "*")
COMPARE_OPS = ("<", "<=", ">", ">=")


class LogicError(Exception):
    pass


class SortError(LogicError):
    pass


class SubstitutionError(LogicError):
    pass


class SkolemizationError(LogicError):
    pass


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Sort:
    name: str
    kind: str


@dataclass(frozen=True)
class Constructor:
    name: str
    fields: tuple[tuple[str, str], ...]  # (destructor name, argument sort)
    recognizer: str

    @property
    def arg_sorts(self) -> tuple[str, ...]:
        return tuple(s for _, s in self.fields)

    @property
    def destructors(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.fields)


@dataclass(frozen=True)
class AdtDecl:
    sort: str
    constructors: tuple[Constructor, ...]


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    arg_sorts: tuple[str, ...]
    result_sort: str


@dataclass
class Signature:
    """Sorts, ADT declarations, background functions and defined symbols.

    The container tolerates invalid content (duplicate names, uninhabited
    sorts) so that :func:`validate_signature` can report on it; lookups
    resolve to the first declaration of a name.
    """

    adts: list[AdtDecl] = field(default_factory=list)
    functions: list[Symbol] = field(default_factory=list)
    defined: list[Symbol] = field(default_factory=list)

    def sorts(self) -> list[Sort]:
        out = [Sort(INT, BG_INT), Sort(BOOL, BG_BOOL)]
        out += [Sort(a.sort, FOREGROUND) for a in self.adts]
        return out

    def sort_kind(self, name: str) -> Optional[str]:
        for s in self.sorts():
            if s.name == name:
                return s.kind
        return None

    def is_adt(self, sort: str) -> bool:
        return self.sort_kind(sort) == FOREGROUND

    def adt(self, sort: str) -> AdtDecl:
        for a in self.adts:
            if a.sort == sort:
                return a
        raise KeyError(sort)

    def symbols(self) -> list[Symbol]:
        out = []
        for a in self.adts:
            for c in a.constructors:
                out.append(Symbol(c.name, CONSTRUCTOR, c.arg_sorts, a.sort))
                for d, s in c.fields:
                    out.append(Symbol(d, DESTRUCTOR, (a.sort,), s))
                out.append(Symbol(c.recognizer, RECOGNIZER, (a.sort,), BOOL))
        return out + list(self.functions) + list(self.defined)

    @cached_property
    def _index(self) -> dict[str, Symbol]:
        idx: dict[str, Symbol] = {}
        for s in self.symbols():
            idx.setdefault(s.name, s)
        return idx

    def lookup(self, name: str) -> Optional[Symbol]:
        return self._index.get(name)

    def constructor(self, name: str) -> tuple[AdtDecl, Constructor]:
        for a in self.adts:
            for c in a.constructors:
                if c.name == name:
                    return a, c
        raise KeyError(name)

    def constructor_of_destructor(self, dtor: str) -> tuple[AdtDecl, Constructor, int]:
        for a in self.adts:
            for c in a.constructors:
                if dtor in c.destructors:
                    return a, c, c.destructors.index(dtor)
        raise KeyError(dtor)

    def constructor_of_recognizer(self, rec: str) -> tuple[AdtDecl, Constructor]:
        for a in self.adts:
            for c in a.constructors:
                if c.recognizer == rec:
                    return a, c
        raise KeyError(rec)

    def with_defined(self, symbols: Iterable[Symbol]) -> "Signature":
        return Signature(list(self.adts), list(self.functions), list(self.defined) + list(symbols))

    def app(self, name: str, *args: "Term") -> "App":
        """Build a sort-checked application of a declared symbol."""
        sym = self.lookup(name)
        if sym is None:
            raise SortError(f"unknown symbol {name!r}")
        if len(args) != len(sym.arg_sorts):
            raise SortError(f"{name} expects {len(sym.arg_sorts)} arguments, got {len(args)}")
        for i, (a, s) in enumerate(zip(args, sym.arg_sorts)):
            if a.sort != s:
                raise SortError(f"argument {i + 1} of {name} has sort {a.sort}, expected {s}")
        return App(name, tuple(args), sym.result_sort, sym.kind)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str) -> None:
        self.violations.append(msg)

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)


def validate_signature(sig: Signature) -> ValidationReport:
    rep = ValidationReport()
    names = [s.name for s in sig.sorts()]
    for n in sorted({n for n in names if names.count(n) > 1}):
        rep.add(f"duplicate sort name {n!r}")
    if not sig.adts:
        rep.add("signature has no foreground ADT sort")
    known = set(names)
    for a in sig.adts:
        if not a.constructors:
            rep.add(f"ADT {a.sort} has no constructors")
        for c in a.constructors:
            for d, s in c.fields:
                if s not in known:
                    rep.add(f"constructor {c.name} field {d} has unknown sort {s!r}")
            if len(set(c.destructors)) != len(c.destructors):
                rep.add(f"constructor {c.name} repeats a destructor name")
    # constructible sorts: least fixpoint
    constructible = {INT, BOOL}
    changed = True
    while changed:
        changed = False
        for a in sig.adts:
            if a.sort in constructible:
                continue
            if any(all(s in constructible for s in c.arg_sorts) for c in a.constructors):
                constructible.add(a.sort)
                changed = True
    for a in sig.adts:
        if a.sort not in constructible:
            rep.add(f"ADT {a.sort} is uninhabited (no finite constructor term)")
    seen: dict[str, str] = {}
    for sym in sig.symbols():
        if sym.name in (INT, BOOL) or sym.name in BOOL_OPS + ARITH_OPS + COMPARE_OPS + ("=", "ite"):
            rep.add(f"symbol {sym.name!r} clashes with a reserved name")
        if sym.name in seen:
            a, b = seen[sym.name], sym.kind
            if DEFINED in (a, b) and a != b:
                rep.add(f"defined symbol {sym.name!r} clashes with a {a if b == DEFINED else b}")
            else:
                rep.add(f"name clash: {sym.name!r} declared as {a} and {b}")
        else:
            seen[sym.name] = sym.kind
        for s in sym.arg_sorts + (sym.result_sort,):
            if s not in known:
                rep.add(f"symbol {sym.name} mentions unknown sort {s!r}")
    return rep


# ---------------------------------------------------------------------------
# Terms


class _Node:
    __slots__ = ()

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, eq=True)
class Var(_Node):
    name: str
    sort: str

    @cached_property
    def _hash(self) -> int:
        return hash(("var", self.name, self.sort))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Const(_Node):
    """An uninterpreted ground constant, e.g. a Skolem constant."""

    name: str
    sort: str

    @cached_property
    def _hash(self) -> int:
        return hash(("const", self.name, self.sort))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class IntLit(_Node):
    value: int

    @property
    def sort(self) -> str:
        return INT

    @cached_property
    def _hash(self) -> int:
        return hash(("int", self.value))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class BoolLit(_Node):
    value: bool

    @property
    def sort(self) -> str:
        return BOOL

    @cached_property
    def _hash(self) -> int:
        return hash(("bool", self.value))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class App(_Node):
    op: str
    args: tuple
    sort: str
    kind: str

    @cached_property
    def _hash(self) -> int:
        return hash(("app", self.op, self.args, self.sort))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Ite(_Node):
    cond: "Term"
    then: "Term"
    orelse: "Term"

    @property
    def sort(self) -> str:
        return self.then.sort

    @cached_property
    def _hash(self) -> int:
        return hash(("ite", self.cond, self.then, self.orelse))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Quant(_Node):
    kind: str  # "forall" | "exists"
    vars: tuple[Var, ...]
    body: "Term"

    @property
    def sort(self) -> str:
        return BOOL

    @cached_property
    def _hash(self) -> int:
        return hash(("quant", self.kind, self.vars, self.body))

    __hash__ = _Node.__hash__


Term = Union[Var, Const, IntLit, BoolLit, App, Ite, Quant]
Formula = Term

TRUE = BoolLit(True)
FALSE = BoolLit(False)


def builtin(op: str, *args: Term) -> Term:
    """Build a sort-checked builtin application (connectives, equality, arithmetic)."""
    if op in ("and", "or"):
        if not args:
            return TRUE if op == "and" else FALSE
        for a in args:
            _want(a, BOOL, op)
        if len(args) == 1:
            return args[0]
        return App(op, tuple(args), BOOL, BUILTIN)
    if op == "not":
        _arity(op, args, 1)
        _want(args[0], BOOL, op)
        return App(op, args, BOOL, BUILTIN)
    if op == "=>":
        _arity(op, args, 2)
        for a in args:
            _want(a, BOOL, op)
        return App(op, args, BOOL, BUILTIN)
    if op == "=":
        _arity(op, args, 2)
        if args[0].sort != args[1].sort:
            raise SortError(f"= compares {args[0].sort} with {args[1].sort}")
        return App(op, args, BOOL, BUILTIN)
    if op in COMPARE_OPS:
        _arity(op, args, 2)
        for a in args:
            _want(a, INT, op)
        return App(op, args, BOOL, BUILTIN)
    if op in ARITH_OPS:
        if not args or (op != "-" and len(args) < 2):
            raise SortError(f"{op} needs more arguments")
        for a in args:
            _want(a, INT, op)
        return App(op, tuple(args), INT, BUILTIN)
    raise SortError(f"unknown builtin {op!r}")


def _arity(op: str, args: tuple, n: int) -> None:
    if len(args) != n:
        raise SortError(f"{op} expects {n} arguments, got {len(args)}")


def _want(t: Term, sort: str, op: str) -> None:
    if t.sort != sort:
        raise SortError(f"{op} expects {sort}, got {t.sort} ({show(t)})")


def ite(cond: Term, then: Term, orelse: Term) -> Ite:
    _want(cond, BOOL, "ite")
    if then.sort != orelse.sort:
        raise SortError(f"ite branches have sorts {then.sort} and {orelse.sort}")
    return Ite(cond, then, orelse)


def conj(*fs: Term) -> Term:
    fs = tuple(f for f in fs if f != TRUE)
    return builtin("and", *fs)


def neg(f: Term) -> Term:
    return builtin("not", f)


def implies(a: Term, b: Term) -> Term:
    return builtin("=>", a, b)


def eq(a: Term, b: Term) -> Term:
    return builtin("=", a, b)


def forall(vs: Iterable[Var], body: Term) -> Quant:
    return Quant("forall", tuple(vs), body)


# ---------------------------------------------------------------------------
# Traversal


def children(t: Term) -> tuple:
    if isinstance(t, App):
        return t.args
    if isinstance(t, Ite):
        return (t.cond, t.then, t.orelse)
    if isinstance(t, Quant):
        return (t.body,)
    return ()


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order walk over every subterm (including ``t``)."""
    stack = [t]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def free_vars(t: Term) -> set[Var]:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Quant):
        return free_vars(t.body) - set(t.vars)
    out: set[Var] = set()
    for c in children(t):
        out |= free_vars(c)
    return out


def is_ground(t: Term) -> bool:
    return not any(isinstance(s, (Var, Quant)) for s in subterms(t))


def is_quantifier_free(t: Term) -> bool:
    return not any(isinstance(s, Quant) for s in subterms(t))


def depth(t: Term) -> int:
    cs = children(t)
    return 1 + max((depth(c) for c in cs), default=0)


def rebuild(t: Term, new_children: tuple) -> Term:
    if isinstance(t, App):
        return App(t.op, tuple(new_children), t.sort, t.kind)
    if isinstance(t, Ite):
        return Ite(*new_children)
    if isinstance(t, Quant):
        return Quant(t.kind, t.vars, new_children[0])
    return t


def transform(t: Term, fn: Callable[[Term], Optional[Term]]) -> Term:
    """Bottom-up rewrite; ``fn`` returns a replacement or None to keep the node."""
    cs = children(t)
    if cs:
        new = tuple(transform(c, fn) for c in cs)
        if new != cs:
            t = rebuild(t, new)
    r = fn(t)
    return t if r is None else r


def replace_subterm(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    cs = children(t)
    if not cs:
        return t
    out = tuple(replace_subterm(c, old, new) for c in cs)
    return t if out == cs else rebuild(t, out)


# ---------------------------------------------------------------------------
# Substitution


def substitute(f: Term, binding: dict[Var, Term]) -> Term:
    """Capture-avoiding simultaneous substitution of free variables."""
    fv = free_vars(f)
    for v, t in binding.items():
        if not isinstance(v, Var):
            raise SubstitutionError(f"substitution target {v!r} is not a variable")
        if v not in fv:
            raise SubstitutionError(f"{v.name} is not a free variable of the formula")
        if t.sort != v.sort:
            raise SortError(f"cannot substitute {show(t)}:{t.sort} for {v.name}:{v.sort}")
    return _subst(f, dict(binding))


def _subst(t: Term, binding: dict[Var, Term]) -> Term:
    if not binding:
        return t
    if isinstance(t, Var):
        return binding.get(t, t)
    if isinstance(t, Quant):
        inner = {v: s for v, s in binding.items() if v not in t.vars}
        incoming: set[Var] = set()
        for s in inner.values():
            incoming |= free_vars(s)
        new_vars = []
        for v in t.vars:
            if v in incoming:
                fresh = _fresh_var(v, incoming | free_vars(t.body) | set(t.vars))
                inner[v] = fresh
                new_vars.append(fresh)
            else:
                new_vars.append(v)
        return Quant(t.kind, tuple(new_vars), _subst(t.body, inner))
    cs = children(t)
    if not cs:
        return t
    new = tuple(_subst(c, binding) for c in cs)
    return t if new == cs else rebuild(t, new)


def _fresh_var(v: Var, avoid: set[Var]) -> Var:
    names = {a.name for a in avoid}
    i = 1
    while f"{v.name}_{i}" in names:
        i += 1
    return Var(f"{v.name}_{i}", v.sort)


# ---------------------------------------------------------------------------
# Well-formedness


def check_sorts(t: Term, sig: Signature) -> list[str]:
    """Return a list of sort errors; empty when ``t`` is well-sorted."""
    errors: list[str] = []

    def visit(n: Term, bound: frozenset) -> None:
        if isinstance(n, Quant):
            names = [v.name for v in n.vars]
            if len(set(names)) != len(names):
                errors.append(f"variable bound twice in one prefix: {names}")
            for v in n.vars:
                if v in bound or any(b.name == v.name for b in bound):
                    errors.append(f"variable {v.name} shadows an outer binding")
            visit(n.body, bound | set(n.vars))
            return
        if isinstance(n, App):
            try:
                if n.kind == BUILTIN:
                    expect = builtin(n.op, *n.args)
                else:
                    expect = sig.app(n.op, *n.args)
                if expect.sort != n.sort:
                    errors.append(f"{n.op} has sort {expect.sort}, node claims {n.sort}")
                if n.kind != BUILTIN and sig.lookup(n.op).kind != n.kind:
                    errors.append(f"{n.op} is a {sig.lookup(n.op).kind}, node claims {n.kind}")
            except SortError as e:
                errors.append(str(e))
        elif isinstance(n, Ite):
            if n.cond.sort != BOOL:
                errors.append("ite condition is not Bool")
            if n.then.sort != n.orelse.sort:
                errors.append("ite branches disagree on sort")
        for c in children(n):
            visit(c, bound)

    visit(t, frozenset())
    return errors


# ---------------------------------------------------------------------------
# Guards


class GuardIssue(NamedTuple):
    destructor: Term
    path: tuple[Term, ...]


@dataclass
class GuardReport:
    unguarded: list[GuardIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unguarded


def guard_paths(f: Term, connectives: bool = True) -> Iterator[tuple[Term, tuple[Term, ...]]]:
    """Yield (subexpression, path literals) for every node of ``f``.

    The ite rules follow the usual path-condition recurrence.  With
    ``connectives`` the right operand of ``=>`` and ``and`` is also reached
    under the left operand, and that of ``or`` under its negation, so that
    guards written as implications are recognized.
    """

    def walk(n: Term, path: tuple) -> Iterator:
        yield n, path
        if isinstance(n, Ite):
            yield from walk(n.cond, path)
            yield from walk(n.then, path + (n.cond,))
            yield from walk(n.orelse, path + (neg(n.cond),))
        elif connectives and isinstance(n, App) and n.kind == BUILTIN and n.op in ("and", "or", "=>"):
            extra: tuple = ()
            for a in n.args:
                yield from walk(a, path + extra)
                if n.op == "or":
                    extra += (neg(a),)
                else:
                    extra += (a,)
        elif isinstance(n, Quant):
            yield from walk(n.body, path)
        else:
            for c in children(n):
                yield from walk(c, path)

    yield from walk(f, ())


def _literals(path: Iterable[Term]) -> set[Term]:
    out: set[Term] = set()
    for p in path:
        if isinstance(p, App) and p.op == "and" and p.kind == BUILTIN:
            out |= _literals(p.args)
        elif (
            isinstance(p, App)
            and p.op == "not"
            and isinstance(p.args[0], App)
            and p.args[0].op == "or"
        ):
            out |= _literals(neg(a) for a in p.args[0].args)
        else:
            out.add(p)
    return out


def entails_constructor(sig: Signature, path: Iterable[Term], t: Term, ctor: Constructor) -> bool:
    """Syntactic check that ``path`` forces ``t`` to be built with ``ctor``.

    Accepted literals: the recognizer itself, ``t = C(..)`` for that
    constructor, and for two-constructor ADTs the negated recognizer or the
    negated equality with the nullary other constructor.
    """
    lits = _literals(path)
    if App(ctor.recognizer, (t,), BOOL, RECOGNIZER) in lits:
        return True
    for lit in lits:
        if isinstance(lit, App) and lit.op == "=" and lit.kind == BUILTIN:
            a, b = lit.args
            for x, y in ((a, b), (b, a)):
                if x == t and isinstance(y, App) and y.kind == CONSTRUCTOR and y.op == ctor.name:
                    return True
    adt = sig.adt(t.sort)
    others = [c for c in adt.constructors if c.name != ctor.name]
    if len(others) == 1:
        other = others[0]
        if neg(App(other.recognizer, (t,), BOOL, RECOGNIZER)) in lits:
            return True
        if not other.fields:
            nil = App(other.name, (), t.sort, CONSTRUCTOR)
            if neg(eq(t, nil)) in lits or neg(eq(nil, t)) in lits:
                return True
    return False


def check_guards(f: Term, sig: Signature, connectives: bool = True) -> GuardReport:
    rep = GuardReport()
    seen = set()
    for n, path in guard_paths(f, connectives):
        if isinstance(n, App) and n.kind == DESTRUCTOR:
            _, ctor, _ = sig.constructor_of_destructor(n.op)
            if not entails_constructor(sig, path, n.args[0], ctor):
                if (n, path) not in seen:
                    seen.add((n, path))
                    rep.unguarded.append(GuardIssue(n, path))
    return rep


# ---------------------------------------------------------------------------
# Skolemization and D-applications


class DApplication(NamedTuple):
    symbol: str
    args: tuple

    def term(self, sig: Signature) -> App:
        return sig.app(self.symbol, *self.args)

    def key(self) -> tuple:
        return (self.symbol, tuple(show(a) for a in self.args))

    def __str__(self) -> str:
        return f"({self.symbol}, ({', '.join(show(a) for a in self.args)}))"


def task_hash(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return h.hexdigest()[:8]


def skolemize_negated_goal(phi: Term, taskhash: str = "0") -> tuple[Term, list[Const]]:
    """Negate a purely universal goal and replace its variables by fresh constants."""
    if isinstance(phi, Quant):
        if phi.kind != "forall":
            raise SkolemizationError("goal is existentially quantified")
        vs, body = phi.vars, phi.body
    else:
        vs, body = (), phi
    if not is_quantifier_free(body):
        raise SkolemizationError("goal has nested quantifiers")
    if free_vars(body) - set(vs):
        raise SkolemizationError("goal has free variables outside its prefix")
    consts = [Const(f"sk_{v.name}_{taskhash}_{i}", v.sort) for i, v in enumerate(vs)]
    binding = {v: c for v, c in zip(vs, consts) if v in free_vars(body)}
    return neg(_subst(body, binding)), consts


def normalize(t: Term, sig: Signature) -> Term:
    """Collapse destructors and recognizers applied directly to constructor terms.

    ``tail(Cons(1, Nil))`` becomes ``Nil`` and ``is-Nil(Cons(1, Nil))``
    becomes ``false``; everything else is kept as written.
    """
    cs = children(t)
    if cs:
        new = tuple(normalize(c, sig) for c in cs)
        if new != cs:
            t = rebuild(t, new)
    if isinstance(t, App) and t.kind in (DESTRUCTOR, RECOGNIZER):
        inner = t.args[0]
        if isinstance(inner, App) and inner.kind == CONSTRUCTOR:
            if t.kind == RECOGNIZER:
                _, ctor = sig.constructor_of_recognizer(t.op)
                return BoolLit(ctor.name == inner.op)
            _, ctor, i = sig.constructor_of_destructor(t.op)
            if ctor.name == inner.op:
                return inner.args[i]
    return t


def collect_d_applications(fs: Iterable[Term], sig: Optional[Signature] = None) -> set[DApplication]:
    """All D-applications occurring in ``fs``, nested ones included.

    With a signature the argument tuples are normalized (see :func:`normalize`).
    """
    out: set[DApplication] = set()
    for f in fs:
        for n in subterms(f):
            if isinstance(n, App) and n.kind == DEFINED:
                args = n.args if sig is None else tuple(normalize(a, sig) for a in n.args)
                out.add(DApplication(n.op, args))
    return out


def ordered(apps: Iterable[DApplication]) -> list[DApplication]:
    """Deterministic order: by symbol name, then by printed argument tuple."""
    return sorted(apps, key=DApplication.key)


# ---------------------------------------------------------------------------
# Printing (surface syntax)


def show(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, BoolLit):
        return "true" if t.value else "false"
    if isinstance(t, Ite):
        return f"(ite {show(t.cond)} {show(t.then)} {show(t.orelse)})"
    if isinstance(t, Quant):
        vs = "".join(f"({v.name} {v.sort})" for v in t.vars)
        return f"({t.kind} ({vs}) {show(t.body)})"
    if isinstance(t, App):
        if not t.args and t.kind == CONSTRUCTOR:
            return t.op
        return "(" + " ".join([t.op] + [show(a) for a in t.args]) + ")"
    raise TypeError(f"not a term: {t!r}")
