"""Recursive definitions, ranking specifications, path conditions and computational closure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .logic import (
    DEFINED,
    FOREGROUND,
    INT,
    TRUE,
    App,
    BoolLit,
    DApplication,
    Ite,
    Signature,
    SortError,
    Symbol,
    Term,
    Var,
    _subst,
    children,
    collect_d_applications,
    conj,
    eq,
    implies,
    neg,
    normalize,
    rebuild,
    subterms,
)

INT_LT = "integer-less-than"
SUBTERM = "adt-proper-subterm"


@dataclass(frozen=True)
class OrderSpec:
    sort: str
    predicate: str  # INT_LT | SUBTERM


@dataclass(frozen=True)
class RankSpec:
    """How a definition's arguments are ranked.

    ``identity`` is the stratum-0 rank (the single argument itself).
    ``expr`` ranks by a term over the parameters; a defined rank symbol R is
    the special case ``R(x1, ..., xn)`` and a bare parameter is the
    projection rank produced by inference.
    """

    kind: str  # "identity" | "expr"
    expr: Optional[Term] = None
    inferred: bool = False

    def term(self, params: tuple[Var, ...]) -> Term:
        return params[0] if self.kind == "identity" else self.expr


def order_of(sort: str, sig: Signature) -> Optional[OrderSpec]:
    """The strict order used for ranks of ``sort``; None if the sort is unordered."""
    if sort == INT:
        return OrderSpec(sort, INT_LT)
    if sig.sort_kind(sort) == FOREGROUND:
        return OrderSpec(sort, SUBTERM)
    return None


@dataclass(frozen=True)
class Definition:
    symbol: Symbol
    params: tuple[Var, ...]
    body: Term
    stratum: Optional[int] = None
    rank: Optional[RankSpec] = None

    @property
    def name(self) -> str:
        return self.symbol.name

    def instance(self, args: tuple) -> Term:
        """The body with the parameters replaced by ``args``."""
        if len(args) != len(self.params):
            raise SortError(f"{self.name} expects {len(self.params)} arguments, got {len(args)}")
        for p, a in zip(self.params, args):
            if p.sort != a.sort:
                raise SortError(f"{self.name}: argument for {p.name} has sort {a.sort}, expected {p.sort}")
        return _subst(self.body, dict(zip(self.params, args)))

    def call(self, args: tuple) -> App:
        return App(self.name, tuple(args), self.symbol.result_sort, DEFINED)

    def equation(self, args: tuple) -> Term:
        return eq(self.call(args), self.instance(args))

    def rank_term(self) -> Optional[Term]:
        return None if self.rank is None else self.rank.term(self.params)

    def rank_at(self, args: tuple) -> Optional[Term]:
        if self.rank is None:
            return None
        return _subst(self.rank.term(self.params), dict(zip(self.params, args)))

    def callees(self) -> set[str]:
        return {n.op for n in subterms(self.body) if isinstance(n, App) and n.kind == DEFINED}


def def_table(defs: Iterable[Definition]) -> dict[str, Definition]:
    return {d.name: d for d in defs}


# ---------------------------------------------------------------------------
# Path conditions


@dataclass(frozen=True)
class PathEntry:
    condition: Term
    subexpression: Term
    literals: tuple[Term, ...]


def path_conditions(body: Term) -> list[PathEntry]:
    """Every subexpression of ``body`` paired with the ite conditions guarding it.

    Conditions of an ite inherit the parent path, the then-branch adds the
    condition, the else-branch its negation, and arguments of any other
    node inherit the parent path.  Entries come in pre-order.
    """
    out: list[PathEntry] = []

    def walk(n: Term, lits: tuple) -> None:
        out.append(PathEntry(conj(*lits) if lits else TRUE, n, lits))
        if isinstance(n, Ite):
            walk(n.cond, lits)
            walk(n.then, lits + (n.cond,))
            walk(n.orelse, lits + (neg(n.cond),))
        else:
            for c in children(n):
                walk(c, lits)

    walk(body, ())
    return out


def call_sites(d: Definition) -> list[PathEntry]:
    """Path entries of ``d``'s body whose subexpression is a defined-symbol call."""
    return [e for e in path_conditions(d.body) if isinstance(e.subexpression, App) and e.subexpression.kind == DEFINED]


# ---------------------------------------------------------------------------
# Computational closure


def _fold_ite(t: Term) -> Term:
    cs = children(t)
    if cs:
        new = tuple(_fold_ite(c) for c in cs)
        if new != cs:
            t = rebuild(t, new)
    if isinstance(t, Ite) and isinstance(t.cond, BoolLit):
        return t.then if t.cond.value else t.orelse
    return t


def computational_closure(
    apps: Iterable[DApplication],
    defs: Iterable[Definition],
    sig: Signature,
    depth: int,
    prune: bool = True,
) -> set[DApplication]:
    """Close ``apps`` under "occurs in the unfolded body", ``depth`` times.

    With ``prune`` each unfolded body is first simplified: destructors and
    recognizers on constructor terms are evaluated and ite branches with a
    decided condition are dropped, so ``length(Cons(1, Nil))`` reaches
    ``length(Nil)`` and stops there.  Without it the closure follows the
    purely syntactic frontier the engine uses.
    """
    table = def_table(defs)
    seen = set(apps)
    frontier = set(apps)
    for _ in range(depth):
        nxt: set[DApplication] = set()
        for a in frontier:
            body = table[a.symbol].instance(a.args)
            if prune:
                body = _fold_ite(normalize(body, sig))
            nxt |= collect_d_applications([body], sig)
        frontier = nxt - seen
        if not frontier:
            break
        seen |= frontier
    return seen


# ---------------------------------------------------------------------------
# Contracts


@dataclass(frozen=True)
class Contract:
    """``pre -> post`` for one defined symbol; ``post`` may mention ``ret``."""

    symbol: str
    params: tuple[Var, ...]
    pre: Term
    post: Term
    ret: Var

    def formula(self) -> Term:
        return self.post if self.pre == TRUE else implies(self.pre, self.post)

    def instance(self, args: tuple, call: Term) -> Term:
        """The contract at ``args`` with ``call`` standing for the return value."""
        binding = dict(zip(self.params, args))
        binding[self.ret] = call
        return _subst(self.formula(), binding)
