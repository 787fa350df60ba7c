"""Stratification, provable acyclicity and FLUID membership checks."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import networkx as nx

from .defs import INT_LT, SUBTERM, Definition, OrderSpec, PathEntry, RankSpec, call_sites, def_table, order_of
from .engine import BUDGET_EXHAUSTED, FAILURE, VALID, VerificationTask, run_uqfr
from .logic import (
    BOOL,
    DEFINED,
    DESTRUCTOR,
    App,
    DApplication,
    Quant,
    Signature,
    Term,
    ValidationReport,
    Var,
    builtin,
    check_guards,
    conj,
    entails_constructor,
    forall,
    free_vars,
    implies,
    is_quantifier_free,
    show,
    subterms,
    validate_signature,
)
from .smt import SolverConfig

ACCEPTED_STRUCTURAL = "accepted-structural"
ACCEPTED_SEMANTIC = "accepted-semantic"
REJECTED = "rejected"
UNKNOWN = "unknown"
SOLVER_FAILURE = "solver-failure"

DEFAULT_OBLIGATION_BUDGET = 4


# ---------------------------------------------------------------------------
# Strata and ranks


def _call_graph(defs: list[Definition]) -> nx.DiGraph:
    g = nx.DiGraph()
    names = {d.name for d in defs}
    for d in defs:
        g.add_node(d.name)
        for c in d.callees():
            if c in names:
                g.add_edge(d.name, c)
    return g


def destructor_chain(t: Term) -> Optional[tuple[list[App], Term]]:
    """Split ``d1(d2(...dk(v)))`` into its destructor applications and the innermost term."""
    chain = []
    while isinstance(t, App) and t.kind == DESTRUCTOR:
        chain.append(t)
        t = t.args[0]
    return (chain, t) if chain else None


def guarded_chain(sig: Signature, t: Term, base: Term, path: Iterable[Term]) -> bool:
    """``t`` is a nonempty destructor chain on ``base`` with every step guarded by ``path``."""
    split = destructor_chain(t)
    if split is None or split[1] != base:
        return False
    path = tuple(path)
    for node in split[0]:
        _, ctor, _ = sig.constructor_of_destructor(node.op)
        if not entails_constructor(sig, path, node.args[0], ctor):
            return False
    return True


def _structural_position(group: list[Definition], sig: Signature) -> Optional[dict[str, int]]:
    names = {d.name for d in group}
    arity = min(len(d.params) for d in group)
    for p in range(arity):
        sorts = {d.params[p].sort for d in group}
        if len(sorts) != 1 or not sig.is_adt(sorts.pop()):
            continue
        ok = True
        for d in group:
            for e in call_sites(d):
                call = e.subexpression
                if call.op in names and not guarded_chain(sig, call.args[p], d.params[p], e.literals):
                    ok = False
        if ok:
            return {d.name: p for d in group}
    return None


def infer_strata(defs: Iterable[Definition], sig: Signature) -> tuple[list[Definition], ValidationReport]:
    """Fill in missing strata and ranks.

    Each recursive group (strongly connected component of the call graph)
    is placed one stratum above the highest group it calls.  A structurally
    recursive group gets stratum 0 with the identity rank when it is unary
    and calls nothing else, otherwise the projection rank on the argument
    that shrinks.  Declared annotations are kept as they are.
    """
    defs = list(defs)
    rep = ValidationReport()
    table = def_table(defs)
    g = _call_graph(defs)
    cond = nx.condensation(g)
    resolved: dict[str, Definition] = {}
    for comp in reversed(list(nx.topological_sort(cond))):
        members = sorted(cond.nodes[comp]["members"])
        group = [table[m] for m in members]
        recursive = len(group) > 1 or g.has_edge(members[0], members[0])
        outside = {c for d in group for c in d.callees()} - set(members)
        base = max((resolved[c].stratum for c in outside if c in resolved and resolved[c].stratum is not None), default=-1)
        pos = _structural_position(group, sig) if recursive else None
        for d in group:
            stratum, rank = d.stratum, d.rank
            unary_ordered = len(d.params) == 1 and order_of(d.params[0].sort, sig) is not None
            if stratum is None:
                if recursive and pos is None and rank is None:
                    rep.add(f"{d.name}: cannot infer a stratum and rank; declare :stratum and :rank")
                    resolved[d.name] = d
                    continue
                if unary_ordered and base < 0 and (not recursive or pos is not None) and rank is None:
                    stratum = 0
                else:
                    stratum = max(base + 1, 1)
            if rank is None:
                if stratum == 0:
                    rank = RankSpec("identity", inferred=True)
                elif recursive and pos is not None:
                    rank = RankSpec("expr", d.params[pos[d.name]], inferred=True)
            resolved[d.name] = replace(d, stratum=stratum, rank=rank)
    return [resolved[d.name] for d in defs], rep


def validate_stratification(defs: Iterable[Definition], sig: Signature) -> ValidationReport:
    defs = list(defs)
    rep = ValidationReport()
    names = [d.name for d in defs]
    for n in sorted({n for n in names if names.count(n) > 1}):
        rep.add(f"{n} has more than one definition")
    for s in sig.defined:
        if s.name not in names:
            rep.add(f"{s.name} is declared but has no definition")
    table = def_table(defs)
    for d in defs:
        if d.stratum is None:
            rep.add(f"{d.name} has no stratum")
            continue
        stray = free_vars(d.body) - set(d.params)
        if stray:
            rep.add(f"body of {d.name} mentions non-parameters {sorted(v.name for v in stray)}")
        if d.body.sort != d.symbol.result_sort:
            rep.add(f"body of {d.name} has sort {d.body.sort}, expected {d.symbol.result_sort}")
        for c in sorted(d.callees()):
            if c in table and table[c].stratum is not None and table[c].stratum > d.stratum:
                rep.add(f"{d.name} (stratum {d.stratum}) calls {c} at higher stratum {table[c].stratum}")
        if d.stratum == 0:
            if len(d.params) != 1 or order_of(d.params[0].sort, sig) is None:
                rep.add(f"stratum-0 definition {d.name} must be unary over an ordered sort")
            elif d.rank is not None and d.rank.kind == "expr" and d.rank.expr != d.params[0]:
                rep.add(f"stratum-0 definition {d.name} must use the identity rank")
        if d.rank is not None and d.rank.kind == "expr":
            r = d.rank.expr
            stray = free_vars(r) - set(d.params)
            if stray:
                rep.add(f"rank of {d.name} mentions non-parameters {sorted(v.name for v in stray)}")
            if order_of(r.sort, sig) is None:
                rep.add(f"rank of {d.name} has unordered sort {r.sort}")
            for n in subterms(r):
                if isinstance(n, App) and n.kind == DEFINED:
                    h = table.get(n.op)
                    if h is None or h.stratum is None or h.stratum >= d.stratum:
                        rep.add(f"rank symbol {n.op} of {d.name} must have a stratum strictly below {d.stratum}")
        for e in call_sites(d):
            h = table.get(e.subexpression.op)
            if h is None or h.stratum != d.stratum:
                continue
            if d.rank is None or h.rank is None:
                rep.add(f"{d.name} calls {h.name} at the same stratum but {d.name if d.rank is None else h.name} has no rank")
            elif d.rank_term().sort != h.rank_term().sort:
                rep.add(f"same-stratum callers {d.name} and {h.name} have different rank sorts")
    return rep


# ---------------------------------------------------------------------------
# Obligations


@dataclass(frozen=True)
class ObligationStatus:
    status: str
    tier: str = ""
    rounds: Optional[int] = None
    detail: str = ""

    @property
    def accepted(self) -> bool:
        return self.status in (ACCEPTED_STRUCTURAL, ACCEPTED_SEMANTIC)


@dataclass(frozen=True)
class Obligation:
    index: int
    caller: Definition
    callee: DApplication
    path: tuple[Term, ...]
    lhs: Term
    rhs: Term
    order: OrderSpec
    lower: tuple[Definition, ...]

    @property
    def condition(self) -> Term:
        return conj(*self.path)

    @property
    def goal(self) -> Optional[Term]:
        """``forall params. path -> lhs < rhs`` for integer ranks."""
        if self.order.predicate != INT_LT:
            return None
        body = implies(self.condition, builtin("<", self.lhs, self.rhs)) if self.path else builtin("<", self.lhs, self.rhs)
        return forall(self.caller.params, body)

    def describe(self) -> str:
        rel = "<" if self.order.predicate == INT_LT else "is a proper subterm of"
        return f"{show(self.lhs)} {rel} {show(self.rhs)}"


def acyclicity_obligations(defs: Iterable[Definition], sig: Signature) -> list[Obligation]:
    defs = list(defs)
    table = def_table(defs)
    out = []
    for d in defs:
        lower = tuple(h for h in defs if h.stratum is not None and d.stratum is not None and h.stratum < d.stratum)
        for e in call_sites(d):
            call = e.subexpression
            h = table.get(call.op)
            if h is None or h.stratum != d.stratum or d.rank is None or h.rank is None:
                continue
            lhs, rhs = h.rank_at(call.args), d.rank_term()
            order = order_of(rhs.sort, sig)
            out.append(Obligation(len(out), d, DApplication(call.op, call.args), e.literals, lhs, rhs, order, lower))
    return out


def discharge_obligation(
    ob: Obligation,
    sig: Signature,
    budget: int = DEFAULT_OBLIGATION_BUDGET,
    solver: SolverConfig = SolverConfig(),
    force_semantic: bool = False,
) -> ObligationStatus:
    """Structural check for subterm ranks, bounded UQFR for integer ranks.

    ``force_semantic`` sends a subterm obligation to the solver anyway, by
    proving that the path condition entails every recognizer guard of the
    destructor chain (the chain itself is still required).
    """
    if ob.lhs == ob.rhs:
        return ObligationStatus(REJECTED, detail=f"rank does not decrease: both sides are {show(ob.lhs)}")
    if ob.order.predicate == SUBTERM:
        if not force_semantic:
            if guarded_chain(sig, ob.lhs, ob.rhs, ob.path):
                return ObligationStatus(ACCEPTED_STRUCTURAL, "structural")
            return ObligationStatus(
                UNKNOWN,
                "structural",
                detail="subterm ranks are only discharged structurally: "
                f"{show(ob.lhs)} is not a guarded destructor chain on {show(ob.rhs)}",
            )
        split = destructor_chain(ob.lhs)
        if split is None or split[1] != ob.rhs:
            return ObligationStatus(UNKNOWN, "semantic", detail="not a destructor chain on the caller's rank")
        guards = []
        for node in split[0]:
            _, ctor, _ = sig.constructor_of_destructor(node.op)
            guards.append(App(ctor.recognizer, (node.args[0],), BOOL, "recognizer"))
        goal = forall(ob.caller.params, implies(ob.condition, conj(*guards)) if ob.path else conj(*guards))
    else:
        goal = ob.goal
    task = VerificationTask(sig, ob.lower, goal, solver, budget, name=f"obligation-{ob.caller.name}-{ob.index}")
    res = run_uqfr(task)
    if res.outcome == VALID:
        return ObligationStatus(ACCEPTED_SEMANTIC, "semantic", res.rounds)
    if res.outcome == FAILURE:
        return ObligationStatus(SOLVER_FAILURE, "semantic", detail=res.detail)
    if res.saturated:
        return ObligationStatus(REJECTED, "semantic", res.rounds, "no further unfoldings and the negation is satisfiable")
    return ObligationStatus(UNKNOWN, "semantic", res.rounds, f"not proved within {budget} rounds")


# ---------------------------------------------------------------------------
# FLUID membership


def goal_shape(goal: Term) -> list[str]:
    out = []
    if goal.sort != BOOL:
        out.append("goal is not a formula")
    body = goal
    if isinstance(goal, Quant):
        if goal.kind != "forall":
            out.append("goal is not purely universal (existential quantifier)")
        body = goal.body
        bound = set(goal.vars)
    else:
        bound = set()
    for n in subterms(body):
        if isinstance(n, Quant):
            kind = "existential" if n.kind == "exists" else "nested"
            out.append(f"goal is not purely universal ({kind} quantifier)")
            break
    if is_quantifier_free(body) and free_vars(body) - bound:
        out.append("goal has free variables")
    return out


@dataclass
class FluidReport:
    signature: ValidationReport
    stratification: ValidationReport
    guards: list[str]
    guard_errors: bool
    goal_shape: list[str]
    obligations: list[tuple[Obligation, ObligationStatus]] = field(default_factory=list)
    defs: list[Definition] = field(default_factory=list)

    @property
    def obligations_ok(self) -> bool:
        return all(s.accepted for _, s in self.obligations)

    @property
    def ok(self) -> bool:
        return (
            self.signature.ok
            and self.stratification.ok
            and not self.goal_shape
            and not (self.guard_errors and self.guards)
            and self.obligations_ok
        )

    def problems(self) -> list[str]:
        out = list(self.signature.violations) + list(self.stratification.violations) + list(self.goal_shape)
        if self.guard_errors:
            out += self.guards
        for ob, st in self.obligations:
            if not st.accepted:
                out.append(f"obligation {ob.index} ({ob.caller.name} -> {ob.callee.symbol}): {st.status}: {st.detail}")
        return out

    def to_json(self) -> list[dict]:
        return [
            {
                "index": ob.index,
                "caller": ob.caller.name,
                "callee": ob.callee.symbol,
                "path": show(ob.condition),
                "comparison": ob.describe(),
                "tier": st.tier,
                "status": st.status,
                "rounds": st.rounds,
            }
            for ob, st in self.obligations
        ]


def _smt_guard_check(sig: Signature, defs: list[Definition], issue, params, solver: SolverConfig) -> bool:
    _, ctor, _ = sig.constructor_of_destructor(issue.destructor.op)
    rec = App(ctor.recognizer, (issue.destructor.args[0],), BOOL, "recognizer")
    body = implies(conj(*issue.path), rec) if issue.path else rec
    if free_vars(body) - set(params):
        return False
    task = VerificationTask(sig, tuple(defs), forall(tuple(params), body), solver, DEFAULT_OBLIGATION_BUDGET, name="guard")
    return run_uqfr(task).outcome == VALID


def check_fluid(
    sig: Signature,
    defs: Iterable[Definition],
    goal: Term,
    guards: str = "syntactic",
    budget: int = DEFAULT_OBLIGATION_BUDGET,
    solver: SolverConfig = SolverConfig(),
    jobs: int = 1,
) -> FluidReport:
    """Signature, guards, strata, acyclicity obligations and goal shape.

    ``guards`` is ``syntactic`` (unguarded destructors are warnings),
    ``strict`` (they are errors) or ``smt`` (each one is additionally
    proved from its path condition; those that fail are errors).
    """
    sig_rep = validate_signature(sig)
    resolved, inf_rep = infer_strata(defs, sig)
    strat = validate_stratification(resolved, sig)
    strat.violations[:0] = inf_rep.violations
    issues: list[str] = []
    items = [(f"definition of {d.name}", d.body, d.params) for d in resolved]
    qvars = goal.vars if isinstance(goal, Quant) else ()
    items.append(("goal", goal.body if isinstance(goal, Quant) else goal, qvars))
    for where, f, params in items:
        for issue in check_guards(f, sig).unguarded:
            if guards == "smt" and _smt_guard_check(sig, resolved, issue, params, solver):
                continue
            issues.append(f"{where}: unguarded destructor {show(issue.destructor)}")
    rep = FluidReport(sig_rep, strat, issues, guards in ("strict", "smt"), goal_shape(goal), defs=resolved)
    if strat.ok:
        obs = acyclicity_obligations(resolved, sig)
        run = lambda ob: discharge_obligation(ob, sig, budget, solver)  # noqa: E731
        if jobs > 1 and len(obs) > 1:
            with ThreadPoolExecutor(jobs) as ex:
                statuses = list(ex.map(run, obs))
        else:
            statuses = [run(ob) for ob in obs]
        rep.obligations = list(zip(obs, statuses))
    return rep
