"""Contract-assuming unfolding and its reduction to plain UQFR.

Contract instances are asserted for applications that arise inside an
unfolded body, that is, for calls made by an application already under
consideration.  The reduction compiles the same behaviour into one boolean
definition ``Contract_G`` per affected symbol::

    Contract_G(x) = psi_G(x, G(x)) and AND_{call sites H(t) under path p} (p -> Contract_H(t))

and assumes, for every application ``G(t)`` in the goal, the call-site part
of ``Contract_G(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .defs import Contract, Definition, RankSpec, call_sites, def_table
from .engine import EngineResult, RoundState, TraceSink, VerificationTask, run_uqfr
from .logic import (
    BOOL,
    DEFINED,
    TRUE,
    App,
    DApplication,
    LogicError,
    Quant,
    Signature,
    Symbol,
    Term,
    _subst,
    conj,
    implies,
    ite,
    skolemize_negated_goal,
    ordered,
    collect_d_applications,
    subterms,
)


class ContractError(LogicError):
    pass


@dataclass(frozen=True)
class ContractedTask:
    task: VerificationTask
    contracts: Mapping[str, Contract]

    def __post_init__(self) -> None:
        if not isinstance(self.contracts, Mapping):
            object.__setattr__(self, "contracts", {c.symbol: c for c in self.contracts})
        names = {d.name for d in self.task.defs}
        for s in self.contracts:
            if s not in names:
                raise ContractError(f"contract for {s!r}, which has no definition")


def run_uqfr_contracts(ctask: ContractedTask, sink: Optional[TraceSink] = None) -> EngineResult:
    return run_uqfr(ctask.task, sink, contracts=dict(ctask.contracts))


# ---------------------------------------------------------------------------
# Reduction


@dataclass
class Reduction:
    task: VerificationTask
    contract_defs: dict[str, Definition]  # original symbol -> Contract_G definition
    origin: dict[str, str] = field(default_factory=dict)  # Contract_G name -> G


def _needs_contract(defs: list[Definition], contracts: Mapping[str, Contract]) -> list[str]:
    need = set(contracts)
    changed = True
    while changed:
        changed = False
        for d in defs:
            if d.name not in need and any(e.subexpression.op in need for e in call_sites(d)):
                need.add(d.name)
                changed = True
    return [d.name for d in defs if d.name in need]


def _fresh(name: str, taken: set[str]) -> str:
    out, i = name, 1
    while out in taken:
        i += 1
        out = f"{name}_{i}"
    return out


def _below(d: Definition, cnames: Mapping[str, str], sig: Signature) -> list[Term]:
    """One guarded ``Contract_H`` conjunct per distinct call site of a contracted symbol."""
    parts = []
    for e in call_sites(d):
        call = e.subexpression
        if call.op not in cnames:
            continue
        target = sig.app(cnames[call.op], *call.args)
        # an ite rather than an implication keeps the guard visible as a path condition
        parts.append(ite(e.condition, target, TRUE) if e.literals else target)
    # several call sites may give the same conjunct
    seen, uniq = set(), []
    for p in parts:
        if p not in seen:
            seen.add(p)
            uniq.append(p)
    return uniq


def reduce_to_fluid(ctask: ContractedTask) -> Reduction:
    """Build ``DEF'`` and ``phi'``; the result is a plain verification task."""
    task = ctask.task
    defs = list(task.defs)
    table = def_table(defs)
    needed = _needs_contract(defs, ctask.contracts)
    taken = {s.name for s in task.sig.symbols()}
    cnames: dict[str, str] = {}
    for g in needed:
        cnames[g] = _fresh(f"Contract_{g}", taken)
        taken.add(cnames[g])
    symbols = [Symbol(cnames[g], DEFINED, table[g].symbol.arg_sorts, BOOL) for g in needed]
    sig = task.sig.with_defined(symbols)

    def strat(n: str) -> int:
        s = table[n].stratum
        return 0 if s is None else s

    strata: dict[str, int] = {}
    for g in needed:
        base = strat(g) + 1
        c = ctask.contracts.get(g)
        if c is not None:
            for n in subterms(c.formula()):
                if isinstance(n, App) and n.kind == DEFINED and n.op in table:
                    base = max(base, strat(n.op) + 1)
        strata[g] = base
    changed = True
    while changed:
        changed = False
        for g in needed:
            for e in call_sites(table[g]):
                h = e.subexpression.op
                if h in strata and strata[h] > strata[g]:
                    strata[g] = strata[h]
                    changed = True

    cdefs: dict[str, Definition] = {}
    for g, sym in zip(needed, symbols):
        d = table[g]
        psi = TRUE
        c = ctask.contracts.get(g)
        if c is not None:
            psi = c.instance(d.params, d.call(d.params))
        body = conj(psi, *_below(d, cnames, sig))
        rank = RankSpec("expr", d.rank_term()) if d.rank is not None else None
        cdefs[g] = Definition(sym, d.params, body, strata[g], rank)

    goal = task.goal
    vs, body = (goal.vars, goal.body) if isinstance(goal, Quant) else ((), goal)
    assume = []
    for a in ordered(collect_d_applications([body])):
        if a.symbol in cdefs:
            below = _subst(conj(*_below(table[a.symbol], cnames, sig)), dict(zip(table[a.symbol].params, a.args)))
            if below != TRUE and below not in assume:
                assume.append(below)
    new_body = implies(conj(*assume), body) if assume else body
    new_goal = Quant("forall", vs, new_body) if isinstance(goal, Quant) else new_body
    new_defs = tuple(defs) + tuple(cdefs[g] for g in needed)
    new_task = replace(task, sig=sig, defs=new_defs, goal=new_goal)
    return Reduction(new_task, cdefs, {cdefs[g].name: g for g in needed})


# ---------------------------------------------------------------------------
# Side-by-side simulation


@dataclass
class SimulationRow:
    round: int
    direct_contracts: int
    reduction_contracts: int
    missing: list[str]  # contract instances of the contracts run not matched by the reduction
    extra: list[str]  # contract instances of the reduction not matched by the contracts run
    unfold_missing: list[str]  # original-symbol unfoldings of the contracts run absent from the reduction
    unfold_extra: int = 0


@dataclass
class SimulationReport:
    rows: list[SimulationRow]
    direct: EngineResult
    reduction: EngineResult
    lag: int = 1

    @property
    def verdicts_agree(self) -> bool:
        return self.direct.outcome == self.reduction.outcome

    @property
    def contracts_agree(self) -> bool:
        return all(not r.missing and not r.extra for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.verdicts_agree and self.contracts_agree and all(not r.unfold_missing for r in self.rows)

    def to_json(self) -> dict:
        return {
            "direct_outcome": self.direct.outcome,
            "reduction_outcome": self.reduction.outcome,
            "verdicts_agree": self.verdicts_agree,
            "rows": [
                {
                    "round": r.round,
                    "direct_contracts": r.direct_contracts,
                    "reduction_contracts": r.reduction_contracts,
                    "missing": r.missing,
                    "extra": r.extra,
                    "unfold_missing": r.unfold_missing,
                    "unfold_extra": r.unfold_extra,
                }
                for r in self.rows
            ],
        }


def _diff(xs: list[set], ys: list[set], i: int) -> Optional[set]:
    """``xs[i] - ys[i+1]``, or None when the other run stopped before round i+1."""
    if i >= len(xs) or i + 1 >= len(ys):
        return None
    return xs[i] - ys[i + 1]


def _names(s: Optional[set]) -> list[str]:
    return sorted(str(a) for a in s) if s else []


def simulation_check(ctask: ContractedTask, k: int) -> SimulationReport:
    """Run both procedures for ``k`` rounds and compare what they assume.

    The compared sets are cumulative, so a tolerance of one round means
    comparing round i of one run against round i+1 of the other.  Rounds
    past the point where the other run stopped are not compared.
    Unfoldings only the reduction performs are counted, not reported: it
    also unfolds applications that occur inside contract instances.
    """
    task = replace(ctask.task, max_rounds=k)
    direct = run_uqfr_contracts(ContractedTask(task, ctask.contracts))
    red = reduce_to_fluid(ContractedTask(task, ctask.contracts))
    # same skolem names on both sides so the application sets are comparable
    neg, consts = skolemize_negated_goal(red.task.goal, task.taskhash())
    reduction = run_uqfr(red.task, state=RoundState(0, (neg,), tuple(consts), {}))
    originals = {d.name for d in task.defs}
    contracted = set(ctask.contracts)

    a_con = [set(s.contracted) for s in direct.states]
    r_con = [
        {DApplication(red.origin[a.symbol], a.args) for a in s.unfolded if a.symbol in red.origin and red.origin[a.symbol] in contracted}
        for s in reduction.states
    ]
    a_unf = [set(s.unfolded) for s in direct.states]
    r_unf = [{a for a in s.unfolded if a.symbol in originals} for s in reduction.states]

    rows = []
    for i in range(max(len(a_con), len(r_con))):
        uextra = _diff(r_unf, a_unf, i)
        rows.append(
            SimulationRow(
                i,
                len(a_con[min(i, len(a_con) - 1)]),
                len(r_con[min(i, len(r_con) - 1)]),
                _names(_diff(a_con, r_con, i)),
                _names(_diff(r_con, a_con, i)),
                _names(_diff(a_unf, r_unf, i)),
                len(uextra) if uextra else 0,
            )
        )
    return SimulationReport(rows, direct, reduction)
