"""The UQFR loop: thrifty unfolding of definitions plus quantifier-free satisfiability checks."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional

from .defs import Contract, Definition, call_sites, def_table
from .logic import (
    Const,
    DApplication,
    Signature,
    Term,
    _subst,
    collect_d_applications,
    normalize,
    ordered,
    show,
    skolemize_negated_goal,
    task_hash,
)
from .smt import PROCESS_ERROR, SAT, UNSAT, QfQuery, SolverConfig, SolverSession, SolverVerdict, encode_query

VALID = "valid"
BUDGET_EXHAUSTED = "budget-exhausted"
FAILURE = "failure"

DEFAULT_MAX_ROUNDS = 8

TraceSink = Callable[[str], None]


@dataclass(frozen=True)
class VerificationTask:
    sig: Signature
    defs: tuple[Definition, ...]
    goal: Term
    solver: SolverConfig = SolverConfig()
    max_rounds: int = DEFAULT_MAX_ROUNDS
    trace: str = "off"  # "off" | "summary" | "full"
    emit_smt: Optional[str] = None
    name: str = "task"

    def taskhash(self) -> str:
        return task_hash(show(self.goal), *(f"{d.name} {show(d.body)}" for d in self.defs))


@dataclass(frozen=True)
class RoundState:
    """Everything asserted so far.

    ``formulas`` starts with the negated, skolemized goal and then lists
    unfoldings (and contract instances, in contracts mode) in the order
    they were added.  ``unfolded`` maps each instantiated application to
    its equation.
    """

    round: int
    formulas: tuple[Term, ...]
    consts: tuple[Const, ...]
    unfolded: Mapping[DApplication, Term]
    contracted: Mapping[DApplication, Term] = field(default_factory=dict)

    @property
    def instantiated(self) -> frozenset[DApplication]:
        return frozenset(self.unfolded)

    @property
    def negated_goal(self) -> Term:
        return self.formulas[0]


@dataclass
class RoundRecord:
    round: int
    verdict: str
    new_instantiations: int
    formulas: int
    new_contracts: int = 0


@dataclass
class EngineResult:
    outcome: str
    rounds: int
    instantiations: int
    records: list[RoundRecord] = field(default_factory=list)
    saturated: bool = False
    model_hint: Optional[str] = None
    detail: str = ""
    states: list[RoundState] = field(default_factory=list)

    @property
    def final(self) -> RoundState:
        return self.states[-1]

    @property
    def instantiated(self) -> frozenset[DApplication]:
        return self.final.instantiated

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "rounds": self.rounds,
            "instantiations": self.instantiations,
            "saturated": self.saturated,
            "per_round": [
                {
                    "round": r.round,
                    "verdict": r.verdict,
                    "new_instantiations": r.new_instantiations,
                    "formulas": r.formulas,
                    "new_contracts": r.new_contracts,
                }
                for r in self.records
            ],
            "detail": self.detail,
        }


def unfold(d: Definition, args: tuple) -> Term:
    """``D(args) = body[args/params]``."""
    return d.equation(tuple(args))


def initial_state(task: VerificationTask) -> RoundState:
    neg, consts = skolemize_negated_goal(task.goal, task.taskhash())
    return RoundState(0, (neg,), tuple(consts), {})


def _call_site_applications(state: RoundState, defs: dict[str, Definition], sig: Signature) -> set[DApplication]:
    """The calls made by unfolded applications, with their arguments instantiated."""
    out = set()
    for a in state.unfolded:
        d = defs[a.symbol]
        binding = dict(zip(d.params, a.args))
        for e in call_sites(d):
            call = normalize(_subst(e.subexpression, binding), sig)
            out.add(DApplication(call.op, call.args))
    return out


def step_round(
    state: RoundState,
    task: VerificationTask,
    session: SolverSession,
    contracts: Optional[Mapping[str, Contract]] = None,
) -> tuple[RoundState, SolverVerdict]:
    """Check the current formulas; unless unsat, add the next round of unfoldings.

    In contracts mode the applications are collected from the negated goal
    and the unfoldings only, and every collected application that is a call
    site of an unfolded body also gets its contract instance asserted.
    """
    session.add(state.consts, state.formulas[session_size(session) :])
    verdict = session.check()
    if verdict.outcome == UNSAT or verdict.outcome == PROCESS_ERROR:
        return state, verdict
    defs = def_table(task.defs)
    sources = state.formulas
    if contracts is not None:
        sources = (state.negated_goal,) + tuple(state.unfolded.values())
    apps = collect_d_applications(sources, task.sig)
    # symbols without a definition here stay uninterpreted
    new = [a for a in ordered(apps) if a not in state.unfolded and a.symbol in defs]
    unfolded = dict(state.unfolded)
    added: list[Term] = []
    seen = set(state.formulas)
    for a in new:
        eqn = unfold(defs[a.symbol], a.args)
        unfolded[a] = eqn
        if eqn not in seen:
            seen.add(eqn)
            added.append(eqn)
    contracted = dict(state.contracted)
    if contracts:
        rhs = _call_site_applications(replace(state, unfolded=unfolded), defs, task.sig)
        for a in ordered(apps & rhs):
            c = contracts.get(a.symbol)
            if c is None or a in contracted:
                continue
            inst = c.instance(a.args, defs[a.symbol].call(a.args))
            contracted[a] = inst
            if inst not in seen:
                seen.add(inst)
                added.append(inst)
    nxt = RoundState(state.round + 1, state.formulas + tuple(added), state.consts, unfolded, contracted)
    return nxt, verdict


def session_size(session: SolverSession) -> int:
    return session.asserted


def _emit(task: VerificationTask, state: RoundState) -> None:
    if not task.emit_smt:
        return
    os.makedirs(task.emit_smt, exist_ok=True)
    q = QfQuery(task.sig, state.consts, state.formulas)
    with open(os.path.join(task.emit_smt, f"round_{state.round}.smt2"), "w") as fh:
        fh.write(encode_query(task.sig, q, task.solver))


def run_uqfr(
    task: VerificationTask,
    sink: Optional[TraceSink] = None,
    contracts: Optional[Mapping[str, Contract]] = None,
    state: Optional[RoundState] = None,
) -> EngineResult:
    """Run rounds 0..max_rounds; Valid as soon as a check returns unsat."""
    say = sink or (lambda _line: None)
    state = state or initial_state(task)
    states = [state]
    records: list[RoundRecord] = []
    with SolverSession(task.sig, task.solver) as session:
        while True:
            _emit(task, state)
            nxt, verdict = step_round(state, task, session, contracts)
            n_new = len(nxt.unfolded) - len(state.unfolded)
            n_con = len(nxt.contracted) - len(state.contracted)
            rec = RoundRecord(state.round, verdict.outcome, 0, len(state.formulas))
            if verdict.outcome == PROCESS_ERROR:
                records.append(rec)
                if task.trace != "off":
                    say(f"round {state.round}: solver failure: {verdict.detail}")
                return EngineResult(FAILURE, state.round, len(state.unfolded), records, detail=verdict.detail, states=states)
            if verdict.outcome == UNSAT:
                records.append(rec)
                if task.trace != "off":
                    say(f"round {state.round}: unsat, formulas={len(state.formulas)}")
                return EngineResult(VALID, state.round, len(state.unfolded), records, states=states)
            last = state.round >= task.max_rounds
            saturated = n_new == 0 and n_con == 0 and verdict.outcome == SAT
            if not last and not saturated:
                rec.new_instantiations, rec.new_contracts = n_new, n_con
            records.append(rec)
            if task.trace != "off":
                say(
                    f"round {state.round}: {verdict.outcome}, new instantiations={rec.new_instantiations}, "
                    f"formulas={len(state.formulas)}"
                )
            if last or saturated:
                hint = session.model() if verdict.outcome == SAT else None
                if hint and task.trace == "full":
                    say("model hint:\n" + hint)
                detail = "saturated: no new D-applications" if saturated else f"round budget {task.max_rounds} exhausted"
                return EngineResult(
                    BUDGET_EXHAUSTED, state.round, len(state.unfolded), records, saturated, hint, detail, states
                )
            if task.trace == "full":
                for f in nxt.formulas[len(state.formulas) :]:
                    say(f"  + {show(f)}")
            state = nxt
            states.append(state)
