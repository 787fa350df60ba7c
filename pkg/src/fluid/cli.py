"""Command-line interface: ``fluid MODE FILE... [options]``.

Exit codes: 0 valid (or every obligation accepted), 1 budget exhausted or
unknown, 2 input or FLUID-membership error, 3 solver failure.  With several
files the largest code wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .acyclicity import DEFAULT_OBLIGATION_BUDGET, REJECTED, SOLVER_FAILURE, FluidReport, check_fluid, infer_strata
from .contracts import ContractedTask, reduce_to_fluid, run_uqfr_contracts, simulation_check
from .engine import BUDGET_EXHAUSTED, DEFAULT_MAX_ROUNDS, FAILURE, VALID, EngineResult, VerificationTask, run_uqfr
from .logic import LogicError, show
from .sexpr import ParseError
from .smt import SolverConfig
from .syntax import SourceFile, parse_source, print_source

MODES = ("prove", "prove-contracts", "check-acyclicity", "reduce", "simulate")

EXIT_VALID, EXIT_UNKNOWN, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

_OUTCOME_CODE = {VALID: EXIT_VALID, BUDGET_EXHAUSTED: EXIT_UNKNOWN, FAILURE: EXIT_SOLVER}


@dataclass
class FileResult:
    path: str
    code: int
    lines: list[str] = field(default_factory=list)
    report: dict = field(default_factory=dict)
    trace: list[str] = field(default_factory=list)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fluid", description="Verify universal properties of recursive definitions.")
    p.add_argument("mode", choices=MODES)
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--max-rounds", type=int, default=None, help=f"round budget (default: file header, else {DEFAULT_MAX_ROUNDS})")
    p.add_argument("-k", "--rounds", type=int, default=3, help="rounds for simulate (default 3)")
    p.add_argument("--solver", default=None, help="solver executable (default: $FLUID_SOLVER, else z3)")
    p.add_argument("--solver-arg", action="append", default=None, help="solver argument, repeatable (default: -in)")
    p.add_argument("--timeout", type=int, default=10_000, help="per-check timeout in ms")
    p.add_argument("--logic", default="ALL")
    p.add_argument("--tester-syntax", choices=("standard", "prefix"), default="standard")
    p.add_argument("--no-incremental", action="store_true", help="restart the solver for every check")
    p.add_argument("--trace", nargs="?", const="summary", default="off", choices=("off", "summary", "full"))
    p.add_argument("--emit-smt", metavar="DIR", default=None, help="write DIR/<file>/round_<i>.smt2")
    p.add_argument("--guards", choices=("syntactic", "strict", "smt"), default="syntactic")
    p.add_argument("--obligation-budget", type=int, default=DEFAULT_OBLIGATION_BUDGET)
    p.add_argument("--unsafe-skip-fluid", action="store_true", help="skip the FLUID membership check")
    p.add_argument("--enable-set-encoding", action="store_true", help="accept Set-valued definitions")
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    p.add_argument("--jobs", type=int, default=1, help="files processed in parallel")
    return p


def solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        executable=args.solver,
        args=tuple(args.solver_arg) if args.solver_arg else ("-in",),
        timeout_ms=args.timeout,
        incremental=not args.no_incremental,
        logic=args.logic,
        tester_syntax=args.tester_syntax,
    )


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _fluid_code(rep: FluidReport) -> int:
    statuses = {st.status for _, st in rep.obligations}
    other = (
        not rep.signature.ok
        or not rep.stratification.ok
        or rep.goal_shape
        or (rep.guard_errors and rep.guards)
        or REJECTED in statuses
    )
    if other:
        return EXIT_INPUT
    if SOLVER_FAILURE in statuses:
        return EXIT_SOLVER
    return EXIT_UNKNOWN if not rep.obligations_ok else EXIT_VALID


def obligation_table(rep: FluidReport) -> list[str]:
    rows = [("#", "caller", "callee", "path condition", "tier", "status")]
    for ob, st in rep.obligations:
        status = st.status if st.rounds is None else f"{st.status} ({st.rounds} rounds)"
        rows.append((str(ob.index), ob.caller.name, ob.callee.symbol, show(ob.condition), st.tier or "-", status))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def _engine_lines(name: str, r: EngineResult) -> list[str]:
    head = {VALID: "valid", BUDGET_EXHAUSTED: "budget exhausted", FAILURE: "solver failure"}[r.outcome]
    out = [f"{name}: {head} at round {r.rounds}, {r.instantiations} instantiation(s)"]
    for rec in r.records:
        extra = f", +{rec.new_contracts} contract(s)" if rec.new_contracts else ""
        out.append(f"  round {rec.round}: {rec.verdict}, +{rec.new_instantiations} instantiation(s){extra}")
    if r.detail:
        out.append(f"  {r.detail}")
    return out


def run_file(path: str, mode: str, args: argparse.Namespace) -> FileResult:
    res = FileResult(path, EXIT_VALID, report={"file": path, "mode": mode})
    try:
        with open(path) as fh:
            text = fh.read()
        sf = parse_source(text, path, set_encoding=True if args.enable_set_encoding else None)
    except OSError as e:
        return _input_error(res, f"{path}: {e.strerror or e}")
    except ParseError as e:
        return _input_error(res, f"{path}:{e}")
    except LogicError as e:
        return _input_error(res, f"{path}: {e}")
    for w in sf.warnings:
        res.lines.append(f"{path}: warning: {w}")
    cfg = solver_config(args)
    try:
        return _run_parsed(sf, mode, args, cfg, res)
    except LogicError as e:
        return _input_error(res, f"{path}: {e}")


def _input_error(res: FileResult, msg: str) -> FileResult:
    res.code = EXIT_INPUT
    res.lines.append(f"error: {msg}" if not msg.startswith("error") else msg)
    res.report.update(outcome="input-error", error=msg)
    return res


def _run_parsed(sf: SourceFile, mode: str, args: argparse.Namespace, cfg: SolverConfig, res: FileResult) -> FileResult:
    path = res.path
    defs = sf.defs
    # check-acyclicity ignores --unsafe-skip-fluid: the check is the point
    if args.unsafe_skip_fluid and mode != "check-acyclicity":
        defs, _ = infer_strata(sf.defs, sf.sig)
    else:
        rep = check_fluid(sf.sig, sf.defs, sf.goal, args.guards, args.obligation_budget, cfg, args.jobs)
        defs = rep.defs
        res.report["obligations"] = rep.to_json()
        code = _fluid_code(rep)
        if mode == "check-acyclicity":
            res.lines += obligation_table(rep)
            res.lines += [f"{path}: {p}" for p in rep.problems()]
            res.lines.append(f"{path}: {'accepted' if code == EXIT_VALID else 'not accepted'}")
            res.report["outcome"] = "accepted" if code == EXIT_VALID else "not-accepted"
            res.code = code
            return res
        if code != EXIT_VALID:
            res.lines += [f"{path}: not in FLUID: {p}" for p in rep.problems()]
            res.report["outcome"] = "not-fluid"
            res.code = code
            return res

    max_rounds = args.max_rounds
    if max_rounds is None:
        max_rounds = int(sf.headers.get("max-rounds", DEFAULT_MAX_ROUNDS))
    emit = os.path.join(args.emit_smt, _stem(path)) if args.emit_smt else None
    task = VerificationTask(sf.sig, tuple(defs), sf.goal, cfg, max_rounds, args.trace, emit, _stem(path))
    sink = res.trace.append

    if mode == "prove":
        r = run_uqfr(task, sink)
        return _finish(res, r)
    ctask = ContractedTask(task, sf.contracts)
    if mode == "prove-contracts":
        r = run_uqfr_contracts(ctask, sink)
        return _finish(res, r)
    if mode == "reduce":
        red = reduce_to_fluid(ctask)
        out = SourceFile(red.task.sig, list(red.task.defs), red.task.goal, [], {}, [], path)
        res.lines += print_source(out).rstrip("\n").splitlines()
        rep = check_fluid(red.task.sig, red.task.defs, red.task.goal, args.guards, args.obligation_budget, cfg)
        res.report["obligations"] = rep.to_json()
        res.report["reduction"] = print_source(out)
        res.code = _fluid_code(rep)
        res.report["outcome"] = "reduced" if res.code == EXIT_VALID else "reduction-not-fluid"
        res.lines += [f"; not in FLUID: {p}" for p in rep.problems()]
        return res
    # simulate
    sim = simulation_check(ctask, args.rounds)
    res.lines.append(f"{path}: contracts run {sim.direct.outcome}, reduction {sim.reduction.outcome}")
    res.lines.append("round  direct  reduction  missing  extra  unfold-missing")
    for row in sim.rows:
        res.lines.append(
            f"{row.round:>5}  {row.direct_contracts:>6}  {row.reduction_contracts:>9}  {len(row.missing):>7}  "
            f"{len(row.extra):>5}  {len(row.unfold_missing):>14}"
        )
        for a in row.missing:
            res.lines.append(f"       missing {a}")
        for a in row.extra:
            res.lines.append(f"       extra {a}")
    res.lines.append(f"{path}: {'simulation agrees' if sim.ok else 'simulation differs'}")
    res.report.update(outcome="agree" if sim.ok else "differ", simulation=sim.to_json())
    if FAILURE in (sim.direct.outcome, sim.reduction.outcome):
        res.code = EXIT_SOLVER
    else:
        res.code = EXIT_VALID if sim.ok else EXIT_UNKNOWN
    return res


def _finish(res: FileResult, r: EngineResult) -> FileResult:
    res.lines = res.lines + res.trace + _engine_lines(res.path, r)
    res.trace = []
    res.report.update(r.to_json())
    res.code = _OUTCOME_CODE[r.outcome]
    return res


def _with_jobs(args: argparse.Namespace, jobs: int) -> argparse.Namespace:
    ns = argparse.Namespace(**vars(args))
    ns.jobs = jobs
    return ns


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_rounds is not None and args.max_rounds < 0:
        parser.error("--max-rounds must be non-negative")
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        solver_config(args)
    except ValueError as e:
        parser.error(str(e))
    if args.jobs > 1 and len(args.files) > 1:
        # one file per worker; obligations inside a file run sequentially
        per_file = _with_jobs(args, 1)
        with ThreadPoolExecutor(args.jobs) as ex:
            results = list(ex.map(lambda f: run_file(f, args.mode, per_file), args.files))
    else:
        results = [run_file(f, args.mode, args) for f in args.files]
    for r in results:
        r.report["exit_code"] = r.code
    if args.json:
        payload = results[0].report if len(results) == 1 else [r.report for r in results]
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for r in results:
            for line in r.lines:
                print(line)
    return max(r.code for r in results)


if __name__ == "__main__":
    sys.exit(main())
