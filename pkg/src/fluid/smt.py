"""SMT-LIB 2.6 encoding and an incremental external-solver session."""

from __future__ import annotations

import os
import queue
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from .logic import (
    BUILTIN,
    CONSTRUCTOR,
    RECOGNIZER,
    App,
    BoolLit,
    Const,
    IntLit,
    Ite,
    LogicError,
    Quant,
    Signature,
    Term,
    Var,
)

SAT, UNSAT, UNKNOWN, TIMEOUT, PROCESS_ERROR = "sat", "unsat", "unknown", "timeout", "process-error"

_SYNC = "fluid-sync"


@dataclass(frozen=True)
class SolverConfig:
    executable: Optional[str] = None
    args: tuple[str, ...] = ("-in",)
    timeout_ms: int = 10_000
    incremental: bool = True
    logic: str = "ALL"
    tester_syntax: str = "standard"  # "standard": ((_ is C) t); "prefix": (is-C t)

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.tester_syntax not in ("standard", "prefix"):
            raise ValueError(f"unknown tester syntax {self.tester_syntax!r}")

    @property
    def command(self) -> list[str]:
        exe = self.executable or os.environ.get("FLUID_SOLVER") or "z3"
        return [exe, *self.args]


@dataclass(frozen=True)
class QfQuery:
    sig: Signature
    consts: tuple[Const, ...]
    assertions: tuple[Term, ...]


@dataclass
class SolverVerdict:
    outcome: str
    transcript: str = ""
    wall_time: float = 0.0
    detail: str = ""


class EncodingError(LogicError):
    pass


# ---------------------------------------------------------------------------
# Encoding


def smt_term(t: Term, tester: str = "standard") -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, IntLit):
        return str(t.value) if t.value >= 0 else f"(- {-t.value})"
    if isinstance(t, BoolLit):
        return "true" if t.value else "false"
    if isinstance(t, Ite):
        return f"(ite {smt_term(t.cond, tester)} {smt_term(t.then, tester)} {smt_term(t.orelse, tester)})"
    if isinstance(t, Quant):
        raise EncodingError("quantified formulas are never sent to the solver")
    if isinstance(t, App):
        args = [smt_term(a, tester) for a in t.args]
        if t.kind == RECOGNIZER:
            ctor = t.op[3:] if t.op.startswith("is-") else t.op
            head = f"(_ is {ctor})" if tester == "standard" else f"is-{ctor}"
            return f"({head} {args[0]})"
        if not args:
            return t.op
        return "(" + " ".join([t.op] + args) + ")"
    raise EncodingError(f"cannot encode {t!r}")


def _check_sorts(sig: Signature) -> None:
    known = {"Int", "Bool"} | {a.sort for a in sig.adts}
    for s in sig.symbols():
        for x in s.arg_sorts + (s.result_sort,):
            if x not in known:
                raise EncodingError(f"unsupported background sort {x!r}")


def preamble(sig: Signature, cfg: SolverConfig = SolverConfig()) -> list[str]:
    """Options, logic, datatypes and function declarations."""
    _check_sorts(sig)
    out = ["(set-option :produce-models true)", f"(set-logic {cfg.logic})"]
    if sig.adts:
        heads = " ".join(f"({a.sort} 0)" for a in sig.adts)
        bodies = []
        for a in sig.adts:
            cs = []
            for c in a.constructors:
                cs.append("(" + " ".join([c.name] + [f"({d} {s})" for d, s in c.fields]) + ")")
            bodies.append("(" + " ".join(cs) + ")")
        out.append(f"(declare-datatypes ({heads}) ({' '.join(bodies)}))")
    for f in list(sig.functions) + list(sig.defined):
        out.append(f"(declare-fun {f.name} ({' '.join(f.arg_sorts)}) {f.result_sort})")
    return out


def declare_const(c: Const) -> str:
    return f"(declare-fun {c.name} () {c.sort})"


def assert_cmd(f: Term, cfg: SolverConfig = SolverConfig()) -> str:
    return f"(assert {smt_term(f, cfg.tester_syntax)})"


def encode_query(sig: Signature, query: QfQuery, cfg: SolverConfig = SolverConfig()) -> str:
    """The full script for ``query``; byte-identical for identical input."""
    lines = preamble(sig, cfg)
    lines += [declare_const(c) for c in query.consts]
    lines += [assert_cmd(f, cfg) for f in query.assertions]
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Sessions


class SolverSession:
    """One solver process fed monotonically growing assertions.

    Only the declarations and assertions not yet sent are written before
    each ``(check-sat)``; no push/pop is ever issued.  On timeout the
    process is killed and the session restarts lazily, replaying everything
    sent so far.
    """

    def __init__(self, sig: Signature, cfg: SolverConfig = SolverConfig()) -> None:
        self.sig, self.cfg = sig, cfg
        self._proc: Optional[subprocess.Popen] = None
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        self._consts: list[Const] = []
        self._asserts: list[Term] = []
        self._sent_consts = 0
        self._sent_asserts = 0
        self.transcript: list[str] = []
        self.last: Optional[SolverVerdict] = None

    # -- process handling

    def _start(self) -> None:
        self._proc = subprocess.Popen(
            self.cfg.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
            bufsize=1,
        )
        self._lines = queue.Queue()
        threading.Thread(target=self._pump, args=(self._proc, self._lines), daemon=True).start()
        self._sent_consts = self._sent_asserts = 0
        self._write(preamble(self.sig, self.cfg))

    @staticmethod
    def _pump(proc: subprocess.Popen, q: "queue.Queue[Optional[str]]") -> None:
        for line in proc.stdout:
            q.put(line.rstrip("\n"))
        q.put(None)

    def _write(self, cmds: list[str]) -> None:
        self.transcript.extend(cmds)
        self._proc.stdin.write("\n".join(cmds) + "\n")
        self._proc.stdin.flush()

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.kill()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                pass
            for s in (self._proc.stdin, self._proc.stdout):
                try:
                    s.close()
                except OSError:
                    pass
            self._proc = None

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- queries

    @property
    def asserted(self) -> int:
        return len(self._asserts)

    def add(self, consts=(), assertions=()) -> None:
        for c in consts:
            if c not in self._consts:
                self._consts.append(c)
        self._asserts.extend(assertions)

    def _read_until_sync(self, deadline: float) -> tuple[list[str], Optional[str]]:
        got: list[str] = []
        while True:
            left = deadline - time.monotonic()
            if left <= 0:
                return got, TIMEOUT
            try:
                line = self._lines.get(timeout=left)
            except queue.Empty:
                return got, TIMEOUT
            if line is None:
                return got, PROCESS_ERROR
            if line.strip() == _SYNC:
                return got, None
            got.append(line)

    def check(self) -> SolverVerdict:
        t0 = time.monotonic()
        try:
            if not self.cfg.incremental or self._proc is None or self._proc.poll() is not None:
                self.close()
                self._start()
            cmds = [declare_const(c) for c in self._consts[self._sent_consts :]]
            cmds += [assert_cmd(f, self.cfg) for f in self._asserts[self._sent_asserts :]]
            cmds += ["(check-sat)", f'(echo "{_SYNC}")']
            self._sent_consts, self._sent_asserts = len(self._consts), len(self._asserts)
            self._write(cmds)
        except OSError as e:
            self.close()
            v = SolverVerdict(PROCESS_ERROR, detail=f"cannot run solver {self.cfg.command[0]!r}: {e}")
            self.last = v
            return v
        got, problem = self._read_until_sync(t0 + self.cfg.timeout_ms / 1000)
        elapsed = time.monotonic() - t0
        text = "\n".join(got)
        if problem == TIMEOUT:
            self.close()
            v = SolverVerdict(TIMEOUT, text, elapsed, f"no answer within {self.cfg.timeout_ms} ms")
        elif problem == PROCESS_ERROR:
            self.close()
            v = SolverVerdict(PROCESS_ERROR, text, elapsed, "solver exited unexpectedly")
        else:
            answers = [g.strip() for g in got if g.strip()]
            errors = [a for a in answers if a.startswith("(error")]
            if errors:
                v = SolverVerdict(PROCESS_ERROR, text, elapsed, errors[0])
            elif answers and answers[-1] in (SAT, UNSAT, UNKNOWN):
                v = SolverVerdict(answers[-1], text, elapsed)
            else:
                v = SolverVerdict(PROCESS_ERROR, text, elapsed, f"malformed solver output {text!r}")
        self.last = v
        return v

    def model(self) -> Optional[str]:
        if self.last is None or self.last.outcome != SAT or self._proc is None or self._proc.poll() is not None:
            return None
        try:
            self._write(["(get-model)", f'(echo "{_SYNC}")'])
        except OSError:
            return None
        got, problem = self._read_until_sync(time.monotonic() + self.cfg.timeout_ms / 1000)
        if problem is not None:
            self.close()
            return None
        text = "\n".join(got).strip()
        if not text or text.startswith("(error"):
            return None
        return text


def check_sat(cfg: SolverConfig, query: QfQuery, session: Optional[SolverSession] = None) -> SolverVerdict:
    """Check ``query``.  With a session only the delta since its last check is sent."""
    if session is None:
        with SolverSession(query.sig, cfg) as s:
            s.add(query.consts, query.assertions)
            return s.check()
    new = [f for f in query.assertions[session.asserted :]]
    session.add(query.consts, new)
    return session.check()


def get_model_hint(cfg: SolverConfig, session: SolverSession) -> Optional[str]:
    return session.model()
