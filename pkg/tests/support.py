"""Shared helpers: corpus loading and task assembly."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from fluid.acyclicity import infer_strata
from fluid.contracts import ContractedTask
from fluid.engine import DEFAULT_MAX_ROUNDS, VerificationTask
from fluid.syntax import SourceFile, parse_source

CORPUS = Path(str(resources.files("fluid") / "corpus"))


def corpus_names() -> list[str]:
    return sorted(p.stem for p in CORPUS.glob("*.fluid"))


def corpus_path(name: str) -> Path:
    return CORPUS / f"{name}.fluid"


def load(name: str) -> SourceFile:
    return parse_source(corpus_path(name).read_text(), name)


def by_mode(mode: str) -> list[str]:
    return [n for n in corpus_names() if load(n).headers.get("mode") == mode]


def task(name: str, max_rounds: int | None = None, **kw) -> VerificationTask:
    sf = load(name)
    defs, rep = infer_strata(sf.defs, sf.sig)
    assert rep.ok, rep.violations
    if max_rounds is None:
        max_rounds = int(sf.headers.get("max-rounds", DEFAULT_MAX_ROUNDS))
    return VerificationTask(sf.sig, tuple(defs), sf.goal, max_rounds=max_rounds, name=name, **kw)


def ctask(name: str, max_rounds: int | None = None, **kw) -> ContractedTask:
    return ContractedTask(task(name, max_rounds, **kw), load(name).contracts)
