"""Random ground values for the standard model."""

from __future__ import annotations

import random

from fluid.logic import IntLit, BoolLit

MAX_DEPTH = 6
INT_RANGE = (-20, 20)


def random_term(sig, sort, rng: random.Random, depth: int = MAX_DEPTH):
    if sort == "Int":
        return IntLit(rng.randint(*INT_RANGE))
    if sort == "Bool":
        return BoolLit(rng.random() < 0.5)
    ctors = sig.adt(sort).constructors
    leaves = [c for c in ctors if sort not in c.arg_sorts]
    # bias towards small values so the depth bound rarely bites
    if depth <= 1 or rng.random() < 0.3:
        pool = leaves or ctors
    else:
        pool = ctors
    c = rng.choice(pool)
    return sig.app(c.name, *(random_term(sig, s, rng, depth - 1) for s in c.arg_sorts))
