"""Random clause sets over a binary predicate ``r`` for splitting tests."""

import random

from mslh.kernel import Atom, Clause, Fn, Var


def random_split_set(rng: random.Random) -> list:
    def term():
        return rng.choice([Var("X"), Var("Y"), Var("Z"), Fn("a"), Fn("g", (rng.choice([Var("X"), Var("Y"), Fn("a")]),))])

    def atom():
        if rng.random() < 0.7:
            return Atom("r", (term(), term()))
        return Atom("p", (term(),))

    out = []
    for _ in range(rng.randint(1, 4)):
        ante = tuple(atom() for _ in range(rng.randint(0, 2)))
        succ = (atom(),) if rng.random() < 0.7 or not ante else ()
        out.append(Clause(ante, succ))
    return out
