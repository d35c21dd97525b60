"""Exhaustive small-structure check that approximation only over-approximates.

A structure for the approximated clauses interprets ``t`` and every
``f_r`` only through the composite relation ``{(d,e) | f_r(d,e) in t}``,
and guard predicates occur in Horn clauses only.  So it suffices to range
over the original symbols with ``r`` read as that composite, and for each
structure falsifying the input clause to compute the least guard
interpretation: if the least one falsifies the descendants, every one does.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from mslh.kernel import Atom, Clause, Fn, Var, term_vars
from mslh.transform import approximate

X, Y = Var("X"), Var("Y")


def random_term(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.45:
        return rng.choice([X, Y, X, Y, Fn("a")])
    return Fn("g", (random_term(rng, depth - 1),))


def random_atom(rng: random.Random) -> Atom:
    if rng.random() < 0.35:
        return Atom("p", (random_term(rng, 2),))
    return Atom("r", (random_term(rng, 2), random_term(rng, 2)))


def random_horn_clause(rng: random.Random) -> Clause:
    while True:
        ante = tuple(random_atom(rng) for _ in range(rng.randint(0, 2)))
        succ = (random_atom(rng),) if rng.random() < 0.8 else ()
        if ante or succ:
            return Clause(ante, succ)


class Structures:
    """All structures over ``a/0, g/1, p/1, r/2`` with domain size ``n``."""

    def __init__(self, n: int):
        self.n = n
        a_vals = np.arange(n)
        g_tabs = np.array(list(itertools.product(range(n), repeat=n)), dtype=np.int64).reshape(-1, n)
        p_exts = np.array(list(itertools.product([False, True], repeat=n)), dtype=bool).reshape(-1, n)
        r_exts = np.array(list(itertools.product([False, True], repeat=n * n)), dtype=bool).reshape(-1, n, n)
        idx = np.indices((len(a_vals), len(g_tabs), len(p_exts), len(r_exts))).reshape(4, -1)
        self.a = a_vals[idx[0]]
        self.g = g_tabs[idx[1]]
        self.p = p_exts[idx[2]]
        self.r = r_exts[idx[3]]
        self.size = idx.shape[1]

    def subset(self, mask: np.ndarray) -> "Structures":
        out = object.__new__(Structures)
        out.n = self.n
        out.a, out.g, out.p, out.r = self.a[mask], self.g[mask], self.p[mask], self.r[mask]
        out.size = int(mask.sum())
        return out


def _value(st: Structures, t, env: dict) -> np.ndarray:
    if isinstance(t, Var):
        return np.full(st.size, env[t], dtype=np.int64)
    if t.name == "a":
        return st.a
    if t.name == "g":
        inner = _value(st, t.args[0], env)
        return st.g[np.arange(st.size), inner]
    raise ValueError(f"unexpected function {t.name}")


class _Reader:
    """Truth of atoms over the original or the approximated signature."""

    def __init__(self, st: Structures, ledger=None, guards=None):
        self.st = st
        self.ledger = ledger
        self.guards = guards or {}

    def holds(self, atom: Atom, env: dict) -> np.ndarray:
        st = self.st
        rows = np.arange(st.size)
        if atom.pred == "p":
            return st.p[rows, _value(st, atom.args[0], env)]
        if atom.pred == "r":
            return st.r[rows, _value(st, atom.args[0], env), _value(st, atom.args[1], env)]
        if self.ledger is not None and atom.pred == self.ledger.monadic_predicate:
            inner = atom.args[0]
            assert inner.name == self.ledger.monadic_map["r"]
            return st.r[rows, _value(st, inner.args[0], env), _value(st, inner.args[1], env)]
        return self.guards[atom.pred][rows, _value(st, atom.args[0], env)]


def _envs(c: Clause, n: int):
    vs = list(dict.fromkeys(v for a in c.atoms() for v in term_vars(a)))
    for values in itertools.product(range(n), repeat=len(vs)):
        yield dict(zip(vs, values))


def clause_truth(reader: _Reader, c: Clause) -> np.ndarray:
    ok = np.ones(reader.st.size, dtype=bool)
    for env in _envs(c, reader.st.n):
        body = np.ones(reader.st.size, dtype=bool)
        for a in c.antecedent:
            body &= reader.holds(a, env)
        head = np.zeros(reader.st.size, dtype=bool)
        for a in c.succedent:
            head |= reader.holds(a, env)
        ok &= ~body | head
    return ok


def least_guards(reader: _Reader, clauses: list, guard_names: list) -> None:
    st = reader.st
    for q in guard_names:
        reader.guards[q] = np.zeros((st.size, st.n), dtype=bool)
    rows = np.arange(st.size)
    defining = [c for c in clauses if c.succedent and c.succedent[0].pred in reader.guards]
    changed = True
    while changed:
        changed = False
        for c in defining:
            head = c.succedent[0]
            table = reader.guards[head.pred]
            for env in _envs(c, st.n):
                body = np.ones(st.size, dtype=bool)
                for a in c.antecedent:
                    body &= reader.holds(a, env)
                vals = _value(st, head.args[0], env)
                new = body & ~table[rows, vals]
                if new.any():
                    table[rows[new], vals[new]] = True
                    changed = True


def check_clause(c: Clause, max_domain: int = 3, cache: dict | None = None, approx=approximate) -> tuple[bool, dict]:
    """True when every structure of size <= ``max_domain`` satisfying the
    approximation of ``c`` satisfies ``c`` after back-translation."""
    cache = {} if cache is None else cache
    out, ledger = approx([c])
    info = {"descendants": len(out), "lossy": ledger.lossy, "checked": 0, "falsifying": 0}
    for n in range(1, max_domain + 1):
        if n not in cache:
            cache[n] = Structures(n)
        st = cache[n]
        info["checked"] += st.size
        falsify = ~clause_truth(_Reader(st), c)
        if not falsify.any():
            continue
        bad = st.subset(falsify)
        info["falsifying"] += bad.size
        reader = _Reader(bad, ledger)
        least_guards(reader, out, list(ledger.guard_map))
        models = np.ones(bad.size, dtype=bool)
        for d in out:
            models &= clause_truth(reader, d)
        if models.any():
            return False, info
    return True, info
