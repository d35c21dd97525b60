"""Ordered resolution with selection and a given-clause saturation loop.

The loop decides MSLH clause sets.  Definite clauses are saturated first;
the finite model of that saturation then tells whether the goal clauses
can be refuted at all, so satisfiable sets come back with their goals
untouched and unsatisfiable ones go on to derive the empty clause.
"""

from __future__ import annotations

import heapq
import itertools
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional, Union

from .kernel import (
    Atom,
    Clause,
    Order,
    Signature,
    Substitution,
    Var,
    apply,
    clause_weight,
    condense,
    dedupe_literals,
    is_mslh,
    is_tautology,
    kbo_compare,
    rename,
    subsumes,
    term_vars,
    unify,
    variables,
)


class LimitExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Selection


def _monadic_arg(a: Atom):
    return a.args[0] if len(a.args) == 1 else None


def select_index(c: Clause) -> Optional[int]:
    """Index of the selected antecedent atom, or None.

    Atoms with a non-variable argument go first: selecting a variable atom
    while a deeper one waits lets resolution grow terms without bound.
    """
    if not c.antecedent:
        return None
    head_vars = set()
    for a in c.succedent:
        head_vars.update(term_vars(a))
    for i, a in enumerate(c.antecedent):
        if any(not isinstance(t, Var) for t in a.args):
            return i
    for i, a in enumerate(c.antecedent):
        if any(v not in head_vars for v in a.args):
            return i
    # P1(x),...,Pn(x) -> S(x)
    if len(c.succedent) == 1 and isinstance(_monadic_arg(c.succedent[0]), Var):
        x = c.succedent[0].args[0]
        if all(_monadic_arg(a) == x for a in c.antecedent):
            return 0
    return None


def select(c: Clause) -> Optional[Atom]:
    i = select_index(c)
    return None if i is None else c.antecedent[i]


# ---------------------------------------------------------------------------
# Inferences


def _strictly_maximal(a: Atom, others: Iterable[Atom], prec: Mapping) -> bool:
    return all(kbo_compare(a, b, prec) not in (Order.LESS, Order.EQUAL) for b in others)


def _maximal(a: Atom, others: Iterable[Atom], prec: Mapping) -> bool:
    return all(kbo_compare(a, b, prec) is not Order.LESS for b in others)


def _eligible_indices(c: Clause, prec: Mapping) -> list[int]:
    """Antecedent positions that may be resolved upon, before unification."""
    i = select_index(c)
    if i is not None:
        return [i]
    return list(range(len(c.antecedent)))


def _resolve_at(c1: Clause, c2: Clause, i: int, prec: Mapping, selected: bool):
    if len(c1.succedent) != 1 or select_index(c1) is not None:
        return None
    a, b = c1.succedent[0], c2.antecedent[i]
    if a.pred != b.pred:
        return None
    sigma = unify(a, b)
    if sigma is None:
        return None
    a_s = apply(sigma, a)
    if not _strictly_maximal(a_s, apply(sigma, c1.antecedent), prec):
        return None
    if not selected:
        b_s = apply(sigma, b)
        rest = c2.antecedent[:i] + c2.antecedent[i + 1:] + c2.succedent
        if not _maximal(b_s, apply(sigma, rest), prec):
            return None
    ante = c1.antecedent + c2.antecedent[:i] + c2.antecedent[i + 1:]
    return Clause(tuple(apply(sigma, ante)), tuple(apply(sigma, c2.succedent))), sigma


def ordered_resolve(
    c1: Clause,
    c2: Clause,
    index: Optional[int] = None,
    precedence: Optional[Mapping] = None,
) -> Optional[Clause]:
    """Ordered resolvent of the succedent of ``c1`` with an antecedent atom
    of ``c2`` (the one at ``index``, or the first eligible one)."""
    found = resolvents(c1, c2, precedence)
    for conclusion, i, _ in found:
        if index is None or i == index:
            return conclusion
    return None


def resolvents(c1: Clause, c2: Clause, precedence: Optional[Mapping] = None) -> list[tuple]:
    """All ordered resolvents ``(clause, index, mgu)`` with ``c1`` as the
    positive premise.  The clauses must not share variables."""
    prec = precedence or {}
    sel = select_index(c2)
    out = []
    for i in _eligible_indices(c2, prec):
        r = _resolve_at(c1, c2, i, prec, sel is not None)
        if r is not None:
            out.append((r[0], i, r[1]))
    return out


def ordered_factor(c: Clause, precedence: Optional[Mapping] = None) -> Optional[Clause]:
    """Factor two unifiable succedent atoms; never applies to Horn clauses."""
    prec = precedence or {}
    if len(c.succedent) < 2 or select_index(c) is not None:
        return None
    for i, j in itertools.combinations(range(len(c.succedent)), 2):
        sigma = unify(c.succedent[i], c.succedent[j])
        if sigma is None:
            continue
        a_s = apply(sigma, c.succedent[i])
        others = [x for k, x in enumerate(c.succedent) if k not in (i, j)] + list(c.antecedent)
        if _maximal(a_s, apply(sigma, others), prec):
            succ = c.succedent[:j] + c.succedent[j + 1:]
            return Clause(tuple(apply(sigma, c.antecedent)), tuple(apply(sigma, succ)))
    return None


def simplify(c: Clause) -> Clause:
    return condense(dedupe_literals(c))


# ---------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class Limits:
    max_clauses: int = 20000
    max_iterations: int = 20000

    @classmethod
    def from_env(cls, env: Optional[Mapping] = None, base: Optional["Limits"] = None) -> "Limits":
        """Override defaults from ``MSLH_LIMITS=max_clauses=N,max_iterations=M``."""
        env = os.environ if env is None else env
        base = base or cls()
        text = env.get("MSLH_LIMITS", "").strip()
        if not text:
            return base
        values = {"max_clauses": base.max_clauses, "max_iterations": base.max_iterations}
        for item in text.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in values:
                raise ValueError(f"bad MSLH_LIMITS entry {item!r}")
            try:
                values[key] = int(value)
            except ValueError:
                raise ValueError(f"bad MSLH_LIMITS value {value!r}") from None
        return cls(**values)


@dataclass
class Stats:
    iterations: int = 0
    generated: int = 0
    tautologies: int = 0
    forward_subsumed: int = 0
    backward_subsumed: int = 0
    pruned_goals: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class Inference:
    id: int
    clause: Clause
    rule: str  # input | resolution | factor
    parents: tuple = ()
    subst: Optional[Substitution] = None
    index: Optional[int] = None

    def __str__(self) -> str:
        parts = [self.rule] + [str(p) for p in self.parents]
        if self.subst:
            norm = {v: self.subst[v] for v in self.subst}
            parts.append("{" + ", ".join(f"{v}->{t}" for v, t in sorted(norm.items(), key=lambda kv: kv[0].name)) + "}")
        return f"{self.id}. {self.clause} [{', '.join(parts)}]"


@dataclass
class Refutation:
    proof: list
    stats: Stats

    def trace(self) -> str:
        return "".join(f"{step}\n" for step in self.proof)


@dataclass
class Saturated:
    clauses: list
    stats: Stats
    signature: Optional[Signature] = None


@dataclass
class ResourceOut:
    stats: Stats
    reason: str = ""


SaturationResult = Union[Refutation, Saturated, ResourceOut]


def replay(step: Inference, premises: Mapping[int, Inference], precedence: Optional[Mapping] = None) -> bool:
    """Re-derive the conclusion of ``step`` from its recorded premises."""
    if step.rule == "input":
        return True
    if step.rule == "resolution":
        c1 = premises[step.parents[0]].clause
        c2 = rename(premises[step.parents[1]].clause)
        if step.parents[0] == step.parents[1]:
            c1 = rename(c1)
        for conclusion, i, _ in resolvents(c1, c2, precedence):
            if i == step.index:
                c = simplify(conclusion)
                return len(c) == len(step.clause) and subsumes(c, step.clause) and subsumes(step.clause, c)
        return False
    if step.rule == "factor":
        c = ordered_factor(premises[step.parents[0]].clause, precedence)
        return c is not None and subsumes(simplify(c), step.clause)
    return False


# ---------------------------------------------------------------------------
# Given-clause loop


class _Loop:
    def __init__(self, limits: Limits, precedence: Mapping, stats: Stats, model=None):
        self.limits = limits
        self.prec = precedence
        self.stats = stats
        self.model = model
        self.records: dict = {}
        self.ids = itertools.count(1)
        self.active: list = []  # (id, clause)
        self.by_weight: list = []
        self.by_age: list = []
        self.done: set = set()
        self.picks = 0

    def record(self, c: Clause, rule: str, parents=(), subst=None, index=None) -> int:
        i = next(self.ids)
        self.records[i] = Inference(i, c, rule, tuple(parents), subst, index)
        if len(self.records) > self.limits.max_clauses:
            raise LimitExceeded(f"more than {self.limits.max_clauses} clauses")
        return i

    def push(self, i: int) -> None:
        c = self.records[i].clause
        heapq.heappush(self.by_weight, (clause_weight(c), i))
        heapq.heappush(self.by_age, i)

    def pop(self) -> Optional[int]:
        # four picks by weight, then one by age
        self.picks += 1
        heap = self.by_age if self.picks % 5 == 0 else self.by_weight
        for h in (heap, self.by_weight, self.by_age):
            while h:
                item = heapq.heappop(h)
                i = item if isinstance(item, int) else item[1]
                if i not in self.done:
                    self.done.add(i)
                    return i
        return None

    def keep(self, c: Clause) -> bool:
        if is_tautology(c):
            self.stats.tautologies += 1
            return False
        if any(subsumes(d, c) for _, d in self.active):
            self.stats.forward_subsumed += 1
            return False
        if self.model is not None and c.is_goal and not c.is_empty and _true_goal(self.model, c):
            self.stats.pruned_goals += 1
            return False
        return True

    def activate(self, i: int, c: Clause) -> None:
        before = len(self.active)
        self.active = [(j, d) for j, d in self.active if not subsumes(c, d)]
        self.stats.backward_subsumed += before - len(self.active)
        self.active.append((i, c))

    def conclusions(self, i: int, c: Clause):
        fac = ordered_factor(c, self.prec)
        if fac is not None:
            yield fac, "factor", (i,), None, None
        for j, d in list(self.active):
            if j != i:
                pairs = [((i, c), (j, d)), ((j, d), (i, c))]
            else:
                pairs = [((i, c), (i, c))]
            for (pi, p), (ni, n) in pairs:
                # stored clauses are variable-disjoint except a clause and itself
                p_r = rename(p) if pi == ni else p
                keep = variables(p_r) | variables(n)
                for conclusion, idx, sigma in resolvents(p_r, n, self.prec):
                    sigma = Substitution({v: t for v, t in sigma.items() if v in keep})
                    yield conclusion, "resolution", (pi, ni), sigma, idx

    def run(self) -> Optional[int]:
        """Saturate; return the id of the empty clause if it is derived."""
        while True:
            i = self.pop()
            if i is None:
                return None
            self.stats.iterations += 1
            if self.stats.iterations > self.limits.max_iterations:
                raise LimitExceeded(f"more than {self.limits.max_iterations} iterations")
            c = self.records[i].clause
            if c.is_empty:
                return i
            if not self.keep(c):
                continue
            self.activate(i, c)
            for conclusion, rule, parents, sigma, idx in self.conclusions(i, c):
                conclusion = rename(simplify(conclusion))
                self.stats.generated += 1
                if is_tautology(conclusion):
                    self.stats.tautologies += 1
                    continue
                k = self.record(conclusion, rule, parents, sigma, idx)
                if conclusion.is_empty:
                    return k
                self.push(k)

    def proof(self, goal: int) -> list:
        needed, todo = set(), [goal]
        while todo:
            k = todo.pop()
            if k in needed:
                continue
            needed.add(k)
            todo.extend(self.records[k].parents)
        return [self.records[k] for k in sorted(needed)]


def _true_goal(model, c: Clause) -> bool:
    from .modelbuild import evaluate

    if len({v for a in c.antecedent for v in term_vars(a)}) > 4:
        return False
    return evaluate(model, c)


def _prepare(clauses: Sequence[Clause]) -> list:
    out = []
    for c in clauses:
        out.append(rename(simplify(c)))
    return out


def _as_given(loop: "_Loop", originals: dict) -> list:
    # report surviving input clauses as they were written
    return [originals.get(i, c) for i, c in loop.active]


def saturate(
    clauses: Iterable[Clause],
    limits: Optional[Limits] = None,
    signature: Optional[Signature] = None,
) -> SaturationResult:
    """Saturate under ordered resolution with selection.

    For MSLH input the definite clauses are saturated first.  If the finite
    model of that saturation satisfies every goal, the saturated set plus
    the goals is returned; otherwise saturation continues with the goals
    until the empty clause appears.  Other Horn input runs one loop.
    """
    clauses = list(clauses)
    limits = limits or Limits()
    sig = Signature.from_clauses(clauses, signature)
    prec = sig.precedence()
    stats = Stats()
    mslh = all(is_mslh(c) for c in clauses) and all(n == 1 for n in sig.predicates.values())
    try:
        if not mslh:
            return _single(clauses, limits, prec, stats, sig)
        return _two_phase(clauses, limits, prec, stats, sig)
    except LimitExceeded as e:
        return ResourceOut(stats, str(e))


def _single(clauses, limits, prec, stats, sig) -> SaturationResult:
    loop = _Loop(limits, prec, stats)
    originals = {}
    for c, rc in zip(clauses, _prepare(clauses)):
        i = loop.record(rc, "input")
        originals[i] = c
        loop.push(i)
    empty = loop.run()
    if empty is not None:
        return Refutation(loop.proof(empty), stats)
    return Saturated(_as_given(loop, originals), stats, sig)


def _two_phase(clauses, limits, prec, stats, sig) -> SaturationResult:
    from .modelbuild import build_finite_model, evaluate

    loop = _Loop(limits, prec, stats)
    inputs = [(c, loop.record(rc, "input")) for c, rc in zip(clauses, _prepare(clauses))]
    goals = [(c, i) for c, i in inputs if c.is_goal]
    for c, i in inputs:
        if c.is_empty:
            return Refutation([loop.records[i]], stats)
        if not c.is_goal:
            loop.push(i)
    loop.run()
    definite = _as_given(loop, {i: c for c, i in inputs})
    model = build_finite_model(definite, sig)
    violated = [(c, i) for c, i in goals if not evaluate(model, c)]
    if not violated:
        return Saturated(definite + [c for c, _ in goals], stats, sig)
    loop.model = model
    for _, i in violated:
        loop.push(i)
    empty = loop.run()
    if empty is None:
        # cannot happen for a violated goal over a correct saturation
        raise RuntimeError("goal is false in the model but no refutation was found")
    return Refutation(loop.proof(empty), stats)


def format_proof(result: Refutation) -> str:
    return result.trace()
