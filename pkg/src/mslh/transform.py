"""Preprocessing of Horn clause sets: reflexive relation splitting and the
monadic / shallow / linear approximation, with a ledger of the symbols each
step introduced so that ground queries can be answered over the original
signature."""

from __future__ import annotations

import random
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Optional

from .kernel import (
    Atom,
    Clause,
    Fn,
    Signature,
    Var,
    apply,
    dedupe_literals,
    fresh_var,
    is_ground,
    is_tautology,
    subsumes,
    term_vars,
    unify,
)


class TransformError(ValueError):
    pass


@dataclass
class StepRecord:
    kind: str  # split | project | extract | linearize | guard
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


@dataclass
class TransformLedger:
    """Provenance of every symbol introduced by preprocessing."""

    split_map: dict = field(default_factory=dict)  # R -> (R_rfl, R_irr)
    monadic_map: dict = field(default_factory=dict)  # R -> f_R
    monadic_predicate: Optional[str] = None  # the shared T
    guard_map: dict = field(default_factory=dict)  # guard -> extracted subterm
    steps: list = field(default_factory=list)

    LOSSY = frozenset({"extract", "linearize", "guard"})

    @property
    def lossy(self) -> bool:
        """True when some step over-approximated (lost information)."""
        return any(s.kind in self.LOSSY for s in self.steps)

    def introduced(self) -> list[str]:
        names = []
        for rfl, irr in self.split_map.values():
            names += [rfl, irr]
        names += list(self.monadic_map.values())
        if self.monadic_predicate:
            names.append(self.monadic_predicate)
        names += list(self.guard_map)
        return names

    def merge(self, other: "TransformLedger") -> "TransformLedger":
        out = TransformLedger(
            dict(self.split_map),
            dict(self.monadic_map),
            self.monadic_predicate,
            dict(self.guard_map),
            list(self.steps),
        )
        out.split_map.update(other.split_map)
        out.monadic_map.update(other.monadic_map)
        out.monadic_predicate = other.monadic_predicate or out.monadic_predicate
        out.guard_map.update(other.guard_map)
        out.steps.extend(other.steps)
        return out

    def to_dict(self) -> dict:
        return {
            "split": {r: list(v) for r, v in self.split_map.items()},
            "monadic": dict(self.monadic_map),
            "monadic_predicate": self.monadic_predicate,
            "guards": {q: str(t) for q, t in self.guard_map.items()},
            "steps": [s.to_dict() for s in self.steps],
            "lossy": self.lossy,
        }


# ---------------------------------------------------------------------------
# Reflexive relation splitting


def split_names(pred: str) -> tuple[str, str]:
    return f"{pred}_rfl", f"{pred}_irr"


def _check_split_preconditions(clauses: Sequence[Clause], pred: str, names: tuple[str, str]) -> None:
    sig = Signature.from_clauses(clauses)
    arity = sig.predicates.get(pred)
    if arity is not None and arity != 2:
        raise TransformError(f"cannot split {pred}: arity {arity}, expected 2")
    for n in names:
        if n in sig:
            raise TransformError(f"cannot split {pred}: {n} already occurs in the clause set")


def _occurrences(clauses: Sequence[Clause], pred: str) -> list[tuple[int, str, int]]:
    out = []
    for ci, c in enumerate(clauses):
        for side in ("antecedent", "succedent"):
            for li, a in enumerate(getattr(c, side)):
                if a.pred == pred:
                    out.append((ci, side, li))
    return out


def _replace(c: Clause, side: str, li: int, atom: Atom) -> Clause:
    atoms = list(getattr(c, side))
    atoms[li] = atom
    if side == "antecedent":
        return Clause(tuple(atoms), c.succedent, c.label)
    return Clause(c.antecedent, tuple(atoms), c.label)


def _has_diagonal(c: Clause, irr: str) -> bool:
    return any(a.pred == irr and a.args[0] == a.args[1] for a in c.atoms())


def rrs_step(
    clauses: Sequence[Clause],
    pred: str,
    names: Optional[tuple[str, str]] = None,
    choose: Optional[Callable[[list], int]] = None,
    check: bool = True,
) -> Optional[list[Clause]]:
    """One rewrite step of reflexive relation splitting, or None in normal form.

    Delete has priority: a clause with an atom ``R_irr(s,s)`` is removed
    before any other rule fires.  ``choose`` picks which candidate to rewrite
    (default: the leftmost occurrence of the leftmost clause).
    """
    rfl, irr = names or split_names(pred)
    if check:
        _check_split_preconditions(clauses, pred, (rfl, irr))
    clauses = list(clauses)
    dead = [i for i, c in enumerate(clauses) if _has_diagonal(c, irr)]
    if dead:
        i = dead[choose(dead) if choose else 0]
        return clauses[:i] + clauses[i + 1:]
    occ = _occurrences(clauses, pred)
    if not occ:
        return None
    ci, side, li = occ[choose(occ) if choose else 0]
    c = clauses[ci]
    a = getattr(c, side)[li]
    s, t = a.args
    sigma = unify(s, t)
    irr_clause = _replace(c, side, li, Atom(irr, a.args))
    if sigma is None:
        replacement = [irr_clause]
    else:
        inst = apply(sigma, c)
        rfl_clause = _replace(inst, side, li, Atom(rfl, apply(sigma, a).args))
        replacement = [irr_clause, rfl_clause]
    return clauses[:ci] + replacement + clauses[ci + 1:]


@dataclass
class RRSStats:
    steps: int
    bound: int
    input_clauses: int
    output_clauses: int


def rrs_step_bound(clauses: Sequence[Clause], preds: Iterable[str]) -> int:
    """Upper bound on rewrite steps: a clause with k occurrences spawns at
    most 2**k - 1 rewrites and 2**k deletions."""
    preds = set(preds)
    total = 0
    for c in clauses:
        k = sum(1 for a in c.atoms() if a.pred in preds)
        total += 2 ** (k + 1)
    return total


def rrs(
    clauses: Sequence[Clause],
    predicates: Iterable[str],
    rng: Optional[random.Random] = None,
) -> tuple[list[Clause], TransformLedger, RRSStats]:
    """Exhaustive reflexive relation splitting for each listed predicate.

    With ``rng`` the rewrite candidates are picked at random, which must not
    change the result up to variable renaming.
    """
    preds = list(dict.fromkeys(predicates))
    current = list(clauses)
    ledger = TransformLedger()
    for pred in preds:
        names = split_names(pred)
        _check_split_preconditions(current, pred, names)
        ledger.split_map[pred] = names
        ledger.steps.append(StepRecord("split", f"{pred} -> {names[0]}, {names[1]}"))
    bound = rrs_step_bound(current, preds)
    choose = (lambda cands: rng.randrange(len(cands))) if rng else None
    steps = 0
    n_in = len(current)
    while True:
        if rng is not None:
            order = list(preds)
            rng.shuffle(order)
        else:
            order = preds
        for pred in order:
            nxt = rrs_step(current, pred, ledger.split_map[pred], choose, check=False)
            if nxt is not None:
                current = nxt
                steps += 1
                break
        else:
            break
        if steps > bound:
            raise AssertionError(f"reflexive relation splitting exceeded its step bound {bound}")
    return current, ledger, RRSStats(steps, bound, n_in, len(current))


def detect_reflexive(clauses: Iterable[Clause]) -> list[str]:
    """Binary predicates with a unit clause ``R(x,x)``."""
    found = []
    for c in clauses:
        if not c.antecedent and len(c.succedent) == 1:
            a = c.succedent[0]
            if len(a.args) == 2 and isinstance(a.args[0], Var) and a.args[0] == a.args[1]:
                found.append(a.pred)
    return list(dict.fromkeys(found))


def redundancy_cleanup(clauses: Iterable[Clause]) -> list[Clause]:
    """Deduplicate literals, then drop tautologies and subsumed clauses."""
    kept: list[Clause] = []
    for c in clauses:
        c = dedupe_literals(c)
        if not is_tautology(c):
            kept.append(c)
    out = []
    for i, c in enumerate(kept):
        # among mutually subsuming clauses the earliest survives
        if any(
            subsumes(d, c) and (j < i or not subsumes(c, d))
            for j, d in enumerate(kept)
            if j != i
        ):
            continue
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# Monadic / shallow / linear approximation


class _Fresh:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.guards = 0

    def function(self, base: str, arity: int) -> str:
        name = self.sig.fresh(base)
        self.sig.add_function(name, arity)
        return name

    def predicate(self, base: str, arity: int) -> str:
        name = self.sig.fresh(base)
        self.sig.add_predicate(name, arity)
        return name

    def guard(self) -> str:
        while True:
            self.guards += 1
            name = f"q{self.guards}"
            if name not in self.sig:
                self.sig.add_predicate(name, 1)
                return name


def _project(c: Clause, ledger: TransformLedger, fresh: _Fresh, arities: dict) -> Clause:
    def proj(a: Atom) -> Atom:
        if len(a.args) == 1:
            return a
        fname = ledger.monadic_map.get(a.pred)
        if fname is None:
            fname = fresh.function(f"f_{a.pred}", arities[a.pred])
            ledger.monadic_map[a.pred] = fname
            if ledger.monadic_predicate is None:
                ledger.monadic_predicate = fresh.predicate("t", 1)
            ledger.steps.append(StepRecord("project", f"{a.pred}/{arities[a.pred]} -> {ledger.monadic_predicate}({fname}(...))"))
        return Atom(ledger.monadic_predicate, (Fn(fname, a.args),))

    return Clause(tuple(map(proj, c.antecedent)), tuple(map(proj, c.succedent)), c.label)


def _replace_arg(t: Fn, i: int, new) -> Fn:
    args = list(t.args)
    args[i] = new
    return Fn(t.name, tuple(args))


def _extract_succedent(c: Clause, fresh: _Fresh, ledger: TransformLedger) -> Optional[list[Clause]]:
    if len(c.succedent) != 1:
        return None
    head = c.succedent[0]
    t = head.args[0]
    if isinstance(t, Var):
        return None
    for i, s in enumerate(t.args):
        if isinstance(s, Fn):
            q = fresh.guard()
            z = fresh_var()
            ledger.guard_map[q] = s
            ledger.steps.append(StepRecord("extract", f"{q}({s}) from {head}"))
            define = Clause(c.antecedent, (Atom(q, (s,)),), c.label)
            use = Clause(c.antecedent + (Atom(q, (z,)),), (Atom(head.pred, (_replace_arg(t, i, z),)),), c.label)
            return [define, use]
    return None


def _linearize(c: Clause, ledger: TransformLedger) -> Optional[list[Clause]]:
    if len(c.succedent) != 1:
        return None
    head = c.succedent[0]
    t = head.args[0]
    if isinstance(t, Var):
        return None
    occ = term_vars(t)
    for x in dict.fromkeys(occ):
        k = occ.count(x)
        if k < 2:
            continue
        copies = [fresh_var() for _ in range(k - 1)]
        args, seen = [], 0
        for a in t.args:
            if a == x:
                seen += 1
                args.append(x if seen == 1 else copies[seen - 2])
            else:
                args.append(a)
        extra = []
        related = [a for a in c.antecedent if x in term_vars(a)]
        for xi in copies:
            extra.extend(apply({x: xi}, a) for a in related)
        ledger.steps.append(StepRecord("linearize", f"{k - 1} extra copies of {x} in {head}"))
        return [Clause(c.antecedent + tuple(extra), (Atom(head.pred, (Fn(t.name, tuple(args)),)),), c.label)]
    return None


def _extract_antecedent(c: Clause, fresh: _Fresh, ledger: TransformLedger) -> Optional[list[Clause]]:
    projected = set(ledger.monadic_map.values())
    for ai, a in enumerate(c.antecedent):
        t = a.args[0] if len(a.args) == 1 else None
        if not isinstance(t, Fn) or t.name not in projected:
            continue
        direct = {s for s in t.args if isinstance(s, Var)}
        for i, s in enumerate(t.args):
            if isinstance(s, Fn) and direct & set(term_vars(s)):
                q = fresh.guard()
                z = fresh_var()
                ledger.guard_map[q] = s
                ledger.steps.append(StepRecord("guard", f"{q}({s}) from {a}"))
                rest = c.antecedent[:ai] + c.antecedent[ai + 1:]
                define = Clause(rest, (Atom(q, (s,)),), c.label)
                ante = list(c.antecedent)
                ante[ai] = Atom(a.pred, (_replace_arg(t, i, z),))
                use = Clause((Atom(q, (z,)),) + tuple(ante), c.succedent, c.label)
                return [define, use]
    return None


def approximate(
    clauses: Sequence[Clause],
    signature: Optional[Signature] = None,
    ledger: Optional[TransformLedger] = None,
) -> tuple[list[Clause], TransformLedger]:
    """Over-approximate a Horn clause set by an MSLH clause set.

    Any model of the result induces a model of the input, so saturation of
    the result without refutation shows the input satisfiable.
    """
    for c in clauses:
        if not c.is_horn:
            raise TransformError(f"approximation needs Horn clauses: {c}")
    sig = Signature.from_clauses(clauses, signature)
    ledger = ledger if ledger is not None else TransformLedger()
    fresh = _Fresh(sig)
    arities = dict(sig.predicates)
    out: list[Clause] = []
    for c in clauses:
        todo = [_project(c, ledger, fresh, arities)]
        while todo:
            d = todo.pop(0)
            parts = (
                _extract_antecedent(d, fresh, ledger)
                or _extract_succedent(d, fresh, ledger)
                or _linearize(d, ledger)
            )
            if parts is None:
                out.append(d)
            else:
                todo[0:0] = parts
    return out, ledger


# ---------------------------------------------------------------------------
# Back-translation


def translate_query(ledger: TransformLedger, atom: Atom) -> Atom:
    """The ground atom over the transformed signature that decides ``atom``."""
    if not is_ground(atom):
        raise TransformError(f"query must be ground: {atom}")
    pred = atom.pred
    if pred in ledger.split_map:
        rfl, irr = ledger.split_map[pred]
        s, t = atom.args
        pred = rfl if s == t else irr
    if pred in ledger.monadic_map:
        return Atom(ledger.monadic_predicate, (Fn(ledger.monadic_map[pred], atom.args),))
    return Atom(pred, atom.args)


def back_translate_query(ledger: TransformLedger, atom: Atom, oracle: Callable[[Atom], bool]) -> bool:
    """Truth of a ground atom over the original signature in the model
    induced by ``oracle`` (membership over the transformed signature).

    A split relation is read back as the off-diagonal part of ``R_irr``
    joined with the diagonal of ``R_rfl``.
    """
    return oracle(translate_query(ledger, atom))


__all__ = [
    "StepRecord",
    "TransformError",
    "TransformLedger",
    "approximate",
    "back_translate_query",
    "detect_reflexive",
    "redundancy_cleanup",
    "rrs",
    "rrs_step",
    "rrs_step_bound",
    "split_names",
    "translate_query",
]
