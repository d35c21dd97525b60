"""Finite models of saturated MSLH clause sets.

Ground terms are grouped by their *color*, the set of monadic predicates
they satisfy in the minimal Herbrand model.  In a saturated set every
productive clause has the form ``P1(x1),...,Pn(xn) -> S(f(y1,...,ym))`` with
the ``xi`` among the pairwise distinct ``yj``, so the color of
``f(s1,...,sm)`` depends only on the colors of the ``sj``.  The colors
reachable from the constants form the domain of a finite model.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Optional

from .kernel import Atom, Clause, Fn, Signature, Var, condense, dedupe_literals, is_ground, term_vars
from .treeauto import Rule, TreeAutomaton

Color = frozenset


class ModelError(ValueError):
    pass


def color_name(c: Color) -> str:
    return "{" + ",".join(sorted(c)) + "}"


def _color_key(c: Color) -> tuple:
    return (len(c), sorted(c))


@dataclass(frozen=True)
class ProductionRule:
    """``f(t1,...,tm)`` gets ``predicate`` when each ``tj`` has the
    predicates ``requirements[j]``."""

    function: str
    predicate: str
    requirements: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.requirements)

    def fires(self, colors: tuple) -> bool:
        return all(req <= c for req, c in zip(self.requirements, colors))


def productive_shape(c: Clause) -> bool:
    """``P1(x1),...,Pn(xn) -> S(f(y1,...,ym))``, linear, xi among the yj."""
    if len(c.succedent) != 1 or len(c.succedent[0].args) != 1:
        return False
    t = c.succedent[0].args[0]
    if not isinstance(t, Fn) or not all(isinstance(y, Var) for y in t.args):
        return False
    if len(set(t.args)) != len(t.args):
        return False
    ys = set(t.args)
    return all(len(a.args) == 1 and isinstance(a.args[0], Var) and a.args[0] in ys for a in c.antecedent)


def production_rules(clauses: Iterable[Clause], signature: Optional[Signature] = None) -> list[ProductionRule]:
    """Production rules of the clauses with the productive shape.

    A unit ``-> S(x)`` holds for every term and is expanded over the function
    symbols of ``signature`` (or of the clauses).  Clauses are condensed
    first, so ``S(f(x)) <- P(x), P(z)`` counts as ``S(f(x)) <- P(x)``.
    """
    clauses = list(clauses)
    sig = Signature.from_clauses(clauses, signature)
    rules: list[ProductionRule] = []
    for c in clauses:
        c = condense(dedupe_literals(c))
        if productive_shape(c):
            t = c.succedent[0].args[0]
            req = {y: set() for y in t.args}
            for a in c.antecedent:
                req[a.args[0]].add(a.pred)
            rules.append(ProductionRule(t.name, c.succedent[0].pred, tuple(frozenset(req[y]) for y in t.args)))
        elif not c.antecedent and len(c.succedent) == 1 and len(c.succedent[0].args) == 1:
            if isinstance(c.succedent[0].args[0], Var):
                for f, n in sig.functions.items():
                    rules.append(ProductionRule(f, c.succedent[0].pred, (frozenset(),) * n))
    return list(dict.fromkeys(rules))


def _index(rules: Iterable[ProductionRule]) -> dict:
    by_fn: dict = {}
    for r in rules:
        by_fn.setdefault(r.function, []).append(r)
    return by_fn


def _apply_rules(index: Mapping, f: str, colors: tuple) -> Color:
    return frozenset(r.predicate for r in index.get(f, ()) if r.fires(colors))


@dataclass
class FiniteStructure:
    """Interpretation over colors.

    ``functions`` maps every function symbol (constants included) to a total
    table from argument colors to the result color.
    """

    domain: tuple
    functions: dict
    predicates: dict
    arities: dict
    witnesses: dict = field(default_factory=dict)

    @property
    def constants(self) -> dict:
        return {f: table[()] for f, table in self.functions.items() if self.arities[f] == 0}

    def value(self, t, assignment: Mapping) -> Color:
        if isinstance(t, Var):
            try:
                return assignment[t]
            except KeyError:
                raise ModelError(f"unassigned variable {t}") from None
        table = self.functions.get(t.name)
        if table is None:
            raise ModelError(f"function symbol {t.name} is not interpreted")
        return table[tuple(self.value(a, assignment) for a in t.args)]

    def holds(self, a: Atom, assignment: Mapping) -> bool:
        if len(a.args) != 1:
            raise ModelError(f"only monadic predicates are interpreted, got {a}")
        ext = self.predicates.get(a.pred)
        if ext is None:
            raise ModelError(f"predicate symbol {a.pred} is not interpreted")
        return self.value(a.args[0], assignment) in ext

    def to_dict(self) -> dict:
        names = {c: color_name(c) for c in self.domain}
        return {
            "domain": [names[c] for c in self.domain],
            "witnesses": {names[c]: str(t) for c, t in self.witnesses.items()},
            "predicates": {p: [names[c] for c in self.domain if c in ext] for p, ext in self.predicates.items()},
            "functions": {
                f: [{"args": [names[a] for a in args], "value": names[v]} for args, v in table.items()]
                for f, table in self.functions.items()
            },
        }

    def format(self) -> str:
        names = {c: color_name(c) for c in self.domain}
        width = max((len(n) for n in names.values()), default=2)
        lines = [f"domain ({len(self.domain)} elements)"]
        for c in self.domain:
            w = self.witnesses.get(c)
            lines.append(f"  {names[c]:<{width}}  e.g. {w}" if w is not None else f"  {names[c]}")
        lines.append("predicates")
        for p, ext in self.predicates.items():
            lines.append(f"  {p}: " + " ".join(names[c] for c in self.domain if c in ext))
        lines.append("functions")
        for f, table in self.functions.items():
            if self.arities[f] == 0:
                lines.append(f"  {f} = {names[table[()]]}")
                continue
            lines.append(f"  {f}/{self.arities[f]}:")
            for args, v in table.items():
                lines.append(f"    {f}({','.join(names[a] for a in args)}) = {names[v]}")
        return "\n".join(lines)


def _model_signature(clauses: list, signature: Optional[Signature]) -> Signature:
    sig = Signature.from_clauses(clauses, signature)
    for p, n in sig.predicates.items():
        if n != 1:
            raise ModelError(f"predicate {p} has arity {n}; models are built for monadic clause sets")
    if not sig.constants:
        # the Herbrand universe needs a constant
        sig.add_function(sig.fresh("c0"), 0)
    return sig


def build_finite_model(clauses: Iterable[Clause], signature: Optional[Signature] = None) -> FiniteStructure:
    """Least-fixpoint color computation over a saturated MSLH clause set."""
    clauses = list(clauses)
    if any(c.is_empty for c in clauses):
        raise ModelError("the clause set contains the empty clause")
    sig = _model_signature(clauses, signature)
    index = _index(production_rules(clauses, sig))
    witness: dict = {}
    for const in sig.constants:
        witness.setdefault(_apply_rules(index, const, ()), Fn(const))
    funcs = [(f, n) for f, n in sig.functions.items() if n > 0]
    frontier = set(witness)
    while frontier:
        known = list(witness)
        new: dict = {}
        for f, n in funcs:
            for args in itertools.product(known, repeat=n):
                if frontier.isdisjoint(args):
                    continue
                c = _apply_rules(index, f, args)
                if c not in witness and c not in new:
                    new[c] = Fn(f, tuple(witness[a] for a in args))
        witness.update(new)
        frontier = set(new)
    domain = tuple(sorted(witness, key=_color_key))
    tables: dict = {}
    for f, n in sig.functions.items():
        tables[f] = {args: _apply_rules(index, f, args) for args in itertools.product(domain, repeat=n)}
    preds = {p: frozenset(c for c in domain if p in c) for p in sig.predicates}
    return FiniteStructure(domain, tables, preds, dict(sig.functions), {c: witness[c] for c in domain})


def _assignments(structure: FiniteStructure, vs: list):
    return itertools.product(structure.domain, repeat=len(vs))


def evaluate(structure: FiniteStructure, c: Clause) -> bool:
    """Truth of a clause under every assignment of its variables."""
    vs = sorted({v for a in c.atoms() for v in term_vars(a)}, key=lambda v: v.name)
    for values in _assignments(structure, vs):
        env = dict(zip(vs, values))
        if all(structure.holds(a, env) for a in c.antecedent) and not any(
            structure.holds(a, env) for a in c.succedent
        ):
            return False
    return True


def counterexample(structure: FiniteStructure, c: Clause) -> Optional[dict]:
    vs = sorted({v for a in c.atoms() for v in term_vars(a)}, key=lambda v: v.name)
    for values in _assignments(structure, vs):
        env = dict(zip(vs, values))
        if all(structure.holds(a, env) for a in c.antecedent) and not any(
            structure.holds(a, env) for a in c.succedent
        ):
            return env
    return None


def verify_model(structure: FiniteStructure, clauses: Iterable[Clause]) -> bool:
    return all(evaluate(structure, c) for c in clauses)


def term_color(rules: Iterable[ProductionRule], t) -> Color:
    index = rules if isinstance(rules, dict) else _index(rules)
    if isinstance(t, Var):
        raise ModelError(f"term is not ground: {t}")
    return _apply_rules(index, t.name, tuple(term_color(index, a) for a in t.args))


def ground_membership(clauses: Iterable[Clause], atom: Atom) -> bool:
    """Whether a ground monadic atom holds in the minimal Herbrand model of a
    saturated, satisfiable MSLH clause set."""
    clauses = list(clauses)
    if not is_ground(atom):
        raise ModelError(f"atom is not ground: {atom}")
    if len(atom.args) != 1:
        raise ModelError(f"only monadic atoms have colors: {atom}")
    if any(c.is_empty for c in clauses):
        raise ModelError("the clause set contains the empty clause")
    sig = Signature.from_clauses(clauses)
    sig.add_atom(atom)
    return atom.pred in term_color(_index(production_rules(clauses, sig)), atom.args[0])


class MembershipOracle:
    """Repeated ground membership queries against one saturated set."""

    def __init__(self, clauses: Iterable[Clause], signature: Optional[Signature] = None):
        self.clauses = list(clauses)
        self.signature = Signature.from_clauses(self.clauses, signature)
        self._index = _index(production_rules(self.clauses, self.signature))

    def color(self, t) -> Color:
        for f in _symbols(t):
            if f not in self.signature.functions:
                raise ModelError(f"function symbol {f} does not occur in the clause set")
        return term_color(self._index, t)

    def __call__(self, atom: Atom) -> bool:
        if not is_ground(atom) or len(atom.args) != 1:
            raise ModelError(f"expected a ground monadic atom, got {atom}")
        return atom.pred in self.color(atom.args[0])


def _symbols(t) -> set:
    if isinstance(t, Var):
        return set()
    out = {t.name}
    for a in t.args:
        out |= _symbols(a)
    return out


def herbrand_automaton(clauses: Iterable[Clause], predicate: str, signature: Optional[Signature] = None) -> TreeAutomaton:
    """Tree automaton accepting the ground terms ``t`` with ``predicate(t)``
    in the minimal Herbrand model; its states are the reachable colors."""
    clauses = list(clauses)
    model = build_finite_model(clauses, signature)
    names = {c: color_name(c) for c in model.domain}
    rules = [
        Rule(f, tuple(names[a] for a in args), names[v])
        for f, table in model.functions.items()
        for args, v in table.items()
    ]
    finals = [names[c] for c in model.domain if predicate in c]
    return TreeAutomaton(dict(model.arities), names.values(), rules, finals)
