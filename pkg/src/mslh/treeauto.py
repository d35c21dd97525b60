"""Bottom-up tree automata closed under Boolean operations.

Linear constrained atoms of the three kinds defined below translate into
automata, and every automaton translates into an MSLH clause set.

Predicates at the top of atoms are ordinary ranked operators here, so an
atom ``r(a, g(b))`` is just a tree with root ``r``.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Optional

from .kernel import Atom, Clause, Fn, Signature, Var, apply, is_linear, term_vars


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Rule:
    op: str
    args: tuple
    target: str

    def __str__(self) -> str:
        if not self.args:
            return f"{self.op} -> {self.target}"
        return f"{self.op}({','.join(self.args)}) -> {self.target}"


class TreeAutomaton:
    def __init__(self, ops: Mapping[str, int], states: Iterable[str], rules: Iterable[Rule], finals: Iterable[str]):
        self.ops = dict(ops)
        self.rules = frozenset(rules)
        self.finals = frozenset(finals)
        self.states = frozenset(states) | self.finals | {r.target for r in self.rules} | {
            q for r in self.rules for q in r.args
        }
        for r in self.rules:
            if r.op not in self.ops:
                raise AutomatonError(f"rule {r} uses undeclared operator {r.op}")
            if len(r.args) != self.ops[r.op]:
                raise AutomatonError(f"rule {r} does not match arity {self.ops[r.op]} of {r.op}")
        self._by_op: dict = {}
        self._by_args: dict = {}
        for r in sorted(self.rules):
            self._by_op.setdefault(r.op, []).append(r)
            self._by_args.setdefault((r.op, r.args), []).append(r.target)

    def rules_for(self, op: str) -> list:
        return self._by_op.get(op, [])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreeAutomaton):
            return NotImplemented
        return (self.ops, self.states, self.rules, self.finals) == (other.ops, other.states, other.rules, other.finals)

    def __repr__(self) -> str:
        return f"TreeAutomaton({len(self.states)} states, {len(self.rules)} rules, finals={sorted(self.finals)})"

    def __str__(self) -> str:
        return format_automaton(self)

    def run(self, t) -> frozenset:
        """States reachable at the root of a ground term."""
        if isinstance(t, Var):
            raise AutomatonError(f"term is not ground: {t}")
        name = t.pred if isinstance(t, Atom) else t.name
        if name not in self.ops:
            raise AutomatonError(f"unknown operator {name}")
        if len(t.args) != self.ops[name]:
            raise AutomatonError(f"{name} expects {self.ops[name]} arguments")
        below = [self.run(a) for a in t.args]
        combos = 1
        for s in below:
            combos *= len(s)
        if combos <= len(self.rules_for(name)):
            return frozenset(
                q for args in itertools.product(*below) for q in self._by_args.get((name, args), ())
            )
        return frozenset(r.target for r in self.rules_for(name) if all(q in s for q, s in zip(r.args, below)))

    def reachable(self) -> frozenset:
        seen: set = set()
        changed = True
        while changed:
            changed = False
            for r in self.rules:
                if r.target not in seen and all(q in seen for q in r.args):
                    seen.add(r.target)
                    changed = True
        return frozenset(seen)

    def trim(self) -> "TreeAutomaton":
        """Drop states no ground term reaches."""
        live = self.reachable()
        rules = [r for r in self.rules if r.target in live and all(q in live for q in r.args)]
        return TreeAutomaton(self.ops, live, rules, self.finals & live)


def accepts(a: TreeAutomaton, t) -> bool:
    return not a.run(t).isdisjoint(a.finals)


def is_empty(a: TreeAutomaton) -> bool:
    return a.reachable().isdisjoint(a.finals)


def _require_same_ops(a: TreeAutomaton, b: TreeAutomaton) -> None:
    if a.ops != b.ops:
        raise AutomatonError(f"operator alphabets differ: {sorted(a.ops.items())} vs {sorted(b.ops.items())}")


def intersect(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Product automaton restricted to reachable pairs."""
    _require_same_ops(a, b)

    def pair(p, q):
        return f"<{p}&{q}>"

    seen: set = set()
    rules = set()
    changed = True
    while changed:
        changed = False
        for op in a.ops:
            for ra in a.rules_for(op):
                for rb in b.rules_for(op):
                    args = tuple(pair(p, q) for p, q in zip(ra.args, rb.args))
                    if all(x in seen for x in args):
                        rule = Rule(op, args, pair(ra.target, rb.target))
                        if rule not in rules:
                            rules.add(rule)
                            if rule.target not in seen:
                                seen.add(rule.target)
                                changed = True
    finals = {pair(p, q) for p in a.finals for q in b.finals} & seen
    return TreeAutomaton(a.ops, seen, rules, finals)


def union(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Disjoint union of the two state spaces."""
    _require_same_ops(a, b)

    def tag(i, rule):
        return Rule(rule.op, tuple(f"{i}:{q}" for q in rule.args), f"{i}:{rule.target}")

    rules = [tag(1, r) for r in a.rules] + [tag(2, r) for r in b.rules]
    states = [f"1:{q}" for q in a.states] + [f"2:{q}" for q in b.states]
    finals = [f"1:{q}" for q in a.finals] + [f"2:{q}" for q in b.finals]
    return TreeAutomaton(a.ops, states, rules, finals)


def _subset_name(s: frozenset) -> str:
    return "{" + ";".join(sorted(s)) + "}"


def determinize(a: TreeAutomaton) -> TreeAutomaton:
    """Subset construction; the result is deterministic and complete over the
    reachable subsets, with the empty subset as sink."""
    subsets: dict = {}
    rules = []
    changed = True
    done: set = set()
    while changed:
        changed = False
        known = list(subsets.values())
        for op, n in a.ops.items():
            for combo in itertools.product(known, repeat=n):
                key = (op, tuple(map(_subset_name, combo)))
                if key in done:
                    continue
                done.add(key)
                target = frozenset(
                    r.target for r in a.rules_for(op) if all(q in s for q, s in zip(r.args, combo))
                )
                name = _subset_name(target)
                if name not in subsets:
                    subsets[name] = target
                    changed = True
                rules.append(Rule(op, key[1], name))
    finals = [name for name, s in subsets.items() if not s.isdisjoint(a.finals)]
    return TreeAutomaton(a.ops, subsets, rules, finals)


def complement(a: TreeAutomaton) -> TreeAutomaton:
    """Automaton for all ground terms over ``a.ops`` that ``a`` rejects."""
    d = determinize(a)
    return TreeAutomaton(d.ops, d.states, d.rules, d.states - d.finals)


# ---------------------------------------------------------------------------
# Linear atoms and constrained atoms


def _ops_of(signature: Signature) -> dict:
    ops = dict(signature.functions)
    ops.update(signature.predicates)
    return ops


def _universal_rules(signature: Signature, state: str) -> list:
    return [Rule(f, (state,) * n, state) for f, n in signature.functions.items()]


def _position_automaton(
    atom: Atom,
    signature: Signature,
    hole: Optional[Var] = None,
    hole_states: Iterable[str] = (),
) -> tuple[list, list, str]:
    """Rules for the ground instances of a linear atom.

    State ``q1`` accepts every ground term; each non-variable position gets
    its own state, numbered in post-order from ``q2``.  Variable ``hole``
    is given the states ``hole_states`` instead of ``q1``.
    """
    universal = "q1"
    rules = _universal_rules(signature, universal)
    states = [universal]
    counter = itertools.count(2)
    hole_states = list(hole_states)

    def build(t) -> list:
        if isinstance(t, Var):
            return hole_states if t == hole else [universal]
        name = t.pred if isinstance(t, Atom) else t.name
        arity = signature.predicates[name] if isinstance(t, Atom) else signature.functions.get(name)
        if arity is None:
            raise AutomatonError(f"{name} is not in the signature")
        children = [build(a) for a in t.args]
        q = f"q{next(counter)}"
        states.append(q)
        for combo in itertools.product(*children):
            rules.append(Rule(name, tuple(combo), q))
        return [q]

    top = build(atom)[0]
    return rules, states, top


def _check_linear(atom: Atom) -> None:
    if not is_linear(atom):
        raise AutomatonError(f"atom is not linear: {atom}")


def from_linear_atom(atom: Atom, signature: Signature) -> TreeAutomaton:
    """Automaton whose language is the set of ground instances of ``atom``."""
    _check_linear(atom)
    sig = signature.copy()
    sig.add_atom(atom)
    rules, states, top = _position_automaton(atom, sig)
    return TreeAutomaton(_ops_of(sig), states, rules, [top])


tatoms = from_linear_atom


@dataclass(frozen=True)
class ADC:
    """``atom : x1 != t1, ..., xn != tn``."""

    atom: Atom
    constraints: tuple = ()

    def validate(self) -> None:
        _check_linear(self.atom)
        xs = [x for x, _ in self.constraints]
        atom_vars = set(term_vars(self.atom))
        if len(set(xs)) != len(xs):
            raise AutomatonError("constrained variables must be distinct")
        for x, t in self.constraints:
            if not isinstance(x, Var) or x not in atom_vars:
                raise AutomatonError(f"{x} does not occur in {self.atom}")
            if not is_linear(t):
                raise AutomatonError(f"constraint term {t} is not linear")
            tv = set(term_vars(t))
            if tv & set(xs):
                raise AutomatonError(f"constrained variable occurs in {t}")
            if tv & atom_vars:
                raise AutomatonError(f"variables of {t} occur in {self.atom}")

    def __str__(self) -> str:
        cs = ", ".join(f"{x} != {t}" for x, t in self.constraints)
        return f"({self.atom} : {cs})" if cs else f"({self.atom})"


@dataclass(frozen=True)
class IG:
    """Implicit generalization ``atom / {blockers}``."""

    atom: Atom
    blockers: tuple = ()

    def validate(self) -> None:
        for a in (self.atom,) + tuple(self.blockers):
            _check_linear(a)

    def __str__(self) -> str:
        return f"{self.atom} / {{{', '.join(map(str, self.blockers))}}}"


@dataclass(frozen=True)
class AMC:
    """``atom : x in L(automaton)``."""

    atom: Atom
    var: Var
    automaton: TreeAutomaton

    def validate(self) -> None:
        _check_linear(self.atom)
        if self.var not in term_vars(self.atom):
            raise AutomatonError(f"{self.var} does not occur in {self.atom}")


def adc_to_ig(d: ADC) -> IG:
    d.validate()
    return IG(d.atom, tuple(apply({x: t}, d.atom) for x, t in d.constraints))


def ig_to_ta(g: IG, signature: Signature) -> TreeAutomaton:
    """``tatoms(A) & ~tatoms(B1) & ... & ~tatoms(Bn)``."""
    g.validate()
    sig = signature.copy()
    for a in (g.atom,) + tuple(g.blockers):
        sig.add_atom(a)
    result = from_linear_atom(g.atom, sig)
    for b in g.blockers:
        result = intersect(result, complement(from_linear_atom(b, sig)))
    return result.trim()


def amc_to_ta(m: AMC, signature: Signature) -> TreeAutomaton:
    """``tatoms(A)`` with the state of the constrained variable replaced by
    the accepting states of the constraint automaton."""
    m.validate()
    sig = signature.copy()
    sig.add_atom(m.atom)
    for op, n in m.automaton.ops.items():
        if sig.functions.get(op) != n:
            raise AutomatonError(f"constraint operator {op}/{n} is not a function symbol of the signature")

    def inner(q):
        return f"s:{q}"

    rules, states, top = _position_automaton(m.atom, sig, m.var, [inner(q) for q in sorted(m.automaton.finals)])
    rules += [Rule(r.op, tuple(map(inner, r.args)), inner(r.target)) for r in m.automaton.rules]
    states += [inner(q) for q in m.automaton.states]
    return TreeAutomaton(_ops_of(sig), states, rules, [top])


# ---------------------------------------------------------------------------
# MSLH emission


_PRED_NAME = re.compile(r"[a-z][A-Za-z0-9_]*")


def ta_to_mslh(
    a: TreeAutomaton,
    state_predicates: Optional[Mapping[str, str]] = None,
    op_names: Optional[Mapping[str, str]] = None,
) -> list[Clause]:
    """One clause ``Q_q1(x1),...,Q_qn(xn) -> Q_q(f(x1,...,xn))`` per rule.

    State predicates default to the state name when it is a valid symbol and
    ``q<i>`` otherwise; ``op_names`` renames operators (e.g. an atom's
    predicate ``r`` to a function ``f_r``).
    """
    names = dict(state_predicates or {})
    taken = set(names.values()) | set(a.ops)
    counter = itertools.count(1)
    for q in sorted(a.states):
        if q in names:
            continue
        if _PRED_NAME.fullmatch(q) and q not in taken:
            names[q] = q
        else:
            while True:
                cand = f"q{next(counter)}"
                if cand not in taken and cand not in a.states:
                    break
            names[q] = cand
        taken.add(names[q])
    op_names = op_names or {}
    out = []
    for r in sorted(a.rules):
        xs = tuple(Var(f"X{i + 1}") for i in range(len(r.args)))
        ante = tuple(Atom(names[q], (x,)) for q, x in zip(r.args, xs))
        out.append(Clause(ante, (Atom(names[r.target], (Fn(op_names.get(r.op, r.op), xs),)),)))
    return out


# ---------------------------------------------------------------------------
# Enumeration and text format


def ground_terms(ops: Mapping[str, int], max_depth: int) -> list:
    """All ground terms over ``ops`` of depth at most ``max_depth`` (constants
    have depth 0)."""
    everything = [Fn(f) for f, n in ops.items() if n == 0]
    newest = set(everything)
    for _ in range(max_depth):
        if not newest:
            break
        fresh = []
        for f, n in ops.items():
            if n == 0:
                continue
            # at least one argument from the previous level keeps depths exact
            for combo in itertools.product(everything, repeat=n):
                if not newest.isdisjoint(combo):
                    fresh.append(Fn(f, combo))
        everything.extend(fresh)
        newest = set(fresh)
    return everything


def language(a: TreeAutomaton, max_depth: int) -> set:
    return {t for t in ground_terms(a.ops, max_depth) if accepts(a, t)}


def format_automaton(a: TreeAutomaton) -> str:
    ops = " ".join(f"{op}/{n}" for op, n in sorted(a.ops.items()))
    lines = [f"ops: {ops}", f"states: {' '.join(sorted(a.states))}", f"final: {' '.join(sorted(a.finals))}"]
    lines += [str(r) for r in sorted(a.rules)]
    return "\n".join(lines) + "\n"


_STATE = r"[^\s,()]+"
_RULE = re.compile(rf"^\s*([A-Za-z0-9_]+)\s*(?:\(\s*({_STATE}(?:\s*,\s*{_STATE})*)\s*\))?\s*->\s*({_STATE})\s*$")


def parse_automaton(text: str) -> TreeAutomaton:
    ops: dict = {}
    states: list = []
    finals: list = []
    rules = []
    seen_ops = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("ops:"):
            seen_ops = True
            for item in line[4:].split():
                name, _, n = item.rpartition("/")
                if not name or not n.isdigit():
                    raise AutomatonError(f"line {lineno}: bad operator {item!r}")
                ops[name] = int(n)
        elif line.startswith("states:"):
            states += line[7:].split()
        elif line.startswith("final:"):
            finals += line[6:].split()
        else:
            m = _RULE.match(line)
            if m is None:
                raise AutomatonError(f"line {lineno}: cannot parse rule {line!r}")
            args = tuple(s.strip() for s in m.group(2).split(",")) if m.group(2) else ()
            rules.append(Rule(m.group(1), args, m.group(3)))
    if not seen_ops:
        raise AutomatonError("missing 'ops:' header")
    return TreeAutomaton(ops, states, rules, finals)


def iter_rules(a: TreeAutomaton) -> Iterator[Rule]:
    return iter(sorted(a.rules))
