"""Terms and Horn clauses over a first-order signature, together with the
substitution machinery and the atom ordering that saturation relies on."""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional, Union


class SignatureError(ValueError):
    """Inconsistent arity or a name used both as function and predicate."""


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Fn:
    """Application of a function symbol; constants have no arguments."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(map(str, self.args))})"


Term = Union[Var, Fn]


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def name(self) -> str:
        return self.pred

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(map(str, self.args))})"


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"~{self.atom}"


@dataclass(frozen=True)
class Clause:
    """A clause ``antecedent => succedent``.

    Both sides are tuples used as multisets; the order is kept because
    literal selection and rewriting pick the leftmost candidate.
    """

    antecedent: tuple = ()
    succedent: tuple = ()
    label: Optional[str] = field(default=None, compare=False)

    @property
    def is_empty(self) -> bool:
        return not self.antecedent and not self.succedent

    @property
    def is_horn(self) -> bool:
        return len(self.succedent) <= 1

    @property
    def is_goal(self) -> bool:
        return not self.succedent

    @property
    def head(self) -> Optional[Atom]:
        return self.succedent[0] if self.succedent else None

    def literals(self) -> list:
        return [Literal(a, True) for a in self.succedent] + [
            Literal(a, False) for a in self.antecedent
        ]

    def atoms(self) -> tuple:
        return self.antecedent + self.succedent

    def __len__(self) -> int:
        return len(self.antecedent) + len(self.succedent)

    def __str__(self) -> str:
        if self.is_empty:
            return "false"
        return " | ".join(map(str, self.literals()))

    def implication(self) -> str:
        lhs = ", ".join(map(str, self.antecedent))
        rhs = ", ".join(map(str, self.succedent))
        return f"{lhs} -> {rhs}".strip()


def clause(antecedent: Iterable[Atom] = (), succedent: Iterable[Atom] = (), label=None) -> Clause:
    return Clause(tuple(antecedent), tuple(succedent), label)


# ---------------------------------------------------------------------------
# Signatures


class Signature:
    """Function and predicate symbols with arities, in declaration order.

    Declaration order doubles as the symbol precedence of the atom ordering:
    a symbol declared later is greater.
    """

    def __init__(self, functions: Mapping[str, int] = (), predicates: Mapping[str, int] = ()):
        self.functions: dict[str, int] = {}
        self.predicates: dict[str, int] = {}
        self._order: list[str] = []
        for name, arity in dict(functions).items():
            self.add_function(name, arity)
        for name, arity in dict(predicates).items():
            self.add_predicate(name, arity)

    def add_function(self, name: str, arity: int) -> None:
        if name in self.predicates:
            raise SignatureError(f"{name} is already a predicate")
        known = self.functions.get(name)
        if known is None:
            self.functions[name] = arity
            self._order.append(name)
        elif known != arity:
            raise SignatureError(f"function {name} used with arity {arity} and {known}")

    def add_predicate(self, name: str, arity: int) -> None:
        if name in self.functions:
            raise SignatureError(f"{name} is already a function")
        known = self.predicates.get(name)
        if known is None:
            self.predicates[name] = arity
            self._order.append(name)
        elif known != arity:
            raise SignatureError(f"predicate {name} used with arity {arity} and {known}")

    def add_term(self, t: Term) -> None:
        if isinstance(t, Fn):
            self.add_function(t.name, len(t.args))
            for a in t.args:
                self.add_term(a)

    def add_atom(self, a: Atom) -> None:
        self.add_predicate(a.pred, len(a.args))
        for t in a.args:
            self.add_term(t)

    def add_clause(self, c: Clause) -> None:
        for a in c.atoms():
            self.add_atom(a)

    @classmethod
    def from_clauses(cls, clauses: Iterable[Clause], base: Optional["Signature"] = None) -> "Signature":
        sig = base.copy() if base is not None else cls()
        for c in clauses:
            sig.add_clause(c)
        return sig

    def copy(self) -> "Signature":
        sig = Signature()
        for name in self._order:
            if name in self.functions:
                sig.add_function(name, self.functions[name])
            else:
                sig.add_predicate(name, self.predicates[name])
        return sig

    @property
    def symbols(self) -> list[str]:
        return list(self._order)

    @property
    def constants(self) -> list[str]:
        return [f for f, n in self.functions.items() if n == 0]

    @property
    def monadic_predicates(self) -> list[str]:
        return [p for p, n in self.predicates.items() if n == 1]

    def precedence(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self._order)}

    def fresh(self, base: str) -> str:
        """A name based on ``base`` that is not yet declared."""
        if base not in self.functions and base not in self.predicates:
            return base
        for i in itertools.count(1):
            name = f"{base}{i}"
            if name not in self.functions and name not in self.predicates:
                return name
        raise AssertionError  # pragma: no cover

    def __contains__(self, name: str) -> bool:
        return name in self.functions or name in self.predicates

    def __repr__(self) -> str:
        return f"Signature(functions={self.functions!r}, predicates={self.predicates!r})"


# ---------------------------------------------------------------------------
# Variables


_fresh_counter = itertools.count()


def fresh_var() -> Var:
    # parsed variables start with an uppercase letter, so these never clash
    return Var(f"_{next(_fresh_counter)}")


def term_vars(t, acc: Optional[list] = None) -> list:
    """Variable occurrences of a term or atom, left to right, with repeats."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        acc.append(t)
    else:
        for a in t.args:
            term_vars(a, acc)
    return acc


def variables(obj) -> set:
    if isinstance(obj, Clause):
        out = set()
        for a in obj.atoms():
            out.update(term_vars(a))
        return out
    if isinstance(obj, Literal):
        return set(term_vars(obj.atom))
    return set(term_vars(obj))


def clause_var_order(c: Clause) -> list:
    seen: dict = {}
    for a in c.succedent + c.antecedent:
        for v in term_vars(a):
            seen.setdefault(v, None)
    return list(seen)


def is_ground(obj) -> bool:
    return not variables(obj)


def is_shallow(t: Term) -> bool:
    if isinstance(t, Var) or not t.args:
        return True
    return all(isinstance(a, Var) for a in t.args)


def is_linear(t) -> bool:
    occ = term_vars(t)
    return len(occ) == len(set(occ))


def depth(t) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def size(t) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def clause_weight(c: Clause) -> int:
    return sum(size(a) for a in c.atoms())


# ---------------------------------------------------------------------------
# Substitutions


def _subst_term(t, m: Mapping):
    if isinstance(t, Var):
        return m.get(t, t)
    if not t.args:
        return t
    return Fn(t.name, tuple(_subst_term(a, m) for a in t.args))


class Substitution(Mapping):
    """Idempotent variable-to-term mapping.

    The constructor resolves chains (``x -> f(y), y -> a`` becomes
    ``x -> f(a), y -> a``) and drops trivial bindings, so applying a
    substitution is a single simultaneous pass.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Mapping = ()):
        raw = {k: v for k, v in dict(bindings).items()}
        resolved: dict = {}

        def resolve(t, stack):
            if isinstance(t, Var):
                if t in resolved:
                    return resolved[t]
                if t in raw and raw[t] != t:
                    if t in stack:
                        raise ValueError(f"cyclic substitution through {t}")
                    stack.add(t)
                    r = resolve(raw[t], stack)
                    stack.discard(t)
                    resolved[t] = r
                    return r
                return t
            if not t.args:
                return t
            return Fn(t.name, tuple(resolve(a, stack) for a in t.args))

        for k in raw:
            resolve(k, set())
        self._map = {k: v for k, v in resolved.items() if v != k}

    @classmethod
    def simultaneous(cls, bindings: Mapping) -> "Substitution":
        """Wrap a matcher as is.  Matchers treat the target's variables as
        constants, so ``x -> y, y -> a`` must not be chased into ``x -> a``."""
        out = cls.__new__(cls)
        out._map = {k: v for k, v in bindings.items() if v != k}
        return out

    def __getitem__(self, v: Var) -> Term:
        return self._map[v]

    def __iter__(self) -> Iterator:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, Substitution):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k} -> {v}" for k, v in self._map.items()) + "}"

    __str__ = __repr__

    def apply(self, obj):
        return apply(self, obj)

    def compose(self, other: "Substitution") -> "Substitution":
        """``self`` then ``other``: ``t.compose`` applied equals other(self(t))."""
        out = {k: _subst_term(v, other._map) for k, v in self._map.items()}
        for k, v in other._map.items():
            out.setdefault(k, v)
        return Substitution(out)


EMPTY = Substitution()


def apply(sigma: Mapping, obj):
    """Apply a substitution to any syntactic object or to a sequence of them."""
    m = sigma._map if isinstance(sigma, Substitution) else sigma
    if not m:
        return obj
    if isinstance(obj, (Var, Fn)):
        return _subst_term(obj, m)
    if isinstance(obj, Atom):
        return Atom(obj.pred, tuple(_subst_term(a, m) for a in obj.args))
    if isinstance(obj, Literal):
        return Literal(apply(m, obj.atom), obj.positive)
    if isinstance(obj, Clause):
        return Clause(
            tuple(apply(m, a) for a in obj.antecedent),
            tuple(apply(m, a) for a in obj.succedent),
            obj.label,
        )
    if isinstance(obj, (list, tuple)):
        return type(obj)(apply(m, x) for x in obj)
    raise TypeError(f"cannot apply a substitution to {type(obj).__name__}")


def _head(t):
    if isinstance(t, Atom):
        return ("p", t.pred, len(t.args))
    return ("f", t.name, len(t.args))


def _walk(t, b: dict):
    while isinstance(t, Var) and t in b:
        t = b[t]
    return t


def _occurs(v: Var, t, b: dict) -> bool:
    stack = [t]
    while stack:
        t = _walk(stack.pop(), b)
        if t == v:
            return True
        if not isinstance(t, Var):
            stack.extend(t.args)
    return False


def unify(s, t, sigma: Optional[Substitution] = None) -> Optional[Substitution]:
    """Most general unifier of two terms or atoms, or None."""
    b = dict(sigma._map) if sigma else {}
    stack = [(s, t)]
    while stack:
        x, y = stack.pop()
        x = _walk(x, b)
        y = _walk(y, b)
        if x is y:
            continue
        if isinstance(x, Var):
            if x == y:
                continue
            if _occurs(x, y, b):
                return None
            b[x] = y
        elif isinstance(y, Var):
            if _occurs(y, x, b):
                return None
            b[y] = x
        else:
            if _head(x) != _head(y):
                return None
            stack.extend(reversed(list(zip(x.args, y.args))))
    return Substitution(b)


def unify_all(pairs: Iterable[tuple]) -> Optional[Substitution]:
    sigma = EMPTY
    for s, t in pairs:
        sigma = unify(apply(sigma, s), apply(sigma, t), sigma)
        if sigma is None:
            return None
    return sigma


def _match_into(p, t, b: dict) -> bool:
    stack = [(p, t)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = b.get(p)
            if bound is None:
                b[p] = t
            elif bound != t:
                return False
        elif isinstance(t, Var) or _head(p) != _head(t):
            return False
        else:
            stack.extend(zip(p.args, t.args))
    return True


def match(pattern, target, sigma: Optional[Mapping] = None) -> Optional[Substitution]:
    """Substitution ``s`` with ``pattern*s == target``, or None.

    Variables of ``target`` are treated as constants.
    """
    b = dict(sigma) if sigma else {}
    if not _match_into(pattern, target, b):
        return None
    return Substitution.simultaneous(b)


def rename(c: Clause) -> Clause:
    """Variant of ``c`` with fresh variables."""
    vs = clause_var_order(c)
    if not vs:
        return c
    return apply({v: fresh_var() for v in vs}, c)


_NICE = ["X", "Y", "Z", "U", "V", "W"]


def normalize(c: Clause) -> Clause:
    """Rename variables to X, Y, Z, ... in order of first occurrence."""
    vs = clause_var_order(c)
    names = {}
    for i, v in enumerate(vs):
        base = _NICE[i % len(_NICE)]
        names[v] = Var(base if i < len(_NICE) else f"{base}{i // len(_NICE)}")
    return apply(names, c)


# ---------------------------------------------------------------------------
# Knuth-Bendix ordering


class Order(Enum):
    LESS = "<"
    GREATER = ">"
    EQUAL = "="
    INCOMPARABLE = "?"


def _rank(prec: Mapping[str, int], name: str) -> tuple:
    return (prec.get(name, len(prec)), name)


def _kbo_stats(t, counts: Counter) -> int:
    if isinstance(t, Var):
        counts[t] += 1
        return 1
    return 1 + sum(_kbo_stats(a, counts) for a in t.args)


def _kbo_gt(s, t, prec: Mapping[str, int]) -> bool:
    if isinstance(s, Var):
        return False
    cs, ct = Counter(), Counter()
    ws = _kbo_stats(s, cs)
    wt = _kbo_stats(t, ct)
    if any(cs[v] < n for v, n in ct.items()):
        return False
    if ws != wt:
        return ws > wt
    if isinstance(t, Var):
        # equal weight and t occurs in s forces s == t
        return False
    hs, ht = _head(s), _head(t)
    if hs != ht:
        if hs[0] != ht[0] or hs[1] == ht[1]:
            return False
        return _rank(prec, hs[1]) > _rank(prec, ht[1])
    for a, b in zip(s.args, t.args):
        if a != b:
            return _kbo_gt(a, b, prec)
    return False


def kbo_compare(s, t, precedence: Optional[Mapping[str, int]] = None) -> Order:
    """Knuth-Bendix comparison with weight 1 for every symbol and variable.

    Atoms are compared with their predicate as top symbol.  For non-ground
    inputs the usual variable condition makes the result sound (``GREATER``
    implies greater under every grounding) but not complete.
    """
    prec = precedence or {}
    if s == t:
        return Order.EQUAL
    if _kbo_gt(s, t, prec):
        return Order.GREATER
    if _kbo_gt(t, s, prec):
        return Order.LESS
    return Order.INCOMPARABLE


# ---------------------------------------------------------------------------
# Shape checks


class Shape(NamedTuple):
    is_horn: bool
    is_mslh: bool
    is_ground: bool
    vars: frozenset


def shape_checks(c: Clause) -> Shape:
    horn = c.is_horn
    monadic = all(len(a.args) == 1 for a in c.atoms())
    heads_ok = all(is_shallow(a.args[0]) and is_linear(a.args[0]) for a in c.succedent if len(a.args) == 1)
    vs = frozenset(variables(c))
    return Shape(horn, horn and monadic and heads_ok, not vs, vs)


def is_mslh(c: Clause) -> bool:
    return shape_checks(c).is_mslh


# ---------------------------------------------------------------------------
# Redundancy: tautologies, subsumption, condensation


def is_tautology(c: Clause) -> bool:
    return any(a in c.antecedent for a in c.succedent)


def dedupe_literals(c: Clause) -> Clause:
    ante = tuple(dict.fromkeys(c.antecedent))
    succ = tuple(dict.fromkeys(c.succedent))
    if len(ante) == len(c.antecedent) and len(succ) == len(c.succedent):
        return c
    return Clause(ante, succ, c.label)


def _subsume_side(src: list, dst: list, used: Optional[list], b: dict, rest) -> bool:
    if not src:
        return rest(b)
    first, others = src[0], src[1:]
    for i, target in enumerate(dst):
        if (used is not None and used[i]) or target.pred != first.pred:
            continue
        trial = dict(b)
        if _match_into(first, target, trial):
            if used is not None:
                used[i] = True
            if _subsume_side(others, dst, used, trial, rest):
                return True
            if used is not None:
                used[i] = False
    return False


def subsumption_matcher(c: Clause, d: Clause, injective: bool = True) -> Optional[Substitution]:
    """``s`` with ``c*s`` a sub-multiset of ``d``, literals mapped injectively.

    With ``injective=False`` several literals of ``c`` may land on the same
    literal of ``d`` (set subsumption, as used by condensation).
    """
    if injective:
        if len(c.antecedent) > len(d.antecedent) or len(c.succedent) > len(d.succedent):
            return None
        for mine, theirs in ((c.antecedent, d.antecedent), (c.succedent, d.succedent)):
            need = Counter(a.pred for a in mine)
            have = Counter(a.pred for a in theirs)
            if any(have[p] < n for p, n in need.items()):
                return None
    found = []

    def used(n):
        return [False] * n if injective else None

    def finish_succ(b):
        found.append(b)
        return True

    def after_ante(b):
        return _subsume_side(list(c.succedent), list(d.succedent), used(len(d.succedent)), b, finish_succ)

    if _subsume_side(list(c.antecedent), list(d.antecedent), used(len(d.antecedent)), {}, after_ante):
        return Substitution.simultaneous(found[0])
    return None


def subsumes(c: Clause, d: Clause) -> bool:
    return subsumption_matcher(c, d) is not None


def condense(c: Clause) -> Clause:
    """Drop literals while the clause still subsumes the result."""
    changed = True
    while changed and len(c) > 1:
        changed = False
        for i in range(len(c.antecedent)):
            smaller = Clause(c.antecedent[:i] + c.antecedent[i + 1:], c.succedent, c.label)
            if subsumption_matcher(c, smaller, injective=False) is not None:
                c, changed = smaller, True
                break
        else:
            for i in range(len(c.succedent)):
                smaller = Clause(c.antecedent, c.succedent[:i] + c.succedent[i + 1:], c.label)
                if subsumption_matcher(c, smaller, injective=False) is not None:
                    c, changed = smaller, True
                    break
    return c


def is_variant(c: Clause, d: Clause) -> bool:
    return len(c) == len(d) and subsumes(c, d) and subsumes(d, c)


def equal_modulo_renaming(first: Iterable[Clause], second: Iterable[Clause]) -> bool:
    """Equality of clause sets when variants count as the same clause."""

    def reps(cs):
        out: list = []
        for c in cs:
            if not any(is_variant(c, r) for r in out):
                out.append(c)
        return out

    a, b = reps(first), reps(second)
    if len(a) != len(b):
        return False
    return all(any(is_variant(c, d) for d in b) for c in a)


def rename_symbols(obj, mapping: Mapping[str, str]):
    """Rename function and predicate symbols."""
    if isinstance(obj, Var):
        return obj
    if isinstance(obj, Fn):
        return Fn(mapping.get(obj.name, obj.name), tuple(rename_symbols(a, mapping) for a in obj.args))
    if isinstance(obj, Atom):
        return Atom(mapping.get(obj.pred, obj.pred), tuple(rename_symbols(a, mapping) for a in obj.args))
    if isinstance(obj, Clause):
        return Clause(
            tuple(rename_symbols(a, mapping) for a in obj.antecedent),
            tuple(rename_symbols(a, mapping) for a in obj.succedent),
            obj.label,
        )
    return [rename_symbols(x, mapping) for x in obj]


def equal_modulo_symbols(first: Iterable[Clause], second: Iterable[Clause], fixed: Iterable[str]) -> bool:
    """Like :func:`equal_modulo_renaming`, additionally allowing a bijective
    renaming of the symbols of ``second`` that are not in ``fixed``."""
    first, second = list(first), list(second)
    fixed = set(fixed)
    s1 = Signature.from_clauses(first)
    s2 = Signature.from_clauses(second)

    def free(sig):
        groups: dict = {}
        for name, n in sig.functions.items():
            if name not in fixed:
                groups.setdefault(("f", n), []).append(name)
        for name, n in sig.predicates.items():
            if name not in fixed:
                groups.setdefault(("p", n), []).append(name)
        return groups

    g1, g2 = free(s1), free(s2)
    if {k: len(v) for k, v in g1.items()} != {k: len(v) for k, v in g2.items()}:
        return False
    keys = sorted(g1)
    for choice in itertools.product(*(itertools.permutations(g2[k]) for k in keys)):
        mapping = {}
        for k, perm in zip(keys, choice):
            mapping.update(zip(perm, g1[k]))
        if equal_modulo_renaming(first, rename_symbols(second, mapping)):
            return True
    return False
