"""Reading and printing problem files.

Grammar::

    % comment to end of line
    #split r s          directive: predicates to split into r_rfl / r_irr
    p(X) | ~q(f(X,a)).  clause: literals separated by '|', '~' negates
    false.              the empty clause

Variables start with an uppercase letter, function and predicate symbols
with a lowercase one.  Several clauses may share a line and a clause may
span lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .kernel import Atom, Clause, Fn, Signature, SignatureError, Var, normalize


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class UnsupportedClause(ParseError):
    """A well-formed clause outside the Horn fragment."""


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<directive>\#[^\n]*)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[(),|~.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


@dataclass
class ProblemFile:
    clauses: list = field(default_factory=list)
    splits: list = field(default_factory=list)
    signature: Signature = field(default_factory=Signature)
    path: Optional[str] = None


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", tok.line, tok.column)
        return tok

    def term(self):
        tok = self.next()
        if tok.kind == "var":
            return Var(tok.text)
        if tok.kind != "ident":
            raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return Fn(tok.text, self.arguments())

    def arguments(self) -> tuple:
        if self.peek().text != "(":
            return ()
        self.next()
        args = [self.term()]
        while self.peek().text == ",":
            self.next()
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def atom(self) -> Atom:
        tok = self.next()
        if tok.kind != "ident":
            raise ParseError(f"expected an atom, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return Atom(tok.text, self.arguments())

    def literal(self) -> tuple[bool, Atom]:
        positive = True
        if self.peek().text == "~":
            self.next()
            positive = False
        return positive, self.atom()

    def clause(self) -> tuple[Clause, Token]:
        first = self.peek()
        if first.text == "false" and self.tokens[self.i + 1].text == ".":
            self.next()
            self.next()
            return Clause(), first
        ante, succ = [], []
        while True:
            positive, a = self.literal()
            (succ if positive else ante).append(a)
            tok = self.next()
            if tok.text == ".":
                break
            if tok.text != "|":
                raise ParseError(f"expected '|' or '.', found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return Clause(tuple(ante), tuple(succ)), first


def _directive(tok: Token, problem: ProblemFile) -> None:
    words = tok.text[1:].split()
    if not words:
        raise ParseError("empty directive", tok.line, tok.column)
    if words[0] != "split":
        raise ParseError(f"unknown directive #{words[0]}", tok.line, tok.column)
    for w in words[1:]:
        if not re.fullmatch(r"[a-z][A-Za-z0-9_]*", w):
            raise ParseError(f"bad predicate name {w!r} in #split", tok.line, tok.column)
        if w not in problem.splits:
            problem.splits.append(w)


def parse_text(text: str, allow_non_horn: bool = False, path: Optional[str] = None) -> ProblemFile:
    p = _Parser(text)
    problem = ProblemFile(path=path)
    while p.peek().kind != "eof":
        tok = p.peek()
        if tok.kind == "directive":
            p.next()
            _directive(tok, problem)
            continue
        c, start = p.clause()
        try:
            problem.signature.add_clause(c)
        except SignatureError as e:
            raise ParseError(str(e), start.line, start.column) from None
        if not c.is_horn and not allow_non_horn:
            raise UnsupportedClause("non-Horn clause (more than one positive literal) is not supported", start.line, start.column)
        problem.clauses.append(c)
    for name in problem.splits:
        arity = problem.signature.predicates.get(name)
        if arity is not None and arity != 2:
            raise ParseError(f"#split {name}: predicate has arity {arity}, expected 2")
    return problem


def parse(path) -> ProblemFile:
    path = Path(path)
    return parse_text(path.read_text(), path=str(path))


def parse_clause(text: str, allow_non_horn: bool = True) -> Clause:
    text = text.strip()
    if not text.endswith("."):
        text += "."
    problem = parse_text(text, allow_non_horn=allow_non_horn)
    if len(problem.clauses) != 1:
        raise ParseError(f"expected one clause, got {len(problem.clauses)}")
    return problem.clauses[0]


def parse_clauses(text: str, allow_non_horn: bool = False) -> list[Clause]:
    return parse_text(text, allow_non_horn=allow_non_horn).clauses


def _single(text: str):
    p = _Parser(text.strip().rstrip("."))
    return p


def parse_term(text: str):
    p = _single(text)
    t = p.term()
    if p.peek().kind != "eof":
        tok = p.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return t


def parse_atom(text: str) -> Atom:
    p = _single(text)
    a = p.atom()
    if p.peek().kind != "eof":
        tok = p.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return a


def format_clause(c: Clause) -> str:
    return f"{normalize(c)}."


def format_clauses(clauses) -> str:
    return "".join(format_clause(c) + "\n" for c in clauses)


def format_problem(problem: ProblemFile) -> str:
    lines = []
    if problem.splits:
        lines.append("#split " + " ".join(problem.splits))
    lines.extend(format_clause(c) for c in problem.clauses)
    return "\n".join(lines) + "\n"
