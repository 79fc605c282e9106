"""Recursive-descent parser for the surface syntax.

Clauses::

    forall {N,K}: c(N,K,0) :- N < K.
    p & q :- r.              % clause conjunction
    ?- c(4,2,Z).             % query directive

Goals: ``,`` chains into one n-ary conjunction, ``;`` into one n-ary
disjunction (``,`` binds tighter), parentheses keep a subchain nested.
Quantifier bodies extend as far to the right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    COMPARISON_OPS, And, Atom, BuiltinCmp, Clause, DAnd, DAtom, Exists, Forall,
    GAtom, Goal, Implies, Or, Program, QuantKind, free_vars,
)
from .terms import SESSION, Compound, FreshSource, Int, Term, Var

__all__ = ["ParseError", "parse_program", "parse_goal", "parse_clause", "parse_term"]

KEYWORDS = frozenset({"forall", "exists"})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[^\W\d]\w*)
  | (?P<punct>:-|\?-|=:=|=\\=|=<|>=|[<>()\[\]{},;:.&+\-*])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        super().__init__(str(self))

    def __str__(self):
        text = f"line {self.line}, column {self.column}: {self.message}"
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        return text


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # 'int', 'var', 'atom', 'kw', 'punct', 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "name":
            if tok in KEYWORDS:
                kind = "kw"
            elif tok[0] == "_" or tok[0].isupper():
                kind = "var"
            else:
                kind = "atom"
            tokens.append(Token(kind, tok, line, col))
        elif kind in ("int", "punct"):
            tokens.append(Token(kind, tok, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, text: str, fresh: FreshSource = SESSION):
        self.tokens = tokenize(text)
        self.pos = 0
        self.fresh = fresh
        # innermost scope last; each maps a variable name to its Var
        self.scopes: list[dict[str, Var]] = [{}]

    # -- token helpers --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("punct", "kw") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def fail(self, message, expected=()):
        t = self.tok
        raise ParseError(f"{message}, found {_describe(t)}", t.line, t.column, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}", {text})
        return self.advance()

    # -- variables ------------------------------------------------------

    def lookup(self, name: str) -> Var:
        if name == "_":
            return self.fresh.fresh("_")
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        v = self.fresh.fresh(name)
        self.scopes[0][name] = v
        return v

    def binder(self) -> tuple[QuantKind, list[Var]]:
        if self.at("["):
            kind, close = QuantKind.BLOCK_SEQ, "]"
            self.advance()
        elif self.at("{"):
            kind, close = QuantKind.BLOCK_PAR, "}"
            self.advance()
        else:
            kind, close = QuantKind.VECTOR, None
        names = []
        while True:
            t = self.tok
            if t.kind != "var":
                self.fail("expected a variable in quantifier", {"variable"})
            if t.text in names and t.text != "_":
                raise ParseError(f"variable {t.text} bound twice in one quantifier",
                                 t.line, t.column)
            names.append(t.text)
            self.advance()
            if not self.at(","):
                break
            self.advance()
        if close:
            self.expect(close)
        self.expect(":")
        scope = {}
        vars = []
        for n in names:
            v = self.fresh.fresh(n)
            vars.append(v)
            if n != "_":
                scope[n] = v
        self.scopes.append(scope)
        return kind, vars

    # -- terms ----------------------------------------------------------

    def expr(self) -> Term:
        left = self.mul()
        while self.at("+", "-"):
            op = self.advance().text
            left = Compound(op, (left, self.mul()))
        return left

    def mul(self) -> Term:
        left = self.unary()
        while self.at("*"):
            self.advance()
            left = Compound("*", (left, self.unary()))
        return left

    def unary(self) -> Term:
        if self.at("-"):
            self.advance()
            if self.tok.kind == "int":
                return Int(-int(self.advance().text))
            return Compound("-", (self.unary(),))
        return self.primary()

    def primary(self) -> Term:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Int(int(t.text))
        if t.kind == "var":
            self.advance()
            return self.lookup(t.text)
        if t.kind == "atom":
            self.advance()
            if not self.at("("):
                return Atom(t.text)
            self.advance()
            args = [self.expr()]
            while self.at(","):
                self.advance()
                args.append(self.expr())
            self.expect(")")
            return Compound(t.text, tuple(args))
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        self.fail("expected a term", {"atom", "variable", "integer", "("})

    # -- goals ----------------------------------------------------------

    def goal(self) -> Goal:
        parts = [self.conj()]
        while self.at(";"):
            self.advance()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(parts)

    def conj(self) -> Goal:
        parts = []
        while True:
            unit, greedy = self.goal_unit()
            parts.append(unit)
            # a quantifier has already swallowed the rest of the chain
            if greedy or not self.at(","):
                break
            self.advance()
        return parts[0] if len(parts) == 1 else And(parts)

    def goal_unit(self) -> tuple[Goal, bool]:
        if self.at("exists"):
            self.advance()
            kind, vars = self.binder()
            try:
                body = self.goal()
            finally:
                self.scopes.pop()
            return Exists(kind, vars, body), True
        if self.at("("):
            # either a grouped goal or a comparison whose left side is parenthesized
            start = self.pos
            saved = [dict(s) for s in self.scopes]
            try:
                return self.comparison_or_atom(comparison_only=True), False
            except (_Backtrack, ParseError):
                self.pos = start
                for scope, old in zip(self.scopes, saved):
                    scope.clear()
                    scope.update(old)
            self.advance()
            inner = self.goal()
            self.expect(")")
            return inner, False
        return self.comparison_or_atom(), False

    def comparison_or_atom(self, comparison_only=False) -> Goal:
        start = self.tok
        lhs = self.expr()
        if self.at(*COMPARISON_OPS):
            op = self.advance().text
            return BuiltinCmp(op, lhs, self.expr())
        if comparison_only:
            raise _Backtrack
        if start.kind == "atom" and (isinstance(lhs, Atom) or lhs.functor == start.text):
            return GAtom(lhs)
        raise ParseError(f"expected a goal, found a bare term starting at {_describe(start)}",
                         start.line, start.column, {"atom", "comparison", "exists", "("})

    # -- clauses --------------------------------------------------------

    def clause(self) -> Clause:
        parts = [self.clause_unit()]
        while self.at("&"):
            self.advance()
            parts.append(self.clause_unit())
        return parts[0] if len(parts) == 1 else DAnd(parts)

    def clause_unit(self) -> Clause:
        if self.at("forall"):
            self.advance()
            kind, vars = self.binder()
            try:
                body = self.clause()
            finally:
                self.scopes.pop()
            return Forall(kind, vars, body)
        if self.at("("):
            self.advance()
            inner = self.clause()
            self.expect(")")
            return inner
        t = self.tok
        if t.kind != "atom":
            self.fail("expected a clause head", {"atom", "forall", "("})
        head = self.primary()
        if self.at(":-"):
            self.advance()
            if self.at(".", "&", ")") or self.tok.kind == "eof":
                self.fail("expected a clause body", {"goal"})
            return Implies(self.goal(), head)
        return DAtom(head)

    def top_clause(self) -> Clause:
        self.scopes = [{}]
        c = self.clause()
        free = free_vars(c)
        if free:
            c = Forall(QuantKind.BLOCK_PAR, free, c)
        return c

    def program(self) -> Program:
        clauses, queries = [], []
        while self.tok.kind != "eof":
            if self.at("?-"):
                self.advance()
                self.scopes = [{}]
                queries.append(self.goal())
            else:
                clauses.append(self.top_clause())
            self.expect(".")
        return Program(tuple(clauses), tuple(queries))

    def finish(self, optional_dot=True):
        if optional_dot and self.at("."):
            self.advance()
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input", {"end of input"})


def parse_program(text: str, fresh: FreshSource = SESSION) -> Program:
    """Parse clauses and ``?- G.`` directives.

    Clauses with free variables are closed by a block-parallel ``forall``
    over those variables in first-occurrence order.
    """
    return Parser(text, fresh).program()


def parse_goal(text: str, fresh: FreshSource = SESSION, scope: dict | None = None) -> Goal:
    """Parse a single goal; a trailing ``.`` is optional.

    ``scope`` maps names to pre-existing variables, and is updated with any
    free variables the goal introduces.
    """
    p = Parser(text, fresh)
    if scope is not None:
        p.scopes = [scope]
    g = p.goal()
    p.finish()
    return g


def parse_clause(text: str, fresh: FreshSource = SESSION) -> Clause:
    p = Parser(text, fresh)
    c = p.top_clause()
    p.finish()
    return c


def parse_term(text: str, fresh: FreshSource = SESSION, scope: dict | None = None) -> Term:
    p = Parser(text, fresh)
    if scope is not None:
        p.scopes = [scope]
    t = p.expr()
    p.finish(optional_dot=False)
    return t
