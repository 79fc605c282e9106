"""Abstract syntax for goals (G-formulas), clauses (D-formulas) and programs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union

from .terms import Atom, Compound, Int, Term, Var, term_vars

__all__ = [
    "QuantKind", "GAtom", "And", "Or", "Exists", "BuiltinCmp", "Goal",
    "DAtom", "Implies", "Forall", "DAnd", "Clause", "Program", "Node",
    "COMPARISON_OPS", "free_vars", "canonical", "alpha_equal", "flatten",
    "subnodes", "binders",
]

COMPARISON_OPS = ("<", "=<", ">", ">=", "=:=", "=\\=")


class QuantKind(enum.Enum):
    VECTOR = "vector"        # forall X, Y:   one variable per step
    BLOCK_SEQ = "block_seq"  # forall [X, Y]: all at once, in listed order
    BLOCK_PAR = "block_par"  # forall {X, Y}: all at once, any order


def _check_binder(vars):
    if not vars:
        raise ValueError("quantifier must bind at least one variable")
    if not all(isinstance(v, Var) for v in vars):
        raise TypeError(f"quantifier binds non-variables: {vars!r}")
    if len(set(vars)) != len(vars):
        raise ValueError(f"quantifier binds a variable twice: {[v.name for v in vars]}")


def _check_predicate(term, where):
    if not isinstance(term, (Atom, Compound)):
        raise TypeError(f"{where} must be an atom or compound term, got {term!r}")


@dataclass(frozen=True, slots=True)
class GAtom:
    term: Term

    def __post_init__(self):
        _check_predicate(self.term, "atomic goal")


@dataclass(frozen=True, slots=True)
class And:
    goals: tuple

    def __post_init__(self):
        object.__setattr__(self, "goals", tuple(self.goals))
        if len(self.goals) < 2:
            raise ValueError("conjunction needs at least two goals")


@dataclass(frozen=True, slots=True)
class Or:
    goals: tuple

    def __post_init__(self):
        object.__setattr__(self, "goals", tuple(self.goals))
        if len(self.goals) < 2:
            raise ValueError("disjunction needs at least two goals")


@dataclass(frozen=True, slots=True)
class Exists:
    kind: QuantKind
    vars: tuple
    body: "Goal"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        _check_binder(self.vars)


@dataclass(frozen=True, slots=True)
class BuiltinCmp:
    op: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unknown comparison {self.op!r}")


Goal = Union[GAtom, And, Or, Exists, BuiltinCmp]


@dataclass(frozen=True, slots=True)
class DAtom:
    term: Term

    def __post_init__(self):
        _check_predicate(self.term, "fact")


@dataclass(frozen=True, slots=True)
class Implies:
    body: Goal
    head: Term

    def __post_init__(self):
        _check_predicate(self.head, "clause head")


@dataclass(frozen=True, slots=True)
class Forall:
    kind: QuantKind
    vars: tuple
    body: "Clause"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        _check_binder(self.vars)


@dataclass(frozen=True, slots=True)
class DAnd:
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if len(self.clauses) < 2:
            raise ValueError("clause conjunction needs at least two clauses")


Clause = Union[DAtom, Implies, Forall, DAnd]


@dataclass(frozen=True, slots=True)
class Program:
    """A list of clauses, read as their n-ary conjunction.

    ``queries`` holds ``?- G.`` directives in source order.
    """

    clauses: tuple = ()
    queries: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "queries", tuple(self.queries))

    def as_clause(self) -> Clause | None:
        """The single D-formula the solver backchains on."""
        if not self.clauses:
            return None
        if len(self.clauses) == 1:
            return self.clauses[0]
        return DAnd(self.clauses)


Node = Union[Term, Goal, Clause, Program]


def subnodes(node) -> tuple:
    """Immediate formula/term children, in source order."""
    match node:
        case Compound(args=args):
            return args
        case GAtom(term=t) | DAtom(term=t):
            return (t,)
        case And(goals=gs) | Or(goals=gs):
            return gs
        case Exists(body=b) | Forall(body=b):
            return (b,)
        case BuiltinCmp(lhs=l, rhs=r):
            return (l, r)
        case Implies(body=b, head=h):
            return (h, b)
        case DAnd(clauses=cs):
            return cs
        case Program(clauses=cs, queries=qs):
            return cs + qs
        case _:
            return ()


def binders(node) -> tuple:
    if isinstance(node, (Exists, Forall)):
        return node.vars
    return ()


def _walk_free(node, bound: frozenset, seen: dict) -> None:
    if isinstance(node, (Var, Int, Atom, Compound)):
        for v in term_vars(node):
            if v not in bound and v not in seen:
                seen[v] = None
        return
    inner = bound | frozenset(binders(node)) if binders(node) else bound
    for child in subnodes(node):
        _walk_free(child, inner, seen)


def free_vars(node) -> list[Var]:
    """Free variables of a term or formula in first-occurrence order."""
    seen: dict = {}
    _walk_free(node, frozenset(), seen)
    return list(seen)


def canonical(node):
    """A hashable rendering with every variable replaced by its first-occurrence index.

    Two nodes have equal canonical forms exactly when they are identical up to a
    consistent renaming of variables.
    """
    numbering: dict[Var, int] = {}

    def var_index(v):
        if v not in numbering:
            numbering[v] = len(numbering)
        return numbering[v]

    def go(n):
        match n:
            case Var():
                return ("V", var_index(n))
            case Int(value=v):
                return ("I", v)
            case Atom(name=a):
                return ("A", a)
            case Compound(functor=f, args=args):
                return ("C", f, tuple(go(a) for a in args))
            case GAtom(term=t):
                return ("GAtom", go(t))
            case And(goals=gs):
                return ("And", tuple(go(g) for g in gs))
            case Or(goals=gs):
                return ("Or", tuple(go(g) for g in gs))
            case Exists(kind=k, vars=vs, body=b):
                return ("Exists", k.value, tuple(var_index(v) for v in vs), go(b))
            case BuiltinCmp(op=op, lhs=l, rhs=r):
                return ("Cmp", op, go(l), go(r))
            case DAtom(term=t):
                return ("DAtom", go(t))
            case Implies(body=b, head=h):
                return ("Implies", go(h), go(b))
            case Forall(kind=k, vars=vs, body=b):
                return ("Forall", k.value, tuple(var_index(v) for v in vs), go(b))
            case DAnd(clauses=cs):
                return ("DAnd", tuple(go(c) for c in cs))
            case Program(clauses=cs, queries=qs):
                # variables never cross clause boundaries
                parts = []
                for c in cs + qs:
                    numbering.clear()
                    parts.append(go(c))
                return ("Program", len(cs), tuple(parts))
        raise TypeError(f"not a syntax node: {n!r}")

    return go(node)


def alpha_equal(a, b) -> bool:
    return canonical(a) == canonical(b)


def _flatten_goal(g: Goal) -> Goal:
    match g:
        case And(goals=gs):
            out = []
            for child in map(_flatten_goal, gs):
                out.extend(child.goals if isinstance(child, And) else (child,))
            return And(out)
        case Or(goals=gs):
            out = []
            for child in map(_flatten_goal, gs):
                out.extend(child.goals if isinstance(child, Or) else (child,))
            return Or(out)
        case Exists(kind=kind, vars=vs, body=body):
            body = _flatten_goal(body)
            if (kind is QuantKind.VECTOR and isinstance(body, Exists)
                    and body.kind is QuantKind.VECTOR and not set(vs) & set(body.vars)):
                return Exists(kind, vs + body.vars, body.body)
            return Exists(kind, vs, body)
    return g


def _flatten_clause(d: Clause) -> Clause:
    match d:
        case Implies(body=b, head=h):
            return Implies(_flatten_goal(b), h)
        case DAnd(clauses=cs):
            out = []
            for child in map(_flatten_clause, cs):
                out.extend(child.clauses if isinstance(child, DAnd) else (child,))
            return DAnd(out)
        case Forall(kind=kind, vars=vs, body=body):
            body = _flatten_clause(body)
            if (kind is QuantKind.VECTOR and isinstance(body, Forall)
                    and body.kind is QuantKind.VECTOR and not set(vs) & set(body.vars)):
                return Forall(kind, vs + body.vars, body.body)
            return Forall(kind, vs, body)
    return d


def flatten(node):
    """Merge nested same-connective chains into n-ary nodes and adjacent Vector binders.

    Works bottom-up, so a single pass reaches the fixed point.
    """
    if isinstance(node, (GAtom, And, Or, Exists, BuiltinCmp)):
        return _flatten_goal(node)
    if isinstance(node, (DAtom, Implies, Forall, DAnd)):
        return _flatten_clause(node)
    if isinstance(node, Program):
        return Program(tuple(_flatten_clause(c) for c in node.clauses),
                       tuple(_flatten_goal(q) for q in node.queries))
    raise TypeError(f"cannot flatten {node!r}")


def iter_nodes(node) -> Iterator:
    """Pre-order traversal over formula nodes (terms are not entered)."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if not isinstance(n, (Var, Int, Atom, Compound, GAtom, DAtom, BuiltinCmp)):
            stack.extend(c for c in reversed(subnodes(n))
                         if not isinstance(c, (Var, Int, Atom, Compound)))
