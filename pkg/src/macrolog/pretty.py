"""Render terms and formulas back into the surface syntax."""

from __future__ import annotations

from collections import defaultdict

from .syntax import (
    And, BuiltinCmp, DAnd, DAtom, Exists, Forall, GAtom, Implies, Or, Program,
    QuantKind,
)
from .terms import ARITH_FUNCTORS, Atom, Compound, Int, Var, term_vars

__all__ = ["pretty", "VarNamer"]

_PREC = {"+": 1, "-": 1, "*": 2}


class VarNamer:
    """Chooses printed names: the source name when unique, else name plus id."""

    def __init__(self, vars=()):
        ids = defaultdict(set)
        for v in vars:
            ids[v.name].add(v.id)
        self._ambiguous = {n for n, s in ids.items() if len(s) > 1}

    def __call__(self, v: Var) -> str:
        if v.name not in self._ambiguous:
            return v.name
        return f"_G{v.id}" if v.name == "_" else f"{v.name}_{v.id}"


def _all_vars(node, out):
    if isinstance(node, (Var, Int, Atom, Compound)):
        out.extend(term_vars(node))
        return
    if isinstance(node, (Exists, Forall)):
        out.extend(node.vars)
    match node:
        case GAtom(term=t) | DAtom(term=t):
            _all_vars(t, out)
        case And(goals=cs) | Or(goals=cs) | DAnd(clauses=cs):
            for c in cs:
                _all_vars(c, out)
        case Exists(body=b) | Forall(body=b):
            _all_vars(b, out)
        case BuiltinCmp(lhs=l, rhs=r):
            _all_vars(l, out)
            _all_vars(r, out)
        case Implies(body=b, head=h):
            _all_vars(h, out)
            _all_vars(b, out)


def _is_operator(t) -> bool:
    return isinstance(t, Compound) and t.functor in ARITH_FUNCTORS and t.arity <= 2


def _term(t, name) -> str:
    match t:
        case Var():
            return name(t)
        case Int(value=v):
            return str(v)
        case Atom(name=a):
            return a
        case Compound(functor=f, args=(x,)) if f == "-":
            inner = _term(x, name)
            if isinstance(x, (Var, Atom)) or (isinstance(x, Compound) and not _is_operator(x)):
                return "-" + inner
            return f"-({inner})"
        case Compound(functor=f, args=(l, r)) if f in _PREC:
            p = _PREC[f]
            ls, rs = _term(l, name), _term(r, name)
            if _is_operator(l) and l.arity == 2 and _PREC[l.functor] < p:
                ls = f"({ls})"
            if (_is_operator(r) and r.arity == 2 and _PREC[r.functor] <= p) or \
                    (isinstance(r, Int) and r.value < 0):
                rs = f"({rs})"
            return f"{ls}{f}{rs}"
        case Compound(functor=f, args=args):
            return f"{f}({','.join(_term(a, name) for a in args)})"
    raise TypeError(f"not a term: {t!r}")


def _binder(kind, vars, name) -> str:
    names = ",".join(name(v) for v in vars)
    if kind is QuantKind.BLOCK_SEQ:
        return f"[{names}]"
    if kind is QuantKind.BLOCK_PAR:
        return f"{{{names}}}"
    return ", ".join(name(v) for v in vars)


def _goal(g, name) -> str:
    match g:
        case GAtom(term=t):
            return _term(t, name)
        case BuiltinCmp(op=op, lhs=l, rhs=r):
            return f"{_term(l, name)} {op} {_term(r, name)}"
        case And(goals=gs):
            return ", ".join(
                f"({_goal(c, name)})" if isinstance(c, (And, Or, Exists)) else _goal(c, name)
                for c in gs)
        case Or(goals=gs):
            return " ; ".join(
                f"({_goal(c, name)})" if isinstance(c, (Or, Exists)) else _goal(c, name)
                for c in gs)
        case Exists(kind=k, vars=vs, body=b):
            return f"exists {_binder(k, vs, name)}: {_goal(b, name)}"
    raise TypeError(f"not a goal: {g!r}")


def _clause(d, name) -> str:
    match d:
        case DAtom(term=t):
            return _term(t, name)
        case Implies(body=b, head=h):
            return f"{_term(h, name)} :- {_goal(b, name)}"
        case Forall(kind=k, vars=vs, body=b):
            return f"forall {_binder(k, vs, name)}: {_clause(b, name)}"
        case DAnd(clauses=cs):
            return " & ".join(
                f"({_clause(c, name)})" if isinstance(c, (DAnd, Forall)) else _clause(c, name)
                for c in cs)
    raise TypeError(f"not a clause: {d!r}")


def pretty(node, namer=None) -> str:
    """Surface-syntax text for a term, goal, clause or program.

    Clauses come out without the terminating ``.``; programs print one
    clause (or ``?-`` directive) per line.
    """
    if isinstance(node, Program):
        lines = [pretty(c, namer) + "." for c in node.clauses]
        lines += [f"?- {pretty(q, namer)}." for q in node.queries]
        return "\n".join(lines)
    if namer is None:
        vs = []
        _all_vars(node, vs)
        namer = VarNamer(vs)
    if isinstance(node, (Var, Int, Atom, Compound)):
        return _term(node, namer)
    if isinstance(node, (GAtom, And, Or, Exists, BuiltinCmp)):
        return _goal(node, namer)
    return _clause(node, namer)
