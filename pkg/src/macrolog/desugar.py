"""Translation between macro connectives and their binary/single-binder expansions.

``desugar`` produces the micro form that plain first-order syntax allows:
binary right-nested conjunctions and disjunctions, one variable per
quantifier.  ``macroize`` goes the other way as far as it can without
guessing scheduling intent, so it only ever produces Vector binders.
"""

from __future__ import annotations

from functools import reduce

from .syntax import (
    And, BuiltinCmp, DAnd, DAtom, Exists, Forall, GAtom, Implies, Or, Program,
    QuantKind, flatten, iter_nodes,
)

__all__ = ["desugar", "macroize", "is_micro", "set_binder_kind", "MicroFormError"]


class MicroFormError(ValueError):
    pass


def _right_nest(cls, items):
    return reduce(lambda acc, item: cls((item, acc)), reversed(items[:-1]), items[-1])


def _single_binders(cls, vars, body):
    for v in reversed(vars):
        body = cls(QuantKind.VECTOR, (v,), body)
    return body


def desugar(node):
    match node:
        case GAtom() | DAtom() | BuiltinCmp():
            return node
        case And(goals=gs):
            return _right_nest(And, [desugar(g) for g in gs])
        case Or(goals=gs):
            return _right_nest(Or, [desugar(g) for g in gs])
        case DAnd(clauses=cs):
            return _right_nest(DAnd, [desugar(c) for c in cs])
        case Implies(body=b, head=h):
            return Implies(desugar(b), h)
        case Exists(vars=vs, body=b):
            return _single_binders(Exists, vs, desugar(b))
        case Forall(vars=vs, body=b):
            return _single_binders(Forall, vs, desugar(b))
        case Program(clauses=cs, queries=qs):
            # the clause list is itself an n-ary conjunction
            clauses = (_right_nest(DAnd, [desugar(c) for c in cs]),) if cs else ()
            return Program(clauses, tuple(desugar(q) for q in qs))
    raise TypeError(f"cannot desugar {node!r}")


def macroize(node):
    """Flatten nested chains into n-ary nodes and merge stacked Vector binders."""
    node = flatten(node)
    if isinstance(node, Program):
        clauses = []
        for c in node.clauses:
            clauses.extend(c.clauses if isinstance(c, DAnd) else (c,))
        return Program(tuple(clauses), node.queries)
    return node


def is_micro(node, *, raise_error=False) -> bool:
    """Check the micro-form restrictions on every node."""
    def bad(msg):
        if raise_error:
            raise MicroFormError(msg)
        return False

    roots = [node]
    if isinstance(node, Program):
        if len(node.clauses) > 1:
            return bad("program has more than one top-level clause")
        roots = list(node.clauses) + list(node.queries)
    for root in roots:
        for n in iter_nodes(root):
            if isinstance(n, (And, Or)) and len(n.goals) != 2:
                return bad(f"{type(n).__name__} with {len(n.goals)} operands")
            if isinstance(n, DAnd) and len(n.clauses) != 2:
                return bad(f"DAnd with {len(n.clauses)} operands")
            if isinstance(n, (Exists, Forall)) and (n.kind is not QuantKind.VECTOR or len(n.vars) != 1):
                return bad(f"{n.kind.value} binder over {len(n.vars)} variables")
    return True


def set_binder_kind(node, kind: QuantKind):
    """Rewrite every quantifier to ``kind``, keeping its variable list."""
    match node:
        case GAtom() | DAtom() | BuiltinCmp():
            return node
        case And(goals=gs):
            return And(tuple(set_binder_kind(g, kind) for g in gs))
        case Or(goals=gs):
            return Or(tuple(set_binder_kind(g, kind) for g in gs))
        case DAnd(clauses=cs):
            return DAnd(tuple(set_binder_kind(c, kind) for c in cs))
        case Implies(body=b, head=h):
            return Implies(set_binder_kind(b, kind), h)
        case Exists(vars=vs, body=b):
            return Exists(kind, vs, set_binder_kind(b, kind))
        case Forall(vars=vs, body=b):
            return Forall(kind, vs, set_binder_kind(b, kind))
        case Program(clauses=cs, queries=qs):
            return Program(tuple(set_binder_kind(c, kind) for c in cs),
                           tuple(set_binder_kind(q, kind) for q in qs))
    raise TypeError(f"cannot rewrite binders of {node!r}")
