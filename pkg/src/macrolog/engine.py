"""Binding store, unification, substitution and integer arithmetic."""

from __future__ import annotations

import operator

from .syntax import (
    And, BuiltinCmp, DAnd, DAtom, Exists, Forall, GAtom, Implies, Or, Program,
)
from .terms import SESSION, Atom, Compound, FreshSource, Int, Term, Var, term_vars

__all__ = [
    "BindingStore", "unify", "UnifyFailure", "subst_simultaneous", "subst_sequential",
    "substitute", "rename_clause", "eval_arith", "eval_compare", "ArithError",
    "normalize", "occurs_in", "map_terms", "mgu",
]


class UnifyFailure(Exception):
    """Raised by :func:`mgu`; :func:`unify` reports failure by returning False."""


class ArithError(Exception):
    def __init__(self, reason: str, term=None):
        self.reason = reason  # "unbound" or "not_numeric"
        self.term = term
        super().__init__(f"{reason}: {term!r}")


def _changed(new: tuple, old: tuple) -> bool:
    return any(a is not b for a, b in zip(new, old))


class BindingStore:
    """Variable bindings with a trail for checkpoint/rollback.

    Bindings are triangular: a variable may be bound to a term that contains
    other bound variables; :meth:`resolve` chases them.
    """

    __slots__ = ("_bindings", "_trail")

    def __init__(self, bindings=None):
        self._bindings: dict[int, Term] = dict(bindings or {})
        self._trail: list[int] = []

    def __len__(self):
        return len(self._bindings)

    def __contains__(self, v: Var):
        return v.id in self._bindings

    def walk(self, t: Term) -> Term:
        b = self._bindings
        while isinstance(t, Var) and t.id in b:
            t = b[t.id]
        return t

    def bind(self, v: Var, t: Term) -> None:
        self._bindings[v.id] = t
        self._trail.append(v.id)

    def mark(self) -> int:
        return len(self._trail)

    def undo(self, mark: int) -> None:
        trail, b = self._trail, self._bindings
        while len(trail) > mark:
            del b[trail.pop()]

    def resolve(self, t: Term, _open: frozenset = frozenset()) -> Term:
        """Substitute bindings throughout ``t``.

        A variable met again inside its own binding (possible only without the
        occurs check) is left in place, so cyclic bindings print finitely.
        """
        b = self._bindings
        while isinstance(t, Var) and t.id in b:
            if t.id in _open:
                return t
            _open = _open | {t.id}
            t = b[t.id]
        if isinstance(t, Compound):
            args = tuple(self.resolve(a, _open) for a in t.args)
            if _changed(args, t.args):
                return Compound(t.functor, args)
        return t

    def copy(self) -> "BindingStore":
        return BindingStore(self._bindings)

    def snapshot(self) -> dict[int, Term]:
        return dict(self._bindings)


def occurs_in(v: Var, t: Term, store: BindingStore) -> bool:
    stack = [t]
    while stack:
        t = store.walk(stack.pop())
        if isinstance(t, Var):
            if t.id == v.id:
                return True
        elif isinstance(t, Compound):
            stack.extend(t.args)
    return False


def unify(t1: Term, t2: Term, store: BindingStore, occurs: bool = True) -> bool:
    """Extend ``store`` to a most general unifier of ``t1`` and ``t2``.

    Returns False, with the store rolled back, when no unifier exists.
    """
    mark = store.mark()
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = store.walk(a), store.walk(b)
        if a is b:
            continue
        if isinstance(a, Var):
            if isinstance(b, Var) and a.id == b.id:
                continue
            if occurs and occurs_in(a, b, store):
                break
            store.bind(a, b)
        elif isinstance(b, Var):
            if occurs and occurs_in(b, a, store):
                break
            store.bind(b, a)
        elif isinstance(a, Compound):
            if not (isinstance(b, Compound) and a.functor == b.functor and a.arity == b.arity):
                break
            stack.extend(zip(a.args, b.args))
        elif a != b:
            break
    else:
        return True
    store.undo(mark)
    return False


def mgu(t1: Term, t2: Term, occurs: bool = True) -> dict[Var, Term]:
    """The most general unifier as an idempotent substitution; raises UnifyFailure."""
    store = BindingStore()
    if not unify(t1, t2, store, occurs):
        raise UnifyFailure(f"{t1!r} and {t2!r} do not unify")
    vs = {v: None for t in (t1, t2) for v in term_vars(t)}
    return {v: store.resolve(v) for v in vs if v in store}


def _subst_term(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.id, t)
    if isinstance(t, Compound):
        args = tuple(_subst_term(a, mapping) for a in t.args)
        return Compound(t.functor, args) if _changed(args, t.args) else t
    return t


def _range_vars(mapping: dict) -> set[int]:
    return {v.id for t in mapping.values() for v in term_vars(t)}


def _subst(node, mapping: dict, fresh: FreshSource):
    if not mapping:
        return node
    match node:
        case Var() | Int() | Atom() | Compound():
            return _subst_term(node, mapping)
        case GAtom(term=t):
            return GAtom(_subst_term(t, mapping))
        case DAtom(term=t):
            return DAtom(_subst_term(t, mapping))
        case BuiltinCmp(op=op, lhs=l, rhs=r):
            return BuiltinCmp(op, _subst_term(l, mapping), _subst_term(r, mapping))
        case And(goals=gs):
            return And(tuple(_subst(g, mapping, fresh) for g in gs))
        case Or(goals=gs):
            return Or(tuple(_subst(g, mapping, fresh) for g in gs))
        case DAnd(clauses=cs):
            return DAnd(tuple(_subst(c, mapping, fresh) for c in cs))
        case Implies(body=b, head=h):
            return Implies(_subst(b, mapping, fresh), _subst_term(h, mapping))
        case Exists(kind=k, vars=vs, body=b) | Forall(kind=k, vars=vs, body=b):
            inner = {i: t for i, t in mapping.items() if all(v.id != i for v in vs)}
            if not inner:
                return node
            captured = _range_vars(inner)
            if any(v.id in captured for v in vs):
                renamed = tuple(fresh.rename(v) if v.id in captured else v for v in vs)
                inner.update((old.id, new) for old, new in zip(vs, renamed) if old is not new)
                vs = renamed
            return type(node)(k, vs, _subst(b, inner, fresh))
        case Program(clauses=cs, queries=qs):
            return Program(tuple(_subst(c, mapping, fresh) for c in cs),
                           tuple(_subst(q, mapping, fresh) for q in qs))
    raise TypeError(f"cannot substitute into {node!r}")


def substitute(node, mapping: dict[Var, Term], fresh: FreshSource = SESSION):
    """Capture-avoiding simultaneous substitution given as a Var -> Term dict."""
    return _subst(node, {v.id: t for v, t in mapping.items()}, fresh)


def subst_simultaneous(pairs, node, fresh: FreshSource = SESSION):
    """Apply ``[t1/x1 ... tn/xn]`` to ``node`` all at once.

    Every replacement is made against the original node, so ``[(X,Y),(Y,X)]``
    swaps.  Bound variables that would capture a free variable of some ``ti``
    are renamed first.
    """
    pairs = list(pairs)
    ids = [v.id for v, _ in pairs]
    if len(set(ids)) != len(ids):
        raise ValueError("simultaneous substitution binds a variable twice")
    return _subst(node, {v.id: t for v, t in pairs}, fresh)


def subst_sequential(pairs, node, fresh: FreshSource = SESSION):
    """Apply ``[t1/x1]``, then ``[t2/x2]`` to the result, and so on."""
    for v, t in pairs:
        node = _subst(node, {v.id: t}, fresh)
    return node


def rename_clause(clause, fresh: FreshSource = SESSION):
    """Replace every quantifier-bound variable in ``clause`` by a fresh one."""
    match clause:
        case Forall(kind=k, vars=vs, body=b) | Exists(kind=k, vars=vs, body=b):
            new = tuple(fresh.rename(v) for v in vs)
            body = _subst(b, {old.id: n for old, n in zip(vs, new)}, fresh)
            return type(clause)(k, new, rename_clause(body, fresh))
        case Implies(body=b, head=h):
            return Implies(rename_clause(b, fresh), h)
        case DAnd(clauses=cs):
            return DAnd(tuple(rename_clause(c, fresh) for c in cs))
        case And(goals=gs):
            return And(tuple(rename_clause(g, fresh) for g in gs))
        case Or(goals=gs):
            return Or(tuple(rename_clause(g, fresh) for g in gs))
    return clause


_BINARY = {"+": operator.add, "-": operator.sub, "*": operator.mul}


def eval_arith(t: Term, store: BindingStore | None = None) -> int:
    """Evaluate an integer expression built from ``+``, ``-`` and ``*``."""
    if store is not None:
        t = store.walk(t)
    if isinstance(t, Int):
        return t.value
    if isinstance(t, Var):
        raise ArithError("unbound", t)
    if isinstance(t, Compound):
        if t.arity == 2 and t.functor in _BINARY:
            return _BINARY[t.functor](eval_arith(t.args[0], store), eval_arith(t.args[1], store))
        if t.arity == 1 and t.functor == "-":
            return -eval_arith(t.args[0], store)
    raise ArithError("not_numeric", t)


_COMPARE = {
    "<": operator.lt, "=<": operator.le, ">": operator.gt, ">=": operator.ge,
    "=:=": operator.eq, "=\\=": operator.ne,
}


def eval_compare(op: str, lhs: Term, rhs: Term, store: BindingStore | None = None) -> bool:
    return _COMPARE[op](eval_arith(lhs, store), eval_arith(rhs, store))


def normalize(t: Term, store: BindingStore | None = None) -> Term:
    """Resolve ``t`` and fold every ground arithmetic subterm to an Int."""
    if store is not None:
        t = store.resolve(t)
    if not isinstance(t, Compound):
        return t
    args = tuple(normalize(a) for a in t.args)
    if t.functor in _BINARY and len(args) == 2 and all(isinstance(a, Int) for a in args):
        return Int(_BINARY[t.functor](args[0].value, args[1].value))
    if t.functor == "-" and len(args) == 1 and isinstance(args[0], Int):
        return Int(-args[0].value)
    return Compound(t.functor, args) if _changed(args, t.args) else t


def map_terms(node, fn):
    """Rebuild a formula with ``fn`` applied to each of its top-level terms.

    Quantifier binders are left alone, so ``fn`` must not touch bound variables.
    """
    match node:
        case Var() | Int() | Atom() | Compound():
            return fn(node)
        case GAtom(term=t):
            return GAtom(fn(t))
        case DAtom(term=t):
            return DAtom(fn(t))
        case BuiltinCmp(op=op, lhs=l, rhs=r):
            return BuiltinCmp(op, fn(l), fn(r))
        case And(goals=gs):
            return And(tuple(map_terms(g, fn) for g in gs))
        case Or(goals=gs):
            return Or(tuple(map_terms(g, fn) for g in gs))
        case DAnd(clauses=cs):
            return DAnd(tuple(map_terms(c, fn) for c in cs))
        case Implies(body=b, head=h):
            return Implies(map_terms(b, fn), fn(h))
        case Exists(kind=k, vars=vs, body=b) | Forall(kind=k, vars=vs, body=b):
            return type(node)(k, vs, map_terms(b, fn))
    raise TypeError(f"not a formula: {node!r}")
