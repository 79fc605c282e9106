import itertools

import pytest
from hypothesis import given, settings, strategies as st

from macrolog import (
    ArithError, Atom, BindingStore, Compound, Exists, Forall, DAtom, GAtom, Int, Limits,
    QuantKind, Query, SESSION, eval_arith, eval_compare, normalize, parse_program, parse_term,
    rename_clause, solve_all, subst_simultaneous, unify,
)
from macrolog.engine import UnifyFailure, mgu, subst_sequential
from macrolog.syntax import free_vars
from support import BINOMIAL, choose
from termgen import apply, match, random_pair, random_term, unifiable_pair

V, BP = QuantKind.VECTOR, QuantKind.BLOCK_PAR


def term(text, **scope):
    return parse_term(text, scope=scope)


def fresh(*names):
    return [SESSION.fresh(n) for n in names]


# -- unification -----------------------------------------------------------

def test_unify_example():
    x, y = fresh("X", "Y")
    store = BindingStore()
    assert unify(term("f(X,b)", X=x), term("f(a,Y)", Y=y), store)
    assert store.resolve(x) == Atom("a") and store.resolve(y) == Atom("b")


def test_occurs_check():
    (x,) = fresh("X")
    store = BindingStore()
    assert not unify(x, term("f(X)", X=x), store)
    assert len(store) == 0
    with pytest.raises(UnifyFailure):
        mgu(x, term("f(X)", X=x))
    # switched off, the binding goes through
    assert unify(x, term("f(X)", X=x), store, occurs=False)


def test_occurs_check_through_bindings():
    x, y = fresh("X", "Y")
    store = BindingStore()
    assert unify(y, term("g(X)", X=x), store)
    assert not unify(x, term("f(Y)", Y=y), store)


def test_first_binomial_clause_against_query():
    n, z = fresh("N", "Z")
    store = BindingStore()
    assert unify(term("c(N,1,N)", N=n), term("c(7,1,Z)", Z=z), store)
    assert store.resolve(n) == Int(7) and store.resolve(z) == Int(7)
    # the solver reaches the same binding through that clause
    sols, _, _ = solve_all(parse_program(BINOMIAL), Query.parse("c(7,1,Z)"), limits=Limits(2))
    assert [s["Z"] for s in sols] == [Int(7)]


@pytest.mark.parametrize("a, b", [
    ("f(a)", "g(a)"), ("f(a)", "f(a,b)"), ("1", "2"), ("a", "1"), ("f(X,X)", "f(a,b)"),
])
def test_clashes_fail_and_leave_store_empty(a, b):
    scope = {"X": SESSION.fresh("X")}
    store = BindingStore()
    assert not unify(parse_term(a, scope=scope), parse_term(b, scope=scope), store)
    assert len(store) == 0


def test_mgu_is_idempotent():
    x, y, z = fresh("X", "Y", "Z")
    theta = mgu(term("f(X, g(Y))", X=x, Y=y), term("f(g(Z), X)", X=x, Z=z))
    for t in theta.values():
        assert not set(free_vars(t)) & set(theta)


@settings(max_examples=300)
@given(st.randoms(use_true_random=False))
def test_mgu_soundness(rng):
    t1, t2 = random_pair(rng)
    store = BindingStore()
    if unify(t1, t2, store):
        assert store.resolve(t1) == store.resolve(t2)


@settings(max_examples=300)
@given(st.randoms(use_true_random=False))
def test_mgu_generality(rng):
    t1, t2, sigma = unifiable_pair(rng)
    assert apply(t1, sigma) == apply(t2, sigma)
    store = BindingStore()
    assert unify(t1, t2, store)
    # sigma = lam . theta for some lam: match every theta-image against sigma
    lam = {}
    for v in set(free_vars(t1)) | set(free_vars(t2)):
        assert match(store.resolve(v), apply(v, sigma), lam)


@settings(max_examples=300)
@given(st.randoms(use_true_random=False))
def test_rollback_restores_store(rng):
    t1, t2 = random_pair(rng)
    t3, t4 = random_pair(rng)
    store = BindingStore()
    unify(t3, t4, store)
    before = store.snapshot()
    mark = store.mark()
    ok = unify(t1, t2, store)
    if not ok:
        assert store.snapshot() == before
    store.undo(mark)
    assert store.snapshot() == before


# -- substitution ------------------------------------------------------------

def p(*args):
    return GAtom(Compound("p", tuple(args)))


def test_simultaneous_ground():
    x, y = fresh("X", "Y")
    assert subst_simultaneous([(x, Atom("a")), (y, Atom("b"))], p(x, y)) == p(Atom("a"), Atom("b"))


def test_simultaneous_swap():
    x, y = fresh("X", "Y")
    assert subst_simultaneous([(x, y), (y, x)], p(x, y)) == p(y, x)
    assert subst_sequential([(x, y), (y, x)], p(x, y)) == p(x, x)


def test_bound_occurrence_untouched():
    (x,) = fresh("X")
    node = Exists(V, (x,), p(x))
    assert subst_simultaneous([(x, Atom("a"))], node) == node


def test_substitution_avoids_capture():
    x, y = fresh("X", "Y")
    out = subst_simultaneous([(y, x)], Exists(V, (x,), p(x, y)))
    (bound,) = out.vars
    assert bound != x
    assert out.body == p(bound, x)


def test_duplicate_variables_rejected():
    (x,) = fresh("X")
    with pytest.raises(ValueError):
        subst_simultaneous([(x, Atom("a")), (x, Atom("b"))], p(x))


@settings(max_examples=200)
@given(st.randoms(use_true_random=False), st.integers(1, 3))
def test_simultaneity_matches_any_sequential_order(rng, n):
    targets = fresh(*"ABC"[:n])
    others = fresh("U", "W")
    pairs = [(v, random_term(rng, others, 2)) for v in targets]
    body = GAtom(Compound("q", tuple(random_term(rng, targets + others, 2) for _ in range(3))))
    expected = subst_simultaneous(pairs, body)
    for order in itertools.permutations(pairs):
        assert subst_sequential(order, body) == expected


# -- renaming ----------------------------------------------------------------

def test_rename_clause_freshens_binders():
    (n,) = fresh("N")
    clause = Forall(BP, (n,), DAtom(Compound("c", (n, Int(1), n))))
    out = rename_clause(clause)
    (n1,) = out.vars
    assert n1 != n and n1.name == "N"
    assert out.body == DAtom(Compound("c", (n1, Int(1), n1)))


def test_rename_ground_clause():
    assert rename_clause(DAtom(Atom("p"))) == DAtom(Atom("p"))


def test_renamings_are_apart():
    (clause,) = parse_program(BINOMIAL).clauses[3:]
    a, b = rename_clause(clause), rename_clause(clause)
    assert not set(a.vars) & set(b.vars)
    assert not set(a.vars) & set(clause.vars)


def test_renaming_reaches_nested_exists():
    (clause,) = parse_program("forall X: p(X) :- exists Y: q(X, Y).").clauses
    out = rename_clause(clause)
    assert out.body.body.vars != clause.body.body.vars


# -- arithmetic --------------------------------------------------------------

def test_eval_examples():
    assert eval_arith(term("4-1")) == 3
    w, z = fresh("W", "Z")
    store = BindingStore()
    store.bind(w, Int(3))
    store.bind(z, Int(3))
    assert eval_arith(term("W+Z", W=w, Z=z), store) == 6 == choose(4, 2)


def test_eval_errors():
    (x,) = fresh("X")
    with pytest.raises(ArithError) as info:
        eval_arith(term("X+1", X=x), BindingStore())
    assert info.value.reason == "unbound"
    with pytest.raises(ArithError) as info:
        eval_arith(term("a+1"))
    assert info.value.reason == "not_numeric"


def test_compare_examples():
    assert eval_compare("<", Int(2), Int(5))
    assert not eval_compare("<", Int(5), Int(2))
    n, k = fresh("N", "K")
    store = BindingStore()
    store.bind(n, Int(1))
    store.bind(k, Int(0))
    assert not eval_compare("<", n, k, store)


def test_dead_branch_does_not_spoil_answer():
    # c(2,1,Z) passes through c(1,0,W), where 1 < 0 fails
    sols, _, _ = solve_all(parse_program(BINOMIAL), Query.parse("c(2,1,Z)"), limits=Limits(3))
    assert sols[0]["Z"] == Int(choose(2, 1))


@pytest.mark.parametrize("op, a, b, want", [
    ("=<", 2, 2, True), (">", 3, 2, True), (">=", 1, 2, False), ("=:=", 4, 4, True),
    ("=\\=", 4, 4, False),
])
def test_compare_operators(op, a, b, want):
    assert eval_compare(op, Int(a), Int(b)) is want


def test_normalize_folds_ground_parts_only():
    (x,) = fresh("X")
    assert normalize(term("f(1+2, X+1, 2*(3-4))", X=x)) == term("f(3, X+1, -2)", X=x)


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
def test_eval_matches_python(a, b, c):
    assert eval_arith(term(f"({a}) * ({b}) - ({c}) + -({a})")) == a * b - c + -a
