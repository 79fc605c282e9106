from collections import Counter

import pytest

from macrolog import (
    DepthExceeded, Int, Limits, Program, QuantKind, Query, Scheduler, Search, Solution, Stats,
    answer_multiset, desugar, parse_goal, parse_program, set_binder_kind, solve, solve_all,
)
from support import BINOMIAL, choose

BINOM = parse_program(BINOMIAL)


def answers(program, goal, depth=32, **kw):
    sols, stats, complete = solve_all(program, Query.parse(goal) if isinstance(goal, str)
                                      else Query.of(goal), limits=Limits(depth), **kw)
    return sols, stats, complete


def z_values(sols):
    return [s["Z"].value for s in sols]


# -- examples ----------------------------------------------------------------

def test_select_one_at_depth_two():
    sols, _, complete = answers(BINOM, "c(7,1,Z)", depth=2)
    assert z_values(sols) == [7]
    # the recursive clause was cut off, so the answer set is not known to be final
    assert not complete


def test_ground_fact_query():
    sols, _, complete = answers(parse_program("p."), "p")
    assert len(sols) == 1 and sols[0].bindings == {} and complete
    assert sols[0].render() == []


@pytest.mark.parametrize("n, k", [(4, 2), (6, 3), (5, 1), (5, 5), (7, 3)])
def test_binomial_first_answer(n, k):
    search = solve(BINOM, Query.parse(f"c({n},{k},Z)"), limits=Limits(32, max_solutions=1))
    (sol,) = list(search.solutions())
    assert sol["Z"] == Int(choose(n, k))


def test_answers_report_normalized_arithmetic():
    sols, _, _ = answers(BINOM, "c(4,2,Z)", depth=4)
    assert 6 in z_values(sols)
    assert all(isinstance(s["Z"], Int) for s in sols)


def test_empty_program():
    sols, _, complete = answers(Program(), "p")
    assert sols == [] and complete


def test_backchain_chain():
    sols, stats, complete = answers(parse_program("q :- p. p."), "q")
    assert len(sols) == 1 and complete
    # every head tried counts, matching or not
    assert stats.rules[7] == 2 and stats.rules[2] == 2 and stats.rules[1] == 2


def test_duplicate_derivations_are_kept():
    # c(1,1,Z) follows from both base clauses
    sols, _, _ = answers(BINOM, "c(1,1,Z)", depth=1)
    assert z_values(sols) == [1, 1]


def test_disjunction_collects_all_branches():
    sols, _, complete = answers(parse_program("p(1). p(2). q(3)."), "p(X) ; q(X) ; p(X)")
    assert [s["X"].value for s in sols] == [1, 2, 3, 1, 2] and complete


def test_existential_variables_are_hidden():
    sols, _, _ = answers(parse_program("p(1, a). p(2, b)."), "exists {Y}: p(X, Y)")
    assert [s.render() for s in sols] == [["X = 1"], ["X = 2"]]


def test_builtin_failure_on_unbound_operand():
    sols, _, complete = answers(parse_program("p(1)."), "X < 2, p(X)")
    assert sols == [] and complete
    sols, _, _ = answers(parse_program("p(1)."), "p(X), X < 2")
    assert len(sols) == 1


def test_unbound_answer_variables_are_numbered():
    sols, _, _ = answers(parse_program("forall {A}: p(f(A, A))."), "p(X)")
    assert sols[0].render() == ["X = f(_1,_1)"]


def test_occurs_check_switch():
    prog = parse_program("forall {X}: eq(X, X).")
    assert answers(prog, "eq(Y, f(Y))")[0] == []
    sols = answers(prog, "eq(Y, f(Y))", occurs_check=False)[0]
    assert [s.render() for s in sols] == [["Y = f(Y)"]]


def test_clause_conjunction_is_a_branch_point():
    prog = parse_program("forall {X}: r(X) & q(X) :- p(X). p(1) & p(2).")
    sols, stats, _ = answers(prog, "q(X)")
    assert [s["X"].value for s in sols] == [1, 2]
    assert stats.rules[3] >= 1


def test_query_variables_in_first_occurrence_order():
    q = Query.parse("p(Y, X), q(X, Z)")
    assert [v.name for v in q.query_vars] == ["Y", "X", "Z"]


def test_limits_validate():
    with pytest.raises(ValueError):
        Limits(max_depth=0)
    with pytest.raises(ValueError):
        Limits(max_solutions=0)
    Limits(max_depth=None, max_solutions=None)


def test_max_solutions_stops_early():
    search = solve(parse_program("nat(z). forall {N}: nat(s(N)) :- nat(N)."),
                   Query.parse("nat(X)"), limits=Limits(None, max_solutions=3))
    assert len(list(search.solutions())) == 3


# -- depth and completeness --------------------------------------------------

def test_depth_exceeded_events():
    prog = parse_program("nat(z). forall {N}: nat(s(N)) :- nat(N).")
    events = list(solve(prog, Query.parse("nat(X)"), limits=Limits(3)))
    sols = [e for e in events if isinstance(e, Solution)]
    cut = [e for e in events if isinstance(e, DepthExceeded)]
    assert len(sols) == 3 and len(cut) == 1 and cut[0].depth == 4


def test_complete_flag_false_iff_pruned():
    prog = parse_program("nat(z). forall {N}: nat(s(N)) :- nat(N).")
    assert answers(prog, "nat(s(s(z)))", depth=10)[2] is True
    assert answers(prog, "nat(X)", depth=10)[2] is False
    assert answers(parse_program("p(1). q :- p(1)."), "q", depth=2)[2] is True
    # exactly at the limit still counts as reached
    assert answers(parse_program("p(1). q :- p(1)."), "q", depth=1)[2] is False


def test_solution_depth_counts_atom_nesting():
    sols, stats, _ = answers(parse_program("a :- b. b :- c. c."), "a")
    assert sols[0].stats.depth == 3 and stats.depth == 3


def test_monotone_limits(programs):
    for prog, goal in programs[:50]:
        small = Counter(answer_multiset(answers(prog, goal, depth=3)[0]))
        large = Counter(answer_multiset(answers(prog, goal, depth=8)[0]))
        assert not small - large


# -- determinism -------------------------------------------------------------

def test_seq_is_deterministic(programs):
    for prog, goal in programs[:40]:
        a, sa, _ = answers(prog, goal)
        b, sb, _ = answers(prog, goal)
        assert [s.canonical() for s in a] == [s.canonical() for s in b]
        assert sa == sb


# -- step accounting ---------------------------------------------------------

def test_conjunction_counts_one_synthetic_step():
    prog = parse_program("a. b. c. d.")
    _, stats, _ = answers(prog, "a, b, c, d")
    assert stats.rules[8] == 1
    _, micro, _ = answers(desugar(prog), desugar(parse_goal("a, b, c, d")))
    assert micro.rules[8] == 3


def test_exact_totals_for_three_facts():
    # per atom: rule 7, one rule-3 fan-out over three facts, three rule-1 attempts
    prog = parse_program("a. b. c.")
    _, stats, _ = answers(prog, "a, b, c")
    assert (stats.synthetic_steps, stats.micro_steps) == (1 + 3 * 5, 2 + 3 * 6)
    _, micro, _ = answers(desugar(prog), desugar(parse_goal("a, b, c")))
    assert (micro.synthetic_steps, micro.micro_steps) == (2 + 3 * 6, 2 + 3 * 6)


@pytest.mark.parametrize("binder, rule, micro", [
    ("X, Y, Z", 10, 1), ("[X, Y, Z]", 11, 3), ("{X, Y, Z}", 12, 3),
])
def test_binder_accounting(binder, rule, micro):
    prog = parse_program("p(1, 2, 3).")
    _, stats, _ = answers(prog, f"exists {binder}: p(X, Y, Z)")
    firings = 3 if rule == 10 else 1
    assert stats.rules[rule] == firings
    # binder contributes n micro steps however it is written
    base = answers(prog, "p(1, 2, 3)")[1]
    assert stats.micro_steps - base.micro_steps == 3
    assert stats.synthetic_steps - base.synthetic_steps == firings


@pytest.mark.parametrize("binder, rule", [("N, K, W", 4), ("[N, K, W]", 5), ("{N, K, W}", 6)])
def test_universal_binder_accounting(binder, rule):
    prog = parse_program(f"forall {binder}: t(N, K, W).")
    _, stats, _ = answers(prog, "t(1, 2, 3)")
    assert stats.rules[rule] == (3 if rule == 4 else 1)


def test_builtins_do_not_count_as_steps():
    prog = parse_program("p(1).")
    _, with_cmp, _ = answers(prog, "p(X), X < 2")
    _, without, _ = answers(prog, "p(X)")
    assert with_cmp.rules[0] == 1
    assert with_cmp.micro_steps - without.micro_steps == 1  # the conjunction
    assert with_cmp.synthetic_steps - without.synthetic_steps == 1


def test_synthetic_never_exceeds_micro(programs):
    for prog, goal in programs:
        sols, stats, _ = answers(prog, goal)
        assert stats.synthetic_steps <= stats.micro_steps
        for s in sols:
            assert s.stats.synthetic_steps <= s.stats.micro_steps


def test_binary_only_runs_have_equal_counters():
    prog = parse_program("a. b.")
    _, stats, _ = answers(prog, "exists X: (a, b)")
    assert stats.synthetic_steps == stats.micro_steps


def test_max_width_tracks_pending_alternatives():
    prog = parse_program("p(1). p(2). p(3).")
    _, stats, _ = answers(prog, "p(X)")
    assert stats.max_width == 3


# -- binder kinds ------------------------------------------------------------

def test_binder_kind_does_not_change_answers(programs):
    for prog, goal in programs[:40]:
        results = set()
        for kind in QuantKind:
            sols, _, complete = answers(set_binder_kind(prog, kind), set_binder_kind(goal, kind))
            results.add((tuple(answer_multiset(sols)), complete))
        assert len(results) == 1


def test_block_seq_and_par_agree_with_shared_names():
    prog = parse_program("p(1, 2). p(2, 1).")
    for binder in ("[X, Y]", "{X, Y}", "X, Y"):
        sols, _, _ = answers(prog, f"exists {binder}: p(X, Y), p(Y, X)")
        assert len(sols) == 2 and sols[0].bindings == {}
        sols, _, _ = answers(prog, f"(exists {binder}: p(X, Y)), p(A, B)")
        assert len(sols) == 4


# -- tracing -----------------------------------------------------------------

def test_trace_lines():
    lines = []
    prog = parse_program("a. b. c.")
    list(Search(prog, parse_goal("a, b"), trace=lines.append,
                limits=Limits(8, max_solutions=1)))
    assert lines[:4] == [
        "rule=8 depth=0 goal=a, b",
        "rule=7 depth=1 goal=a",
        "rule=3 depth=1 goal=a",
        "rule=1 depth=1 goal=a",
    ]


def test_trace_shows_current_bindings():
    lines = []
    prog = parse_program("p(1). q(1).")
    list(Search(prog, parse_goal("p(X), q(X)"), trace=lines.append))
    assert "rule=7 depth=1 goal=q(1)" in lines


def test_scheduler_names():
    assert Scheduler("seq") is Scheduler.SEQ and Scheduler("par") is Scheduler.PAR


def test_stats_merge_and_summary():
    a = Stats(3, 2, 4, 1, Counter({7: 1}))
    b = Stats(1, 1, 2, 5, Counter({7: 2, 1: 1}))
    m = a.merge(b)
    assert (m.micro_steps, m.synthetic_steps, m.max_width, m.depth) == (4, 3, 4, 5)
    assert m.rules == Counter({7: 3, 1: 1})
    assert m.summary() == "synthetic_steps=3 micro_steps=4 max_width=4 depth=5"
