"""Goal reduction and backchaining, with a depth-first sequential scheduler.

The machine works on continuations: a linked list ``(frame, rest)`` of
pending work.  A frame is either ``(GOAL, goal, depth)`` -- reduce a goal --
or ``(BACKCHAIN, clause, atom, depth)`` -- try to prove ``atom`` from
``clause``.  ``depth`` counts the atom resolutions above the frame.

Rule numbers used in stats and traces:

====  ============================================================
1     fact matches the atom
2     implication: match the head, then reduce the body
3     clause conjunction: try every conjunct (a branch point)
4-6   universal binder: vector (one variable), block-seq, block-par
7     atomic goal: switch to backchaining against the program
8     goal conjunction
9     goal disjunction (a branch point)
10-12 existential binder: vector (one variable), block-seq, block-par
====  ============================================================
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .engine import (
    ArithError, BindingStore, eval_compare, map_terms, normalize,
    subst_sequential, subst_simultaneous, unify,
)
from .parser import parse_goal
from .pretty import VarNamer, pretty
from .syntax import (
    And, BuiltinCmp, DAnd, DAtom, Exists, Forall, GAtom, Goal, Implies, Or, Program,
    QuantKind, free_vars,
)
from .terms import SESSION, FreshSource, Term, Var, term_vars

__all__ = [
    "Scheduler", "Limits", "Stats", "Query", "Solution", "DepthExceeded",
    "Search", "solve", "solve_all", "answer_multiset",
]

log = logging.getLogger(__name__)

GOAL, BACKCHAIN = 0, 1
BUILTIN_RULE = 0
PRUNED = object()
# per-proof counters: (micro_steps, synthetic_steps, depth)
ZERO_PATH = (0, 0, 0)


class Scheduler(str, enum.Enum):
    SEQ = "seq"
    PAR = "par"


@dataclass(frozen=True)
class Limits:
    max_depth: Optional[int] = 256
    max_solutions: Optional[int] = None

    def __post_init__(self):
        for name in ("max_depth", "max_solutions"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass
class Stats:
    micro_steps: int = 0
    synthetic_steps: int = 0
    max_width: int = 0
    depth: int = 0
    # rule number -> firings; rule 0 counts builtin comparisons, which are
    # not part of either step total
    rules: Counter = field(default_factory=Counter)

    def merge(self, other: "Stats") -> "Stats":
        return Stats(
            self.micro_steps + other.micro_steps,
            self.synthetic_steps + other.synthetic_steps,
            max(self.max_width, other.max_width),
            max(self.depth, other.depth),
            self.rules + other.rules,
        )

    def summary(self) -> str:
        return (f"synthetic_steps={self.synthetic_steps} micro_steps={self.micro_steps} "
                f"max_width={self.max_width} depth={self.depth}")


@dataclass(frozen=True)
class Query:
    goal: Goal
    query_vars: tuple

    @classmethod
    def of(cls, goal: Goal) -> "Query":
        return cls(goal, tuple(free_vars(goal)))

    @classmethod
    def parse(cls, text: str, fresh: FreshSource = SESSION) -> "Query":
        return cls.of(parse_goal(text, fresh))


@dataclass(frozen=True)
class Solution:
    """An answer substitution restricted to the query variables."""

    bindings: dict
    stats: Stats = field(default_factory=Stats, compare=False)

    def __getitem__(self, name: str) -> Term:
        for v, t in self.bindings.items():
            if v.name == name:
                return t
        raise KeyError(name)

    def render(self) -> list[str]:
        """``Name = Term`` lines, skipping variables that stayed unbound and anonymous ones."""
        terms = list(self.bindings.items())
        namer = _AnswerNamer([v for v, _ in terms], [t for _, t in terms])
        lines = []
        for v, t in terms:
            if v.name.startswith("_") or (isinstance(t, Var) and t == v):
                continue
            lines.append(f"{v.name} = {pretty(t, namer)}")
        return lines

    def canonical(self) -> str:
        """Rendering that is stable under renaming of the unbound variables in the answer."""
        numbering: dict = {}
        parts = []
        for v, t in self.bindings.items():
            for u in term_vars(t):
                numbering.setdefault(u, f"_{len(numbering)}")
            parts.append(f"{v.name}={pretty(t, numbering.__getitem__)}")
        return ", ".join(parts)


class _AnswerNamer(VarNamer):
    def __init__(self, query_vars, terms):
        super().__init__(query_vars)
        self._query = set(query_vars)
        self._others: dict = {}
        for t in terms:
            for u in term_vars(t):
                if u not in self._query:
                    self._others.setdefault(u, f"_{len(self._others) + 1}")

    def __call__(self, v):
        return super().__call__(v) if v in self._query else self._others[v]


@dataclass(frozen=True)
class DepthExceeded:
    """A branch cut off at the depth limit; the answer set may be incomplete."""

    goal: Term
    depth: int


def answer_multiset(solutions) -> list[str]:
    return sorted(s.canonical() for s in solutions)


def _bump(path, micro, synth, depth):
    m, s, d = path
    return (m + micro, s + synth, d if d >= depth else depth)


class Machine:
    """One-step expansion of a continuation; shared by both schedulers."""

    def __init__(self, program: Program, *, occurs_check=True, max_depth=None,
                 trace: Callable[[str], None] | None = None, fresh: FreshSource = SESSION):
        self.program = program.as_clause()
        self.occurs = occurs_check
        self.max_depth = max_depth
        self.trace = trace
        self.fresh = fresh
        self.stats = Stats()

    def _fire(self, rule, micro, synth, depth, shown, store):
        st = self.stats
        st.rules[rule] += 1
        if rule != BUILTIN_RULE:
            st.micro_steps += micro
            st.synthetic_steps += synth
        if self.trace is not None:
            label = "builtin" if rule == BUILTIN_RULE else rule
            shown = map_terms(shown, store.resolve)
            self.trace(f"rule={label} depth={depth} goal={pretty(shown)}")

    def _instantiate(self, node, base_rule, depth, shown, store):
        """Rules 4-6 and 10-12: replace bound variables by fresh ones.

        Returns the instantiated body and the number of variables processed.
        """
        kind, vars = node.kind, node.vars
        if kind is QuantKind.VECTOR:
            rest = vars[1:]
            body = type(node)(kind, rest, node.body) if rest else node.body
            self._fire(base_rule, 1, 1, depth, shown, store)
            return subst_simultaneous([(vars[0], self.fresh.rename(vars[0]))], body, self.fresh), 1
        pairs = [(v, self.fresh.rename(v)) for v in vars]
        if kind is QuantKind.BLOCK_SEQ:
            self._fire(base_rule + 1, len(vars), 1, depth, shown, store)
            return subst_sequential(pairs, node.body, self.fresh), len(vars)
        self._fire(base_rule + 2, len(vars), 1, depth, shown, store)
        return subst_simultaneous(pairs, node.body, self.fresh), len(vars)

    def step(self, frame, cont, store: BindingStore, path):
        """Expand one frame.

        Returns ``PRUNED`` at the depth limit, otherwise the list of successor
        ``(cont, path)`` pairs: empty on failure, several at a branch point.
        Deterministic steps may extend ``store``; branch points never do.
        """
        if frame[0] == GOAL:
            _, g, depth = frame
            kind = type(g)
            if kind is GAtom:
                d = depth + 1
                if self.max_depth is not None and d > self.max_depth:
                    return PRUNED
                atom = normalize(g.term, store)
                self._fire(7, 1, 1, d, GAtom(atom), store)
                if self.program is None:
                    return []
                return [(((BACKCHAIN, self.program, atom, d), cont), _bump(path, 1, 1, d))]
            if kind is And:
                n = len(g.goals)
                self._fire(8, n - 1, 1, depth, g, store)
                for sub in reversed(g.goals):
                    cont = ((GOAL, sub, depth), cont)
                return [(cont, _bump(path, n - 1, 1, depth))]
            if kind is Or:
                n = len(g.goals)
                self._fire(9, n - 1, 1, depth, g, store)
                p = _bump(path, n - 1, 1, depth)
                return [(((GOAL, sub, depth), cont), p) for sub in g.goals]
            if kind is Exists:
                body, micro = self._instantiate(g, 10, depth, g, store)
                return [(((GOAL, body, depth), cont), _bump(path, micro, 1, depth))]
            if kind is BuiltinCmp:
                self._fire(BUILTIN_RULE, 0, 0, depth, g, store)
                try:
                    ok = eval_compare(g.op, g.lhs, g.rhs, store)
                except ArithError as exc:
                    log.debug("comparison %s failed the branch: %s", pretty(g), exc)
                    return []
                return [(cont, path)] if ok else []
            raise TypeError(f"not a goal: {g!r}")

        _, d, atom, depth = frame
        kind = type(d)
        if kind is DAtom:
            self._fire(1, 1, 1, depth, GAtom(atom), store)
            if unify(d.term, atom, store, self.occurs):
                return [(cont, _bump(path, 1, 1, depth))]
            return []
        if kind is Implies:
            self._fire(2, 1, 1, depth, GAtom(atom), store)
            if unify(d.head, atom, store, self.occurs):
                return [(((GOAL, d.body, depth), cont), _bump(path, 1, 1, depth))]
            return []
        if kind is DAnd:
            n = len(d.clauses)
            self._fire(3, n - 1, 1, depth, GAtom(atom), store)
            p = _bump(path, n - 1, 1, depth)
            return [(((BACKCHAIN, c, atom, depth), cont), p) for c in d.clauses]
        if kind is Forall:
            body, micro = self._instantiate(d, 4, depth, GAtom(atom), store)
            return [(((BACKCHAIN, body, atom, depth), cont), _bump(path, micro, 1, depth))]
        raise TypeError(f"not a clause: {d!r}")


def make_solution(query: Query, store: BindingStore, path) -> Solution:
    micro, synth, depth = path
    stats = Stats(micro, synth, 1, depth)
    return Solution({v: normalize(v, store) for v in query.query_vars}, stats)


class Search:
    """A lazily evaluated proof search.

    Iterating yields :class:`Solution` and :class:`DepthExceeded` events.
    ``stats`` and ``complete`` describe the run once iteration has finished
    (or been abandoned).
    """

    def __init__(self, program: Program, query: Query | Goal, scheduler=Scheduler.SEQ,
                 limits: Limits = Limits(), *, occurs_check=True, trace=None,
                 workers: int | None = None, fresh: FreshSource = SESSION):
        self.program = program
        self.query = query if isinstance(query, Query) else Query.of(query)
        self.scheduler = Scheduler(scheduler)
        self.limits = limits
        self.occurs_check = occurs_check
        self.trace = trace
        self.workers = workers
        self.fresh = fresh
        self.stats = Stats()
        self.complete = True

    def machine(self, trace=None) -> Machine:
        return Machine(self.program, occurs_check=self.occurs_check,
                       max_depth=self.limits.max_depth, trace=trace, fresh=self.fresh)

    def __iter__(self) -> Iterator[Solution | DepthExceeded]:
        self.stats = Stats()
        self.complete = True
        if self.scheduler is Scheduler.SEQ:
            events = self._run_seq()
        else:
            from .parallel import run_parallel
            events = run_parallel(self)
        found = 0
        limit = self.limits.max_solutions
        try:
            for ev in events:
                if isinstance(ev, DepthExceeded):
                    self.complete = False
                else:
                    found += 1
                    self.stats.depth = max(self.stats.depth, ev.stats.depth)
                yield ev
                if limit is not None and found >= limit:
                    return
        finally:
            events.close()

    def solutions(self) -> Iterator[Solution]:
        return (ev for ev in self if isinstance(ev, Solution))

    def _run_seq(self):
        m = self.machine(self.trace)
        stats = self.stats
        m.stats = stats
        store = BindingStore()
        cont = ((GOAL, self.query.goal, 0), None)
        path = ZERO_PATH
        # each choice point: [trail mark, successors, index of next untried one]
        choices: list[list] = []
        pending = 0
        stats.max_width = 1
        while True:
            if cont is None:
                yield make_solution(self.query, store, path)
                out = []
            else:
                frame, rest = cont
                out = m.step(frame, rest, store, path)
                if out is PRUNED:
                    yield DepthExceeded(normalize(frame[1].term, store), frame[2] + 1)
                    out = []
            if len(out) == 1:
                cont, path = out[0]
                continue
            if out:
                choices.append([store.mark(), out, 1])
                pending += len(out) - 1
                stats.max_width = max(stats.max_width, pending + 1)
                cont, path = out[0]
                continue
            if not choices:
                return
            cp = choices[-1]
            store.undo(cp[0])
            cont, path = cp[1][cp[2]]
            cp[2] += 1
            pending -= 1
            if cp[2] == len(cp[1]):
                choices.pop()


def solve(program: Program, query, scheduler=Scheduler.SEQ, limits: Limits = Limits(),
          **options) -> Search:
    """Start a proof search for ``query`` against ``program``.

    The result is iterable (lazily) and exposes aggregate ``stats`` and the
    ``complete`` flag once drained.
    """
    return Search(program, query, scheduler, limits, **options)


def solve_all(program: Program, query, scheduler=Scheduler.SEQ, limits: Limits = Limits(),
              **options) -> tuple[list[Solution], Stats, bool]:
    search = Search(program, query, scheduler, limits, **options)
    solutions = list(search.solutions())
    return solutions, search.stats, search.complete
