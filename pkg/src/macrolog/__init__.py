"""Horn-clause logic programming with macro connectives.

n-ary conjunction and disjunction, and vector, block-sequential and
block-parallel quantifiers, executed by goal reduction and backchaining.
"""

from .desugar import desugar, is_micro, macroize, set_binder_kind
from .engine import (
    ArithError, BindingStore, eval_arith, eval_compare, normalize, rename_clause,
    subst_simultaneous, unify,
)
from .parser import ParseError, parse_clause, parse_goal, parse_program, parse_term
from .pretty import pretty
from .solver import (
    DepthExceeded, Limits, Query, Scheduler, Search, Solution, Stats, answer_multiset,
    solve, solve_all,
)
from .syntax import (
    And, BuiltinCmp, DAnd, DAtom, Exists, Forall, GAtom, Implies, Or, Program, QuantKind,
    alpha_equal, canonical, flatten, free_vars,
)
from .terms import SESSION, Atom, Compound, FreshSource, Int, Var

__all__ = [
    "alpha_equal",
    "And",
    "answer_multiset",
    "ArithError",
    "Atom",
    "BindingStore",
    "BuiltinCmp",
    "canonical",
    "Compound",
    "DAnd",
    "DAtom",
    "DepthExceeded",
    "desugar",
    "eval_arith",
    "eval_compare",
    "Exists",
    "flatten",
    "Forall",
    "free_vars",
    "FreshSource",
    "GAtom",
    "Implies",
    "Int",
    "is_micro",
    "Limits",
    "macroize",
    "normalize",
    "Or",
    "parse_clause",
    "parse_goal",
    "parse_program",
    "parse_term",
    "ParseError",
    "pretty",
    "Program",
    "QuantKind",
    "Query",
    "rename_clause",
    "Scheduler",
    "Search",
    "SESSION",
    "set_binder_kind",
    "Solution",
    "solve",
    "solve_all",
    "Stats",
    "subst_simultaneous",
    "unify",
    "Var",
]

__version__ = "0.1.0"
