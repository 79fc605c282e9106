"""First-order terms: variables, integers, atoms and compound terms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "Var", "Int", "Atom", "Compound", "Term",
    "FreshSource", "SESSION", "term_vars", "ARITH_FUNCTORS",
]

ARITH_FUNCTORS = frozenset({"+", "-", "*"})


@dataclass(frozen=True, eq=False, slots=True)
class Var:
    """A logic variable.  Identity is the id; the name is only for display."""

    name: str
    id: int

    def __eq__(self, other):
        return isinstance(other, Var) and other.id == self.id

    def __hash__(self):
        return hash(("Var", self.id))

    def __repr__(self):
        return f"Var({self.name!r}, {self.id})"


@dataclass(frozen=True, slots=True)
class Int:
    value: int

    def __repr__(self):
        return f"Int({self.value})"


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError(f"compound {self.functor!r} needs at least one argument; use Atom")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self):
        return f"Compound({self.functor!r}, {list(self.args)!r})"


Term = Union[Var, Int, Atom, Compound]


class FreshSource:
    """Hands out variables with ids that are never reused within a session."""

    def __init__(self, start: int = 1):
        self._counter = itertools.count(start)

    def fresh(self, name: str = "_") -> Var:
        # itertools.count.__next__ is atomic under the GIL, so workers may share one source
        return Var(name, next(self._counter))

    def rename(self, var: Var) -> Var:
        return self.fresh(var.name)


SESSION = FreshSource()


def term_vars(t: Term) -> Iterator[Var]:
    """Yield the variables of ``t`` left to right, repeats included."""
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))
