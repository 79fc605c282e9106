"""Shared fixtures data: the binomial program and its arithmetic oracle."""

from functools import lru_cache
from math import factorial
from pathlib import Path

from corpus import corpus

DATA = Path(__file__).parent / "data"
BINOMIAL_PATH = DATA / "binomial.pl"
BINOMIAL = BINOMIAL_PATH.read_text(encoding="utf-8")

CORPUS_SIZE = 120
CORPUS_SEED = 20240917


def choose(n, k):
    """n!/(k!(n-k)!), written out so it does not share code with the solver."""
    return factorial(n) // (factorial(k) * factorial(n - k))


@lru_cache(maxsize=None)
def shared_corpus():
    return tuple(corpus(CORPUS_SIZE, CORPUS_SEED))
