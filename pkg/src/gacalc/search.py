"""Database search by one oracle application and one filtered readout.

The data subspace is the first n dimensions; one extra dimension above it
plays the oracle flag.  Each database element x contributes the two-term
pattern ``coded(x) * (1 - e_flag)``, which the oracle operator scales by
(-1)^f(x), so the half-difference filter keeps exactly the marked elements
and the answer is read straight off the surviving data blades.

Toggling the flag dimension is sign-free because it is the highest index in
the layout: appending or removing the final factor of an ascending blade
crosses no other factors.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable

from .core import Multivector
from .encoding import SubspaceLayout, decode, encode


class MembershipOracle:
    """Black-box 0/1 predicate with audit counters.

    ``op_count`` increments once per whole-operator application;
    ``eval_count`` counts pointwise predicate evaluations, memoized per
    operator application so each distinct argument is paid for at most once.
    """

    def __init__(self, f: Callable[[int], int]):
        self._f = f
        self.eval_count = 0
        self.op_count = 0

    def evaluate(self, x: int) -> int:
        self.eval_count += 1
        return 1 if self._f(x) else 0


class SearchLayout:
    """n data dimensions plus the oracle flag dimension at index n."""

    def __init__(self, n: int):
        if n <= 0:
            raise ValueError("data width must be positive")
        self.n = n
        self.layout = SubspaceLayout([("data", n)], tail=1)
        self.oracle_dim = n

    @property
    def dimension(self) -> int:
        return self.layout.total_dim


def build_initial_state(elements: Iterable[int], sl: SearchLayout) -> Multivector:
    """Superpose ``coded(x) * (1 - e_flag)`` over every database element x."""
    terms: dict[int, Fraction] = {}
    one = Fraction(1)
    flag = 1 << sl.oracle_dim
    for x in set(elements):
        mask = encode(x, "data", sl.layout)
        terms[mask] = one
        terms[mask | flag] = -one
    return Multivector(sl.dimension, terms)


def apply_oracle(oracle: MembershipOracle, state: Multivector, sl: SearchLayout) -> Multivector:
    """One oracle-operator application: toggle the flag on every marked term.

    Per term, the data value x is decoded and the flag dimension's membership
    is flipped iff f(x) = 1; coefficients are untouched.  Pointwise f calls
    are memoized for the duration of this application.
    """
    if state.dimension != sl.dimension:
        raise ValueError("state does not live in this search layout")
    oracle.op_count += 1
    memo: dict[int, int] = {}
    flag = 1 << sl.oracle_dim
    terms: dict[int, Fraction] = {}
    for mask, coeff in state.terms.items():
        x = decode(mask, "data", sl.layout)
        fx = memo.get(x)
        if fx is None:
            fx = memo[x] = oracle.evaluate(x)
        out = mask ^ flag if fx else mask
        prev = terms.get(out)
        terms[out] = coeff if prev is None else prev + coeff
    return Multivector(sl.dimension, terms)


def half_difference_filter(oracle: MembershipOracle, state: Multivector, sl: SearchLayout) -> Multivector:
    """The projector (state - oracle(state)) / 2; one oracle-operator application.

    On database states it keeps exactly the marked elements' term patterns.
    """
    return (state - apply_oracle(oracle, state, sl)).scale(Fraction(1, 2))


def filter_marked(oracle: MembershipOracle, elements: Iterable[int], sl: SearchLayout) -> Multivector:
    """Build the database state and keep its marked part."""
    return half_difference_filter(oracle, build_initial_state(elements, sl), sl)


def extract_matches(state: Multivector, sl: SearchLayout) -> set[int]:
    """Read the data subspace of every term, deduplicated."""
    return {decode(mask, "data", sl.layout) for mask in state.masks()}


def run_search(elements: Iterable[int], f: Callable[[int], int], n: int) -> tuple[set[int], MembershipOracle]:
    """Full pipeline: initial state, one filtered oracle pass, readout."""
    sl = SearchLayout(n)
    oracle = MembershipOracle(f)
    kept = filter_marked(oracle, elements, sl)
    return extract_matches(kept, sl), oracle
