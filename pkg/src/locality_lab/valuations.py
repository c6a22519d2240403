"""Two- and three-valued truth valuations on events.

A two-valued valuation is a history: an event is true iff the history lies in
it.  A three-valued valuation is represented by its derivation set X, a
non-empty set of histories: an event A takes value 1 when X is inside A,
0 when X is inside the complement of A, and 1/2 ("indefinite") when X
straddles A.  All well-formedness is by construction; there are no
free-floating value tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence

from .histories import Event, HistoryError, HistorySpace

if TYPE_CHECKING:  # pragma: no cover
    from .theory import ThreeValuedTheory

TRUE = Fraction(1)
FALSE = Fraction(0)
INDEFINITE = Fraction(1, 2)

TruthValue = Fraction


@dataclass(frozen=True)
class TwoValuation:
    """The classical valuation of a single history."""

    space: HistorySpace
    history: str

    def value(self, e: Event) -> TruthValue:
        if e.space != self.space:
            raise HistoryError("event on a different history space")
        return TRUE if (e.mask >> self.space.index(self.history)) & 1 else FALSE


@dataclass(frozen=True)
class ThreeValuation:
    """Three-valued valuation derived from a set of histories."""

    space: HistorySpace
    derivation_mask: int
    name: str | None = None

    def __post_init__(self) -> None:
        if self.derivation_mask == 0:
            raise HistoryError("derivation set must be non-empty")
        if self.derivation_mask & ~self.space.full_mask:
            raise HistoryError("derivation set outside its history space")

    @staticmethod
    def from_histories(space: HistorySpace, names: Iterable[str], name: str | None = None) -> "ThreeValuation":
        return ThreeValuation(space, space.mask_of(names), name)

    def derivation_set(self) -> tuple[str, ...]:
        return self.space.names_of(self.derivation_mask)

    def value(self, e: Event) -> TruthValue:
        return evaluate(self, e)

    def value_of_mask(self, mask: int) -> TruthValue:
        x = self.derivation_mask
        if x & ~mask == 0:
            return TRUE
        if x & mask == 0:
            return FALSE
        return INDEFINITE

    def is_definite_everywhere(self) -> bool:
        """True iff no event of pow(space) gets value 1/2, i.e. X is a singleton."""
        return self.derivation_mask & (self.derivation_mask - 1) == 0

    def label(self) -> str:
        return self.name if self.name is not None else "{" + ",".join(self.derivation_set()) + "}"


def evaluate(v: ThreeValuation, e: Event) -> TruthValue:
    """Value of event e under v: 1 / 0 when the derivation set is inside
    e / its complement, else 1/2."""
    if e.space != v.space:
        raise HistoryError("event on a different history space")
    return v.value_of_mask(e.mask)


def coarse_grain(vs: Sequence[ThreeValuation], name: str | None = None) -> ThreeValuation:
    """Valuation derived from the union of the inputs' derivation sets.

    The result gives a definite value exactly where all inputs agree on it.
    """
    if not vs:
        raise HistoryError("coarse_grain needs at least one valuation")
    space = vs[0].space
    mask = 0
    for v in vs:
        if v.space != space:
            raise HistoryError("valuations on different history spaces")
        mask |= v.derivation_mask
    return ThreeValuation(space, mask, name)


def cyclical_negation(v: TruthValue) -> TruthValue:
    """1 -> 1/2, 1/2 -> 0, 0 -> 1."""
    if v == TRUE:
        return INDEFINITE
    if v == INDEFINITE:
        return FALSE
    if v == FALSE:
        return TRUE
    raise ValueError(f"not a truth value: {v!r}")


def _realizable_conjunction_triples() -> frozenset[tuple[TruthValue, TruthValue, TruthValue]]:
    # Exhaustive over a 4-history scratch space: every relation a derivation
    # set can bear to two events is realized by which of the four membership
    # signatures it touches, so this enumeration is complete.
    space = HistorySpace(["s0", "s1", "s2", "s3"])
    a = space.event_from_mask(0b0011)  # histories in A: s0, s1
    b = space.event_from_mask(0b0101)  # histories in B: s0, s2
    triples = set()
    for bits in range(1, 16):
        v = ThreeValuation(space, bits)
        triples.add((v.value(a), v.value(b), v.value(a & b)))
    return frozenset(triples)


_CONJUNCTION_TRIPLES = _realizable_conjunction_triples()


def check_conjunction_table(a_val: TruthValue, b_val: TruthValue, meet_val: TruthValue) -> bool:
    """Whether some derivation set realizes (value(A), value(B), value(A and B)).

    Definite inputs follow the classical table; (1/2, 1/2, 1) is impossible,
    while (1/2, 1/2, 0) and (1/2, 1/2, 1/2) are both realizable.
    """
    return (Fraction(a_val), Fraction(b_val), Fraction(meet_val)) in _CONJUNCTION_TRIPLES


def is_complementary(theory: "ThreeValuedTheory", a: Event, b: Event) -> bool:
    """True iff in every basic valuation exactly one of a, b is indefinite."""
    for v in theory.basics:
        if (v.value(a) == INDEFINITE) != (v.value(b) != INDEFINITE):
            return False
    return True


def is_definite_event(theory: "ThreeValuedTheory", e: Event) -> Event:
    """The meta-event "e holds a definite value": the set of basic valuations
    giving e a value other than 1/2, as an event over the theory's basic
    space (one history per basic valuation)."""
    meta = theory.basic_space()
    mask = 0
    for i, v in enumerate(theory.basics):
        if v.value(e) != INDEFINITE:
            mask |= 1 << i
    return Event(meta, mask)


def all_valuations(space: HistorySpace) -> Iterable[ThreeValuation]:
    """Every three-valued valuation on the space (exponential; tests only)."""
    for bits in range(1, space.full_mask + 1):
        yield ThreeValuation(space, bits)


def all_events(space: HistorySpace) -> Iterable[Event]:
    """Every event on the space (exponential; tests only)."""
    for mask in range(space.full_mask + 1):
        yield Event(space, mask)


def value_vector(basics: Sequence[ThreeValuation], mask: int) -> tuple[TruthValue, ...]:
    """Values of the event with the given mask across a list of valuations."""
    return tuple(v.value_of_mask(mask) for v in basics)


def definite_subsets(values: Iterable[TruthValue]) -> tuple[int, int]:
    """(ones, zeros) bitmasks of positions holding value 1 resp. 0."""
    ones = zeros = 0
    for i, t in enumerate(values):
        if t == TRUE:
            ones |= 1 << i
        elif t == FALSE:
            zeros |= 1 << i
    return ones, zeros


def iter_nonempty_subsets(items: Sequence) -> Iterable[tuple]:
    for r in range(1, len(items) + 1):
        yield from itertools.combinations(items, r)
