"""History spaces, events as history subsets, subalgebras with atoms, and the
region-to-subalgebra association map.

Events are stored as bitmasks over the (ordered) history names, so all the
Boolean operations the checkers run are integer arithmetic.  A subalgebra is
represented by its atoms: the partition of the history space induced by its
generating events.  The association map declares generator events on regions;
the subalgebra of a query region is generated by every declared event whose
home region lies inside the query, which makes the map monotone under region
inclusion by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .sites import CausalSite, Region


class HistoryError(ValueError):
    """Invalid history-space construction or cross-space usage."""


class HistorySpace:
    """Ordered finite list of history names; index = bit position."""

    __slots__ = ("names", "_index", "full_mask")

    def __init__(self, names: Sequence[str]):
        nm = tuple(names)
        if not nm:
            raise HistoryError("history space must be non-empty")
        if len(set(nm)) != len(nm):
            raise HistoryError("duplicate history names")
        self.names = nm
        self._index = {h: i for i, h in enumerate(nm)}
        self.full_mask = (1 << len(nm)) - 1

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HistorySpace) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"HistorySpace({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise HistoryError(f"unknown history {name!r}") from None

    def mask_of(self, names: Iterable[str]) -> int:
        mask = 0
        for h in names:
            mask |= 1 << self.index(h)
        return mask

    def names_of(self, mask: int) -> tuple[str, ...]:
        return tuple(n for i, n in enumerate(self.names) if (mask >> i) & 1)

    def event(self, names: Iterable[str]) -> "Event":
        return Event(self, self.mask_of(names))

    def event_from_mask(self, mask: int) -> "Event":
        return Event(self, mask & self.full_mask)

    @property
    def empty(self) -> "Event":
        return Event(self, 0)

    @property
    def everything(self) -> "Event":
        return Event(self, self.full_mask)


@dataclass(frozen=True)
class Event:
    """A subset of the history space, i.e. a proposition."""

    space: HistorySpace
    mask: int

    def __post_init__(self) -> None:
        if self.mask & ~self.space.full_mask:
            raise HistoryError("event mask outside its history space")

    def members(self) -> tuple[str, ...]:
        return self.space.names_of(self.mask)

    def complement(self) -> "Event":
        return Event(self.space, ~self.mask & self.space.full_mask)

    def __and__(self, other: "Event") -> "Event":
        _same_space(self, other)
        return Event(self.space, self.mask & other.mask)

    def __or__(self, other: "Event") -> "Event":
        _same_space(self, other)
        return Event(self.space, self.mask | other.mask)

    def issubset(self, other: "Event") -> bool:
        _same_space(self, other)
        return self.mask & ~other.mask == 0

    def is_empty(self) -> bool:
        return self.mask == 0

    def __repr__(self) -> str:
        return f"Event({list(self.members())!r})"


def _same_space(a: Event, b: Event) -> None:
    if a.space is not b.space and a.space != b.space:
        raise HistoryError("events live on different history spaces")


class Subalgebra:
    """Boolean subalgebra of pow(space), given by its atoms.

    An event belongs to the subalgebra iff it is a union of atoms.
    """

    __slots__ = ("space", "atoms", "_atom_of")

    def __init__(self, space: HistorySpace, atoms: Sequence[int]):
        self.space = space
        ordered = tuple(sorted(atoms))
        union = 0
        for a in ordered:
            if a == 0:
                raise HistoryError("empty atom")
            if union & a:
                raise HistoryError("atoms overlap")
            union |= a
        if union != space.full_mask:
            raise HistoryError("atoms do not cover the history space")
        self.atoms = ordered
        self._atom_of = None

    def atom_of_table(self) -> tuple[int, ...]:
        """For each history index, the index of the atom containing it."""
        if self._atom_of is None:
            table = [0] * len(self.space)
            for ai, a in enumerate(self.atoms):
                m = a
                while m:
                    h = (m & -m).bit_length() - 1
                    m &= m - 1
                    table[h] = ai
            self._atom_of = tuple(table)
        return self._atom_of

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subalgebra) and self.space == other.space and self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash((self.space, self.atoms))

    def __repr__(self) -> str:
        return f"Subalgebra(atoms={[self.space.names_of(a) for a in self.atoms]})"

    def contains_mask(self, mask: int) -> bool:
        covered = 0
        for a in self.atoms:
            if a & ~mask == 0:
                covered |= a
        return covered == mask

    def events(self) -> list[Event]:
        """Every member event (2**len(atoms) of them); small algebras only."""
        out = []
        for bits in range(1 << len(self.atoms)):
            mask = 0
            for i, a in enumerate(self.atoms):
                if (bits >> i) & 1:
                    mask |= a
            out.append(Event(self.space, mask))
        return out

    def refines(self, coarser: "Subalgebra") -> bool:
        """True iff every atom of `coarser` is a union of atoms of self."""
        return all(self.contains_mask(a) for a in coarser.atoms)


def contains(alg: Subalgebra, e: Event) -> bool:
    """True iff e is a union of atoms of alg."""
    if e.space != alg.space:
        raise HistoryError("event not on the subalgebra's space")
    return alg.contains_mask(e.mask)


def full_specifications(alg: Subalgebra) -> list[Event]:
    """The atoms of alg as events: the finest propositions it can state."""
    return [Event(alg.space, a) for a in alg.atoms]


def generate_subalgebra(space: HistorySpace, generators: Sequence[Event]) -> Subalgebra:
    """Smallest subalgebra containing the generators.

    Atoms are the classes of histories agreeing on membership in every
    generator.  No generators gives the trivial subalgebra {empty, everything}.
    """
    for g in generators:
        if g.space != space:
            raise HistoryError("generator on a different history space")
    sigs: dict[tuple[bool, ...], int] = {}
    for i in range(len(space)):
        bit = 1 << i
        sig = tuple(bool(g.mask & bit) for g in generators)
        sigs[sig] = sigs.get(sig, 0) | bit
    return Subalgebra(space, tuple(sigs.values()))


@dataclass(frozen=True)
class AssociationMap:
    """Assignment of generator events to regions.

    An event is associated to a query region iff it lies in the subalgebra
    generated by all declared events whose home region is inside the query.
    """

    site: CausalSite
    entries: tuple[tuple[Region, tuple[Event, ...]], ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        for region, gens in self.entries:
            if region.site != self.site:
                raise HistoryError("association entry region on a different site")
            for g in gens:
                if gens and g.space != gens[0].space:
                    raise HistoryError("association generators on mixed history spaces")

    @staticmethod
    def build(site: CausalSite, entries: Iterable[tuple[Region, Iterable[Event]]]) -> "AssociationMap":
        packed = tuple((region, tuple(gens)) for region, gens in entries)
        return AssociationMap(site, packed)

    def generators_within(self, region_mask: int) -> tuple[Event, ...]:
        key = ("gens", region_mask)
        got = self._cache.get(key)
        if got is None:
            got = tuple(
                g
                for region, gens in self.entries
                if region.mask & ~region_mask == 0
                for g in gens
            )
            self._cache[key] = got
        return got

    def subalgebra_within(self, space: HistorySpace, region_mask: int) -> Subalgebra:
        key = ("alg", space, region_mask)
        got = self._cache.get(key)
        if got is None:
            got = generate_subalgebra(space, self.generators_within(region_mask))
            self._cache[key] = got
        return got


def subalgebra_of(delta: AssociationMap, space: HistorySpace, region: Region) -> Subalgebra:
    """Subalgebra associated to `region`: generated by every declared event
    whose home region is a subset of it."""
    if region.site != delta.site:
        raise HistoryError("query region on a different site")
    return delta.subalgebra_within(space, region.mask)
