"""Theory containers, correlation in both logics, the derived epistemic
theory, ontic-definiteness checking, and small-theory enumeration.

An ontic theory is a history space with a set of allowed histories, a causal
site, and an association map; correlation of events means equal truth value
on every allowed history.  A three-valued theory replaces allowed histories
with a list of basic (underivable) three-valued valuations; correlation means
equal value under every basic valuation, which suffices because coarse-
grainings preserve agreement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .histories import AssociationMap, Event, HistoryError, HistorySpace, Subalgebra, contains
from .reports import ConditionReport, Witness
from .sites import CausalSite, Region
from .valuations import FALSE, INDEFINITE, TRUE, ThreeValuation, coarse_grain

ENUMERATION_OMEGA_LIMIT = 5


class TheoryError(ValueError):
    """Invalid theory construction."""


@dataclass(frozen=True)
class Setting:
    """A declared free-setting generator and its home region."""

    event: Event
    region: Region


def _auto_name_events(delta: AssociationMap, settings: Sequence[Setting]) -> dict[str, Event]:
    named: dict[str, Event] = {}
    seen: dict[int, str] = {}
    counter = 0
    for region, gens in delta.entries:
        for g in gens:
            if g.mask not in seen:
                name = f"E{counter}"
                counter += 1
                seen[g.mask] = name
                named[name] = g
    for s in settings:
        if s.event.mask not in seen:
            name = f"E{counter}"
            counter += 1
            seen[s.event.mask] = name
            named[name] = s.event
    return named


class OnticTheory:
    """Two-valued theory: history space, allowed set, site, association map,
    declared settings, and a named event vocabulary for reports."""

    __slots__ = ("space", "theta", "site", "delta", "settings", "events")

    def __init__(
        self,
        space: HistorySpace,
        theta: Event,
        site: CausalSite,
        delta: AssociationMap,
        settings: Sequence[Setting] = (),
        events: Mapping[str, Event] | None = None,
    ):
        if theta.space != space:
            raise TheoryError("theta lives on a different history space")
        if theta.is_empty():
            raise TheoryError("theta must be non-empty")
        if delta.site != site:
            raise TheoryError("association map on a different site")
        self.space = space
        self.theta = theta
        self.site = site
        self.delta = delta
        self.settings = tuple(settings)
        for s in self.settings:
            alg = delta.subalgebra_within(space, s.region.mask)
            if not alg.contains_mask(s.event.mask):
                raise TheoryError(
                    f"setting {s.event!r} is not associated to its home region {sorted(s.region.members)}"
                )
        self.events = dict(events) if events is not None else _auto_name_events(delta, self.settings)
        for name, e in self.events.items():
            if e.space != space:
                raise TheoryError(f"named event {name!r} on a different history space")

    def subalgebra_of(self, region: Region) -> Subalgebra:
        return self.delta.subalgebra_within(self.space, region.mask)

    def subalgebra_within(self, region_mask: int) -> Subalgebra:
        return self.delta.subalgebra_within(self.space, region_mask)

    def theta_names(self) -> tuple[str, ...]:
        return self.theta.members()

    def event_name(self, e: Event) -> str:
        for name, known in self.events.items():
            if known.mask == e.mask:
                return name
        return "{" + ",".join(e.members()) + "}"

    def canonical_form(self) -> tuple:
        return (
            "ontic",
            tuple(sorted(self.site.points)),
            tuple(sorted(self.site.strict_pairs())),
            tuple(sorted(self.space.names)),
            tuple(sorted(self.theta.members())),
            tuple(sorted((n, tuple(sorted(e.members()))) for n, e in self.events.items())),
            _canonical_delta(self),
            tuple(
                sorted(
                    (self.event_name(s.event), tuple(sorted(s.region.members)))
                    for s in self.settings
                )
            ),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, OnticTheory) and self.canonical_form() == other.canonical_form()

    def __hash__(self) -> int:
        return hash(self.canonical_form())


class ThreeValuedTheory:
    """Three-valued theory: site, association map, declared settings, and the
    basic (underivable) valuations that generate the allowed set."""

    __slots__ = ("space", "site", "delta", "settings", "basics", "events", "_basic_space")

    def __init__(
        self,
        space: HistorySpace,
        site: CausalSite,
        delta: AssociationMap,
        basics: Sequence[ThreeValuation],
        settings: Sequence[Setting] = (),
        events: Mapping[str, Event] | None = None,
        validate_basicness: bool = True,
    ):
        if not basics:
            raise TheoryError("a three-valued theory needs at least one basic valuation")
        for v in basics:
            if v.space != space:
                raise TheoryError("basic valuation on a different history space")
        if delta.site != site:
            raise TheoryError("association map on a different site")
        self.space = space
        self.site = site
        self.delta = delta
        self.basics = tuple(
            v if v.name is not None else ThreeValuation(space, v.derivation_mask, f"v{i+1}")
            for i, v in enumerate(basics)
        )
        names = [v.name for v in self.basics]
        if len(set(names)) != len(names):
            raise TheoryError("duplicate basic valuation names")
        if validate_basicness:
            masks = [v.derivation_mask for v in self.basics]
            for i, m in enumerate(masks):
                others = 0
                for j, mj in enumerate(masks):
                    if j != i and mj & ~m == 0:
                        others |= mj
                if others == m:
                    raise TheoryError(
                        f"valuation {self.basics[i].label()} is derivable from the others (not basic)"
                    )
        self.settings = tuple(settings)
        for s in self.settings:
            alg = delta.subalgebra_within(space, s.region.mask)
            if not alg.contains_mask(s.event.mask):
                raise TheoryError(
                    f"setting {s.event!r} is not associated to its home region {sorted(s.region.members)}"
                )
        self.events = dict(events) if events is not None else _auto_name_events(delta, self.settings)
        self._basic_space = None

    def basic_space(self) -> HistorySpace:
        """History space with one point per basic valuation (the meta space)."""
        if self._basic_space is None:
            self._basic_space = HistorySpace([v.label() for v in self.basics])
        return self._basic_space

    def values(self, e: Event) -> tuple:
        return tuple(v.value(e) for v in self.basics)

    def values_of_mask(self, mask: int) -> tuple:
        return tuple(v.value_of_mask(mask) for v in self.basics)

    def subalgebra_of(self, region: Region) -> Subalgebra:
        return self.delta.subalgebra_within(self.space, region.mask)

    def subalgebra_within(self, region_mask: int) -> Subalgebra:
        return self.delta.subalgebra_within(self.space, region_mask)

    def event_name(self, e: Event) -> str:
        for name, known in self.events.items():
            if known.mask == e.mask:
                return name
        return "{" + ",".join(e.members()) + "}"

    def canonical_form(self) -> tuple:
        return (
            "three-valued",
            tuple(sorted(self.site.points)),
            tuple(sorted(self.site.strict_pairs())),
            tuple(sorted(self.space.names)),
            tuple(sorted((v.label(), tuple(sorted(v.derivation_set()))) for v in self.basics)),
            tuple(sorted((n, tuple(sorted(e.members()))) for n, e in self.events.items())),
            _canonical_delta(self),
            tuple(
                sorted(
                    (self.event_name(s.event), tuple(sorted(s.region.members)))
                    for s in self.settings
                )
            ),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ThreeValuedTheory) and self.canonical_form() == other.canonical_form()

    def __hash__(self) -> int:
        return hash(self.canonical_form())


Theory = OnticTheory | ThreeValuedTheory


def _canonical_delta(theory: Theory) -> tuple:
    rows = []
    for region, gens in theory.delta.entries:
        for g in gens:
            rows.append((theory.event_name(g), tuple(sorted(region.members))))
    return tuple(sorted(rows))


def correlated(theory: Theory, a: Event, b: Event) -> bool:
    """Equal truth values on every allowed history (ontic) or every basic
    valuation (three-valued)."""
    if isinstance(theory, OnticTheory):
        t = theory.theta.mask
        return a.mask & t == b.mask & t
    return all(v.value_of_mask(a.mask) == v.value_of_mask(b.mask) for v in theory.basics)


def anticorrelated(theory: Theory, a: Event, b: Event) -> bool:
    return correlated(theory, a, b.complement())


def weakly_correlated(theory: Theory, a: Event, b: Event) -> bool:
    """a is weakly correlated to b: truth of a forces truth of b.

    Ontic form: a's allowed part is inside b's.  Three-valued form: b valued
    0 forces a valued 0, across all basic valuations (the two agree on
    singleton derivation sets).
    """
    if isinstance(theory, OnticTheory):
        t = theory.theta.mask
        return a.mask & t & ~b.mask == 0
    for v in theory.basics:
        if v.value_of_mask(b.mask) == FALSE and v.value_of_mask(a.mask) != FALSE:
            return False
    return True


def derive_three_valued(ontic: OnticTheory) -> ThreeValuedTheory:
    """Epistemic theory of an ontic one: one basic valuation per allowed
    history (all coarse-grainings are recoverable and not materialized)."""
    basics = [
        ThreeValuation(ontic.space, 1 << ontic.space.index(h), name=h)
        for h in ontic.theta.members()
    ]
    return ThreeValuedTheory(
        ontic.space,
        ontic.site,
        ontic.delta,
        basics,
        settings=ontic.settings,
        events=ontic.events,
        validate_basicness=False,
    )


def check_ontic_definiteness(theory: ThreeValuedTheory) -> ConditionReport:
    """Whether some set of fully definite histories generates every allowed
    indefinite valuation by coarse-graining.

    A candidate history can only enter such a set if its singleton valuation
    is itself allowed, so the maximal candidate is the union of singleton-
    derivation basics; the condition holds iff every indefinite basic's
    derivation set lies inside it.
    """
    candidate = 0
    for v in theory.basics:
        if v.is_definite_everywhere():
            candidate |= v.derivation_mask
    detail = []
    for v in theory.basics:
        if v.is_definite_everywhere():
            continue
        ok = v.derivation_mask & ~candidate == 0
        detail.append((v.label(), ok))
        if not ok:
            missing = theory.space.names_of(v.derivation_mask & ~candidate)
            return ConditionReport(
                condition="ontic-definiteness",
                holds=False,
                witness=Witness(
                    description=(
                        "indefinite basic valuation is not a coarse-graining of "
                        "allowed definite histories"
                    ),
                    valuations=(v.label(),),
                    data={
                        "underivable_histories": missing,
                        "candidate_theta": theory.space.names_of(candidate),
                    },
                ),
                detail=tuple(detail),
            )
    return ConditionReport(condition="ontic-definiteness", holds=True, detail=tuple(detail))


def check_ontic_definiteness_by_search(theory: ThreeValuedTheory) -> bool:
    """Literal lattice search over candidate history subsets; exponential, so
    it refuses beyond |Omega| = 12.  Kept as an oracle for the closed form."""
    n = len(theory.space)
    if n > 12:
        raise TheoryError("lattice search limited to 12 histories")
    allowed_masks = set()
    for r in range(1, len(theory.basics) + 1):
        for combo in itertools.combinations(theory.basics, r):
            allowed_masks.add(coarse_grain(combo).derivation_mask)
    indefinite = [v.derivation_mask for v in theory.basics if not v.is_definite_everywhere()]
    for theta in range(1, 1 << n):
        singles = [1 << i for i in range(n) if (theta >> i) & 1]
        if not all(s in allowed_masks for s in singles):
            continue
        if all(m & ~theta == 0 for m in indefinite):
            return True
    return not indefinite if not indefinite else False


@dataclass(frozen=True)
class DeltaFamily:
    """Per-point candidate generator events: one generator is placed on each
    point, swept over the point's candidate list."""

    site: CausalSite
    candidates: tuple[tuple[int, ...], ...]  # candidates[i]: event masks for point i

    def instance_count(self) -> int:
        n = 1
        for c in self.candidates:
            n *= len(c)
        return n

    def instances(self, space: HistorySpace) -> Iterator[AssociationMap]:
        point_regions = [self.site.region([p]) for p in self.site.points]
        for choice in itertools.product(*self.candidates):
            entries = tuple(
                (point_regions[i], (Event(space, mask),)) for i, mask in enumerate(choice)
            )
            yield AssociationMap(self.site, entries)


def _event_pool(omega_size: int, limit: int | None) -> tuple[int, ...]:
    """Deterministic candidate masks, smallest-and-largest events first."""
    full = (1 << omega_size) - 1
    masks = sorted(range(full + 1), key=lambda m: (min(bin(m).count("1"), omega_size - bin(m).count("1")), m))
    if limit is not None:
        masks = masks[:limit]
    return tuple(masks)


def standard_delta_family(site: CausalSite, omega_size: int, per_point_limit: int | None = None) -> DeltaFamily:
    """One generator per point, swept over a deterministic pool of events."""
    pool = _event_pool(omega_size, per_point_limit)
    return DeltaFamily(site, tuple(pool for _ in site.points))


def enumerate_theories(
    site: CausalSite,
    omega_size: int,
    delta_family: DeltaFamily,
) -> Iterator[OnticTheory]:
    """Every ontic theory with the given history-space size, every non-empty
    allowed set, and the association map drawn from the family; deterministic
    order, association-map major so subalgebra caches are shared."""
    if omega_size > ENUMERATION_OMEGA_LIMIT:
        raise TheoryError(
            f"enumeration limited to {ENUMERATION_OMEGA_LIMIT} histories, got {omega_size}"
        )
    if omega_size < 1:
        raise TheoryError("omega_size must be at least 1")
    space = HistorySpace([f"g{i+1}" for i in range(omega_size)])
    for delta in delta_family.instances(space):
        for theta_mask in range(1, space.full_mask + 1):
            yield OnticTheory(space, Event(space, theta_mask), site, delta)
