"""The meta-level reading of a three-valued theory: treat each basic
valuation as a definite history and each statement "event E has value t" as
an ordinary event over that new space.

The lift turns value-statements into a two-valued theory inheriting the site
and the association structure, which is what makes it possible to ask the
standard checkers about claims like "the definiteness of a past record pins
down the setting".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .conditions import check_el_three_valued, check_freedom_of_settings
from .histories import AssociationMap, Event, HistorySpace
from .reports import ConditionReport, Witness
from .theory import OnticTheory, Setting, ThreeValuedTheory, correlated, weakly_correlated
from .valuations import FALSE, INDEFINITE, TRUE, is_definite_event

_VALUE_SUFFIX = {TRUE: "=1", INDEFINITE: "=1/2", FALSE: "=0"}


@dataclass(frozen=True)
class MetaTheory:
    """Two-valued theory over the basic valuations of a source theory.

    For each named source event E there are three meta-events "E=0",
    "E=1/2", "E=1", partitioning the meta space; the association map places
    them wherever E was associated.
    """

    source: ThreeValuedTheory
    theory: OnticTheory
    meta_events: dict[str, Event]

    def value_event(self, event_name: str, value) -> Event:
        return self.meta_events[event_name + _VALUE_SUFFIX[Fraction(value)]]

    def definiteness_event(self, event_name: str) -> Event:
        """The meta-event "E holds a definite value"."""
        return self.value_event(event_name, INDEFINITE).complement()


def meta_lift(source: ThreeValuedTheory, admit_definiteness_events: bool = False) -> MetaTheory:
    """Lift a three-valued theory to the meta level.

    One meta history per basic valuation, all of them allowed.  With
    `admit_definiteness_events`, each region additionally carries the
    "E is definite" meta-events of its events, the move that re-opens the
    meta-level objection.
    """
    meta_space = source.basic_space()
    meta_events: dict[str, Event] = {}
    entries = []
    named_by_mask = {e.mask: name for name, e in source.events.items()}
    for region, gens in source.delta.entries:
        row_events = []
        for g in gens:
            base = named_by_mask.get(g.mask, "{" + ",".join(g.members()) + "}")
            triple = {}
            for value, suffix in _VALUE_SUFFIX.items():
                mask = 0
                for i, v in enumerate(source.basics):
                    if v.value_of_mask(g.mask) == value:
                        mask |= 1 << i
                ev = Event(meta_space, mask)
                meta_events[base + suffix] = ev
                triple[value] = ev
            row_events.extend(triple.values())
            if admit_definiteness_events:
                definite = triple[INDEFINITE].complement()
                meta_events["?" + base] = definite
                row_events.append(definite)
        entries.append((region, row_events))
    delta = AssociationMap.build(source.site, entries)
    settings = []
    for s in source.settings:
        base = named_by_mask.get(s.event.mask)
        if base is None:
            continue
        settings.append(Setting(meta_events[base + "=1"], s.region))
    theory = OnticTheory(
        meta_space,
        meta_space.everything,
        source.site,
        delta,
        settings=settings,
        events=dict(meta_events),
    )
    return MetaTheory(source=source, theory=theory, meta_events=dict(meta_events))


@dataclass(frozen=True)
class MetaObjectionReport:
    """The three observations contrasting the meta level with the object level."""

    definiteness_correlated_with_setting: bool
    meta_freedom: ConditionReport
    object_freedom: ConditionReport

    def demonstrates_objection(self) -> bool:
        return (
            self.definiteness_correlated_with_setting
            and not self.meta_freedom.holds
            and self.object_freedom.holds
        )

    def to_json_dict(self) -> dict:
        return {
            "definiteness_correlated_with_setting": self.definiteness_correlated_with_setting,
            "meta_freedom": self.meta_freedom.to_json_dict(),
            "object_freedom": self.object_freedom.to_json_dict(),
            "demonstrates_objection": self.demonstrates_objection(),
        }


def demonstrate_meta_objection(model) -> MetaObjectionReport:
    """On the two-wing model: at the meta level the event "the record P_A1 is
    definite" is correlated with the setting being on, and admitting such
    definiteness events to the past algebra breaks meta-level freedom of
    settings, while the object-level three-valued freedom check still
    passes."""
    source = model.theory
    lifted = meta_lift(source, admit_definiteness_events=True)
    definite_pa1 = lifted.definiteness_event("P_A1")
    setting_on = lifted.value_event("A_s", TRUE)
    corr = correlated(lifted.theory, definite_pa1, setting_on)
    # cross-check against the object-level definiteness map
    assert definite_pa1.mask == is_definite_event(source, model.events["P_A1"]).mask
    meta_freedom = check_freedom_of_settings(lifted.theory)
    object_freedom = check_freedom_of_settings(source)
    return MetaObjectionReport(
        definiteness_correlated_with_setting=corr,
        meta_freedom=meta_freedom,
        object_freedom=object_freedom,
    )
