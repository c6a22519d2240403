"""Shared test utilities: naive re-implementations used as independent
oracles for the optimized checkers, and a seeded random-theory generator."""

from __future__ import annotations

import random
from fractions import Fraction

from locality_lab.histories import AssociationMap, Event, HistorySpace, generate_subalgebra
from locality_lab.probability import Distribution
from locality_lab.sites import CausalSite
from locality_lab.theory import OnticTheory, Setting, TheoryError, ThreeValuedTheory
from locality_lab.valuations import INDEFINITE, ThreeValuation


def algebra_events(theory, region_mask):
    sub = theory.delta.subalgebra_within(theory.space, region_mask)
    events = []
    for bits in range(1 << len(sub.atoms)):
        mask = 0
        for i, a in enumerate(sub.atoms):
            if (bits >> i) & 1:
                mask |= a
        events.append(mask)
    return events


def naive_el2(theory: OnticTheory) -> bool:
    """Literal transcription of the second locality formulation: for every
    region, every event of its past-closure algebra, search every event of
    the exclusive-past algebra for a correlated partner."""
    theta = theory.theta.mask
    site = theory.site
    for x_mask in site.all_region_masks():
        r_mask = site.past_mask(x_mask)
        p_mask = r_mask & ~x_mask
        p_events = algebra_events(theory, p_mask)
        for a in algebra_events(theory, r_mask):
            if not any(a & theta == b & theta for b in p_events):
                return False
    return True


def naive_el1(theory: OnticTheory) -> bool:
    """Literal first formulation via restricted valuations: histories that
    share the exclusive-past atom must share the past-closure atom."""
    site = theory.site
    theta_bits = [theory.space.index(h) for h in theory.theta.members()]
    for x_mask in site.all_region_masks():
        r_mask = site.past_mask(x_mask)
        p_mask = r_mask & ~x_mask
        p_tab = theory.delta.subalgebra_within(theory.space, p_mask).atom_of_table()
        r_tab = theory.delta.subalgebra_within(theory.space, r_mask).atom_of_table()
        for g in theta_bits:
            for h in theta_bits:
                if p_tab[g] == p_tab[h] and r_tab[g] != r_tab[h]:
                    return False
    return True


def naive_el3v(theory: ThreeValuedTheory, exempt_settings: bool) -> bool:
    """Literal three-valued locality: exhaustive event loops on both sides of
    the antecedent search, with the same antecedent algebra as the checker."""
    site = theory.site
    space = theory.space
    for x_mask in site.all_region_masks():
        r_mask = site.past_mask(x_mask)
        p_mask = r_mask & ~x_mask
        s_gens = list(theory.delta.generators_within(p_mask))
        s_gens += list(theory.delta.generators_within(site.minimal_mask & r_mask))
        if exempt_settings:
            s_gens += [s.event for s in theory.settings if s.region.mask & ~r_mask == 0]
        s_alg = generate_subalgebra(space, s_gens)
        s_events = []
        for bits in range(1 << len(s_alg.atoms)):
            mask = 0
            for i, a in enumerate(s_alg.atoms):
                if (bits >> i) & 1:
                    mask |= a
            s_events.append(mask)
        s_tables = {tuple(v.value_of_mask(m) for v in theory.basics) for m in s_events}
        for a in algebra_events(theory, r_mask):
            table = tuple(v.value_of_mask(a) for v in theory.basics)
            if table not in s_tables:
                return False
    return True


def naive_npcc(theory: OnticTheory, ra, rb, past_region) -> bool:
    """Literal common-cause check for one region pair and one past region."""
    theta = theory.theta.mask
    p_events = algebra_events(theory, past_region.mask)
    for a in algebra_events(theory, ra.mask):
        for b in algebra_events(theory, rb.mask):
            if a & theta != b & theta:
                continue
            if not any(c & theta == a & theta for c in p_events):
                return False
    return True


SITES = [
    CausalSite(["a"]),
    CausalSite(["a", "b"], [("a", "b")]),
    CausalSite(["a", "b"]),
    CausalSite(["a", "b", "c"], [("a", "c"), ("b", "c")]),
    CausalSite(["a", "b", "c"], [("a", "b"), ("a", "c")]),
]


def random_ontic_theory(rng: random.Random) -> OnticTheory:
    site = rng.choice(SITES)
    n = rng.randint(1, 4)
    space = HistorySpace([f"g{i+1}" for i in range(n)])
    theta = Event(space, rng.randint(1, space.full_mask))
    names = {}
    entries = []
    for i, p in enumerate(site.points):
        count = rng.randint(0, 2)
        gens = []
        for k in range(count):
            e = Event(space, rng.randint(0, space.full_mask))
            gens.append(e)
            names.setdefault(f"E{i}{k}", e)
        entries.append((site.region([p]), gens))
    delta = AssociationMap.build(site, entries)
    settings = []
    if rng.random() < 0.3:
        for region, gens in delta.entries:
            if gens:
                settings.append(Setting(gens[0], region))
                break
    return OnticTheory(space, theta, site, delta, settings=settings, events=names)


def random_three_valued_theory(rng: random.Random) -> ThreeValuedTheory:
    while True:
        base = random_ontic_theory(rng)
        count = rng.randint(1, 4)
        basics = []
        for i in range(count):
            basics.append(
                ThreeValuation(base.space, rng.randint(1, base.space.full_mask), name=f"v{i+1}")
            )
        try:
            return ThreeValuedTheory(
                base.space,
                base.site,
                base.delta,
                basics,
                settings=base.settings,
                events=base.events,
            )
        except TheoryError:
            continue


def random_theory(rng: random.Random):
    if rng.random() < 0.5:
        return random_ontic_theory(rng)
    return random_three_valued_theory(rng)


def random_distribution(rng: random.Random, theory) -> Distribution:
    labels = Distribution._carrier_labels(theory)
    weights = [rng.randint(0, 5) for _ in labels]
    if not any(weights):
        weights[0] = 1
    total = sum(weights)
    return Distribution(theory, [Fraction(w, total) for w in weights])
