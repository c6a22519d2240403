import itertools
import random

import pytest

from helpers import random_three_valued_theory

from locality_lab.eprb import build_box_ball_models, build_eprb_model, pr_box_distribution
from locality_lab.histories import AssociationMap, Event, HistorySpace, full_specifications
from locality_lab.sites import CausalSite
from locality_lab.theory import (
    DeltaFamily,
    OnticTheory,
    TheoryError,
    ThreeValuedTheory,
    check_ontic_definiteness,
    check_ontic_definiteness_by_search,
    correlated,
    derive_three_valued,
    enumerate_theories,
    standard_delta_family,
    weakly_correlated,
)
from locality_lab.valuations import ThreeValuation, coarse_grain


@pytest.fixture(scope="module")
def eprb():
    return build_eprb_model("full")


def tiny_theory(theta_names=("g1", "g2")):
    site = CausalSite(["x"])
    space = HistorySpace(["g1", "g2", "g3"])
    delta = AssociationMap.build(site, [(site.region(["x"]), [space.event(["g1"])])])
    return OnticTheory(space, space.event(theta_names), site, delta)


def test_correlated_basics():
    t = tiny_theory()
    space = t.space
    a = space.event(["g1"])
    assert correlated(t, a, a)
    assert not correlated(t, space.everything, space.empty)
    # equality is only required on the allowed set
    assert correlated(t, space.event(["g1", "g3"]), space.event(["g1"]))


def test_correlated_on_model_antecedent_identity(eprb):
    t = eprb.theory
    ev = eprb.events
    combined = (ev["A_s"] & ev["P_A1"]) | (ev["A_s"].complement() & ev["P_A0"])
    assert correlated(t, combined, ev["A_r"])
    combined_b = (ev["B_s"] & ev["P_B1"]) | (ev["B_s"].complement() & ev["P_B0"])
    assert correlated(t, combined_b, ev["B_r"])


def test_weakly_correlated_basics():
    t = tiny_theory()
    space = t.space
    assert weakly_correlated(t, space.empty, space.event(["g2"]))
    a = space.event(["g1"])
    assert weakly_correlated(t, a, a)
    assert weakly_correlated(t, a, space.event(["g1", "g2"]))
    assert not weakly_correlated(t, space.event(["g1", "g2"]), a)


def test_weakly_correlated_three_valued_reduction():
    # the three-valued form agrees with the allowed-set inclusion on derived theories
    rng = random.Random(7)
    for _ in range(50):
        t = tiny_theory()
        d = derive_three_valued(t)
        a = Event(t.space, rng.randint(0, t.space.full_mask))
        b = Event(t.space, rng.randint(0, t.space.full_mask))
        assert weakly_correlated(t, a, b) == weakly_correlated(d, a, b)
        assert correlated(t, a, b) == correlated(d, a, b)


def test_no_record_event_weakly_correlated_to_joint_setting(eprb):
    t = eprb.theory
    setting = eprb.events["A_s"] & eprb.events["B_s"]
    past_alg = t.subalgebra_of(eprb.regions["P"])
    for spec in full_specifications(past_alg):
        assert not weakly_correlated(t, spec, setting)


def test_correlated_is_equivalence_relation():
    rng = random.Random(3)
    t = tiny_theory()
    events = [Event(t.space, m) for m in range(t.space.full_mask + 1)]
    for a, b, c in itertools.product(events, repeat=3):
        assert correlated(t, a, a)
        if correlated(t, a, b):
            assert correlated(t, b, a)
            if correlated(t, b, c):
                assert correlated(t, a, c)


def test_weakly_correlated_reflexive_transitive():
    t = tiny_theory()
    events = [Event(t.space, m) for m in range(t.space.full_mask + 1)]
    d = derive_three_valued(t)
    for theory in (t, d):
        for a in events:
            assert weakly_correlated(theory, a, a)
        for a, b, c in itertools.product(events, repeat=3):
            if weakly_correlated(theory, a, b) and weakly_correlated(theory, b, c):
                assert weakly_correlated(theory, a, c)


def test_ontic_correlation_implies_three_valued_in_derived():
    site = CausalSite(["x"])
    for n in (2, 3, 4):
        space = HistorySpace([f"g{i+1}" for i in range(n)])
        delta = AssociationMap.build(site, [(site.region(["x"]), [space.event(["g1"])])])
        for theta_mask in range(1, space.full_mask + 1):
            t = OnticTheory(space, Event(space, theta_mask), site, delta)
            d = derive_three_valued(t)
            for am in range(space.full_mask + 1):
                for bm in range(space.full_mask + 1):
                    if correlated(t, Event(space, am), Event(space, bm)):
                        assert correlated(d, Event(space, am), Event(space, bm))


def test_correlation_extends_to_coarse_grainings():
    rng = random.Random(11)
    for _ in range(30):
        t = random_three_valued_theory(rng)
        space = t.space
        a = Event(space, rng.randint(0, space.full_mask))
        b = Event(space, rng.randint(0, space.full_mask))
        if not correlated(t, a, b):
            continue
        for r in range(1, len(t.basics) + 1):
            for combo in itertools.combinations(t.basics, r):
                pooled = coarse_grain(combo)
                assert pooled.value(a) == pooled.value(b)


def test_derive_three_valued_shapes(eprb):
    single = tiny_theory(("g2",))
    d = derive_three_valued(single)
    assert len(d.basics) == 1
    assert d.basics[0].is_definite_everywhere()

    ontic, _ = build_box_ball_models()
    derived = derive_three_valued(ontic)
    assert len(derived.basics) == 4
    assert check_ontic_definiteness(derived).holds


def test_ontic_definiteness_verdicts(eprb):
    _, indefinite = build_box_ball_models()
    report = check_ontic_definiteness(indefinite)
    assert not report.holds
    assert report.witness.valuations == ("closed",)
    assert not check_ontic_definiteness(eprb.theory).holds


def test_ontic_definiteness_closed_form_matches_lattice_search():
    rng = random.Random(23)
    for _ in range(120):
        t = random_three_valued_theory(rng)
        assert check_ontic_definiteness(t).holds == check_ontic_definiteness_by_search(t)


def test_failed_ontic_definiteness_witness_rechecks():
    _, indefinite = build_box_ball_models()
    report = check_ontic_definiteness(indefinite)
    bad = next(v for v in indefinite.basics if v.label() == report.witness.valuations[0])
    # the witness valuation is indefinite somewhere yet its derivation set is
    # not contained in the allowed definite histories
    singles = 0
    for v in indefinite.basics:
        if v.is_definite_everywhere():
            singles |= v.derivation_mask
    assert not bad.is_definite_everywhere()
    assert bad.derivation_mask & ~singles


def test_enumerate_theories_counts():
    site = CausalSite(["x"])
    fixed = DeltaFamily(site, ((0b01,),))
    assert len(list(enumerate_theories(site, 1, fixed))) == 1
    fixed2 = DeltaFamily(site, ((0b01,),))
    assert len(list(enumerate_theories(site, 2, fixed2))) == 3
    fixed4 = DeltaFamily(site, ((0b0011,),))
    assert len(list(enumerate_theories(site, 4, fixed4))) == 15
    with pytest.raises(TheoryError):
        next(enumerate_theories(site, 6, fixed))


def test_enumerate_theories_deterministic():
    site = CausalSite(["a", "b"], [("a", "b")])
    family = standard_delta_family(site, 2, 3)
    first = [t.canonical_form() for t in enumerate_theories(site, 2, family)]
    second = [t.canonical_form() for t in enumerate_theories(site, 2, family)]
    assert first == second
    assert len(first) == family.instance_count() * 3


def test_basicness_validation():
    space = HistorySpace(["g1", "g2"])
    site = CausalSite(["x"])
    delta = AssociationMap.build(site, [(site.region(["x"]), [space.event(["g1"])])])
    with pytest.raises(TheoryError):
        ThreeValuedTheory(
            space,
            site,
            delta,
            basics=[
                ThreeValuation.from_histories(space, ["g1"], name="a"),
                ThreeValuation.from_histories(space, ["g2"], name="b"),
                ThreeValuation.from_histories(space, ["g1", "g2"], name="ab"),
            ],
        )


def test_setting_must_live_in_home_region():
    space = HistorySpace(["g1", "g2"])
    site = CausalSite(["x", "y"], [("x", "y")])
    e = space.event(["g1"])
    delta = AssociationMap.build(site, [(site.region(["y"]), [e])])
    from locality_lab.theory import Setting

    with pytest.raises(TheoryError):
        OnticTheory(space, space.everything, site, delta, settings=[Setting(e, site.region(["x"]))])
