import random

import pytest

from helpers import (
    algebra_events,
    naive_el1,
    naive_el2,
    naive_el3v,
    naive_npcc,
    random_ontic_theory,
    random_three_valued_theory,
)

from locality_lab.conditions import (
    CheckerPreconditionError,
    check_el_first,
    check_el_second,
    check_el_three_valued,
    check_freedom_of_settings,
    check_npcc_joint,
    check_npcc_mutual,
    construct_causal_antecedent,
    detect_signal,
)
from locality_lab.eprb import build_conspiriton_model, build_eprb_model
from locality_lab.histories import AssociationMap, Event, HistorySpace, full_specifications
from locality_lab.sites import CausalSite, joint_past, mutual_past
from locality_lab.theory import (
    OnticTheory,
    Setting,
    correlated,
    derive_three_valued,
    weakly_correlated,
)
from locality_lab.valuations import FALSE, INDEFINITE, TRUE


@pytest.fixture(scope="module")
def eprb_full():
    return build_eprb_model("full")


def trivial_delta_theory():
    site = CausalSite(["a", "b"], [("a", "b")])
    space = HistorySpace(["g1", "g2"])
    delta = AssociationMap.build(site, [])
    return OnticTheory(space, space.everything, site, delta)


def perfect_correlation_pair():
    """Two spacelike points, one binary event each, allowed set = agreement."""
    site = CausalSite(["a", "b"])
    space = HistorySpace(["h00", "h01", "h10", "h11"])
    ea = space.event(["h10", "h11"])
    eb = space.event(["h01", "h11"])
    delta = AssociationMap.build(site, [(site.region(["a"]), [ea]), (site.region(["b"]), [eb])])
    theta = space.event(["h00", "h11"])
    return OnticTheory(space, theta, site, delta, events={"A": ea, "B": eb})


def copied_bit_theory():
    """A past bit copied to a future bit: the deterministic toy."""
    site = CausalSite(["p", "f"], [("p", "f")])
    space = HistorySpace(["h00", "h01", "h10", "h11"])
    past_bit = space.event(["h10", "h11"])
    future_bit = space.event(["h01", "h11"])
    delta = AssociationMap.build(
        site, [(site.region(["p"]), [past_bit]), (site.region(["f"]), [future_bit])]
    )
    theta = space.event(["h00", "h11"])  # future copies past
    return OnticTheory(
        space, theta, site, delta, events={"past_bit": past_bit, "future_bit": future_bit}
    )


def common_cause_theory():
    """Two spacelike bits copied from a shared past bit."""
    site = CausalSite(["c", "a", "b"], [("c", "a"), ("c", "b")])
    space = HistorySpace([f"h{i:03b}" for i in range(8)])  # bits: c, a, b
    ec = space.event([n for n in space.names if n[1] == "1"])
    ea = space.event([n for n in space.names if n[2] == "1"])
    eb = space.event([n for n in space.names if n[3] == "1"])
    delta = AssociationMap.build(
        site,
        [(site.region(["c"]), [ec]), (site.region(["a"]), [ea]), (site.region(["b"]), [eb])],
    )
    theta = space.event(["h000", "h111"])
    return OnticTheory(space, theta, site, delta, events={"C": ec, "A": ea, "B": eb})


# ---------------------------------------------------------------------------
# two-valued locality
# ---------------------------------------------------------------------------

def test_el_trivial_delta_holds():
    t = trivial_delta_theory()
    assert check_el_first(t).holds
    assert check_el_second(t).holds


def test_el_single_history_holds():
    site = CausalSite(["a", "b"])
    space = HistorySpace(["g1", "g2"])
    delta = AssociationMap.build(site, [(site.region(["a"]), [space.event(["g1"])])])
    t = OnticTheory(space, space.event(["g1"]), site, delta)
    assert check_el_first(t).holds
    assert check_el_second(t).holds


def test_el_perfect_correlation_fails():
    t = perfect_correlation_pair()
    r1 = check_el_first(t)
    r2 = check_el_second(t)
    assert not r1.holds and not r2.holds
    assert r1.witness is not None and r2.witness is not None


def test_el_first_witness_rechecks():
    t = perfect_correlation_pair()
    report = check_el_first(t)
    g, h = report.witness.valuations
    x_mask = t.site.mask_of(report.witness.region)
    r_mask = t.site.past_mask(x_mask)
    p_mask = r_mask & ~x_mask
    p_tab = t.subalgebra_within(p_mask).atom_of_table()
    r_tab = t.subalgebra_within(r_mask).atom_of_table()
    gi, hi = t.space.index(g), t.space.index(h)
    assert p_tab[gi] == p_tab[hi] and r_tab[gi] != r_tab[hi]


def test_el_second_witness_rechecks():
    t = perfect_correlation_pair()
    report = check_el_second(t)
    x_mask = t.site.mask_of(report.witness.region)
    r_mask = t.site.past_mask(x_mask)
    p_mask = r_mask & ~x_mask
    theta = t.theta.mask
    bad = t.space.mask_of(report.witness.events["uncaused"])
    assert not any(bad & theta == b & theta for b in algebra_events(t, p_mask))


def test_el_checkers_match_naive_oracles():
    rng = random.Random(42)
    for _ in range(200):
        t = random_ontic_theory(rng)
        assert check_el_first(t).holds == naive_el1(t)
        assert check_el_second(t).holds == naive_el2(t)


# ---------------------------------------------------------------------------
# causal antecedent construction
# ---------------------------------------------------------------------------

def test_antecedent_trivial_events():
    t = copied_bit_theory()
    x = t.site.region(["f"])
    assert construct_causal_antecedent(t, x, t.space.everything).mask == t.space.full_mask
    assert construct_causal_antecedent(t, x, t.space.empty).mask == 0


def test_antecedent_copied_bit():
    t = copied_bit_theory()
    x = t.site.region(["f"])
    b = construct_causal_antecedent(t, x, t.events["future_bit"])
    assert correlated(t, b, t.events["future_bit"])
    assert b.mask == t.events["past_bit"].mask


def test_antecedent_postconditions_on_random_theories():
    rng = random.Random(5)
    found = 0
    for _ in range(300):
        t = random_ontic_theory(rng)
        for x_mask in t.site.all_region_masks():
            x = t.site.region_from_mask(x_mask)
            r_mask = t.site.past_mask(x_mask)
            p_mask = r_mask & ~x_mask
            for a_mask in algebra_events(t, r_mask):
                try:
                    b = construct_causal_antecedent(t, x, Event(t.space, a_mask))
                except CheckerPreconditionError:
                    continue
                found += 1
                assert correlated(t, b, Event(t.space, a_mask))
                assert b.mask in algebra_events(t, p_mask)
    assert found > 100


def test_antecedent_precondition_error_names_pair():
    t = perfect_correlation_pair()
    with pytest.raises(CheckerPreconditionError) as err:
        construct_causal_antecedent(t, t.site.region(["a"]), t.events["A"])
    assert "match on the exclusive past" in str(err.value)


# ---------------------------------------------------------------------------
# three-valued locality
# ---------------------------------------------------------------------------

def test_el3v_model_verdicts(eprb_full):
    assert check_el_three_valued(eprb_full.theory, exempt_settings=True).holds
    report = check_el_three_valued(eprb_full.theory, exempt_settings=False)
    assert not report.holds
    assert report.witness.data["event"] == "A_s"
    assert tuple(report.witness.region) == ("a_s",)


def test_el3v_all_derivation_choices(eprb_full):
    for choice in ("pair_14", "pair_23"):
        model = build_eprb_model(choice)
        assert check_el_three_valued(model.theory, exempt_settings=True).holds


def test_el3v_derived_from_el_passing_holds():
    t = copied_bit_theory()
    assert check_el_second(t).holds
    assert check_el_three_valued(derive_three_valued(t), exempt_settings=False).holds


def test_el3v_matches_naive_oracle():
    rng = random.Random(9)
    for _ in range(120):
        t = random_three_valued_theory(rng)
        for exempt in (False, True):
            assert check_el_three_valued(t, exempt).holds == naive_el3v(t, exempt)
    for _ in range(60):
        t = derive_three_valued(random_ontic_theory(rng))
        for exempt in (False, True):
            assert check_el_three_valued(t, exempt).holds == naive_el3v(t, exempt)


# ---------------------------------------------------------------------------
# common cause
# ---------------------------------------------------------------------------

def test_npcc_vacuous_holds():
    t = trivial_delta_theory()
    site = CausalSite(["a", "b"])
    space = t.space
    delta = AssociationMap.build(site, [])
    t2 = OnticTheory(space, space.everything, site, delta)
    assert check_npcc_joint(t2, site.region(["a"]), site.region(["b"])).holds
    assert check_npcc_mutual(t2, site.region(["a"]), site.region(["b"])).holds


def test_npcc_perfect_correlation_empty_past_fails():
    t = perfect_correlation_pair()
    ra, rb = t.site.region(["a"]), t.site.region(["b"])
    assert not check_npcc_joint(t, ra, rb).holds
    assert not check_npcc_mutual(t, ra, rb).holds


def test_npcc_common_cause_in_mutual_past_holds():
    t = common_cause_theory()
    ra, rb = t.site.region(["a"]), t.site.region(["b"])
    assert check_npcc_joint(t, ra, rb).holds
    assert check_npcc_mutual(t, ra, rb).holds


def test_npcc_requires_spacelike():
    t = copied_bit_theory()
    with pytest.raises(CheckerPreconditionError):
        check_npcc_joint(t, t.site.region(["p"]), t.site.region(["f"]))


def test_npcc_matches_naive_oracle():
    rng = random.Random(17)
    for _ in range(200):
        t = random_ontic_theory(rng)
        site = t.site
        n = len(site.points)
        for am in range(1, 1 << n):
            for bm in range(am + 1, 1 << n):
                if am & bm:
                    continue
                if site.past_mask(am) & bm or site.past_mask(bm) & am:
                    continue
                ra, rb = site.region_from_mask(am), site.region_from_mask(bm)
                assert check_npcc_joint(t, ra, rb).holds == naive_npcc(t, ra, rb, joint_past(ra, rb))
                assert check_npcc_mutual(t, ra, rb).holds == naive_npcc(t, ra, rb, mutual_past(ra, rb))


def test_npcc_witness_rechecks():
    t = perfect_correlation_pair()
    ra, rb = t.site.region(["a"]), t.site.region(["b"])
    report = check_npcc_joint(t, ra, rb)
    first = t.space.event(report.witness.events["first"])
    second = t.space.event(report.witness.events["second"])
    assert correlated(t, first, second)
    past_mask = t.site.mask_of(report.witness.data["past_region"])
    assert not any(
        c & t.theta.mask == first.mask & t.theta.mask for c in algebra_events(t, past_mask)
    )


# ---------------------------------------------------------------------------
# freedom of settings and signalling
# ---------------------------------------------------------------------------

def test_fos_no_past_below_settings_holds():
    site = CausalSite(["a", "b"])
    space = HistorySpace(["g1", "g2"])
    e = space.event(["g1"])
    delta = AssociationMap.build(site, [(site.region(["a"]), [e])])
    t = OnticTheory(space, space.everything, site, delta, settings=[Setting(e, site.region(["a"]))])
    assert check_freedom_of_settings(t).holds


def test_fos_eprb_holds_and_conspiriton_fails(eprb_full):
    assert check_freedom_of_settings(eprb_full.theory).holds
    c = build_conspiriton_model()
    report = check_freedom_of_settings(c)
    assert not report.holds
    assert report.witness.data["influencing"] == "C"


def test_fos_strong_variant_separates_derivation_choices(eprb_full):
    assert check_freedom_of_settings(eprb_full.theory, all_setting_events=True).holds
    for choice in ("pair_14", "pair_23"):
        model = build_eprb_model(choice)
        assert check_freedom_of_settings(model.theory).holds
        strong = check_freedom_of_settings(model.theory, all_setting_events=True)
        assert not strong.holds
        # re-check the witness by the definition
        c = model.theory.space.event(strong.witness.events["influencing"])
        a = model.theory.space.event(strong.witness.events["setting"])
        assert weakly_correlated(model.theory, c, a)
        assert any(v.value(c) == TRUE for v in model.theory.basics)
        assert any(v.value(a) == FALSE for v in model.theory.basics)


def test_fos_pair14_counterexample_structure():
    # the frozen strong-variant counterexample: the union of the record
    # patterns (0,0,1,0) and (1,0,1,1) forces the setting combination
    # "A on or B off" without ever being indefinite about it
    model = build_eprb_model("pair_14")
    t = model.theory
    ev = model.events
    pattern_a = (
        ev["P_A0"].complement() & ev["P_A1"].complement() & ev["P_B0"] & ev["P_B1"].complement()
    )
    pattern_b = ev["P_A0"] & ev["P_A1"].complement() & ev["P_B0"] & ev["P_B1"]
    c = pattern_a | pattern_b
    setting = ev["A_s"] | ev["B_s"].complement()
    assert weakly_correlated(t, c, setting)
    values = [v.value(c) for v in t.basics]
    assert values[9] == TRUE  # row 10
    assert all(values[i] == FALSE for i in (4, 5, 6, 7))  # rows 5-8


def test_detect_signal_cases(eprb_full):
    t = eprb_full.theory
    regions = eprb_full.regions
    ev = eprb_full.events
    # trivial output event carries no information
    verdict = detect_signal(t, ev["A_s"], regions["A_s"], t.space.everything, regions["B_r"])
    assert verdict.kind == "none"
    # remote outcome: no channel
    verdict = detect_signal(t, ev["A_s"], regions["A_s"], ev["B_r"], regions["B_r"])
    assert verdict.kind == "none"
    verdict = detect_signal(t, ev["A_s"], regions["A_s"], ev["B_s"], regions["B_s"])
    assert verdict.kind == "none"


def test_detect_signal_strong_on_copied_setting():
    # two spacelike wings reading the same free coin
    site = CausalSite(["a", "b"])
    space = HistorySpace(["h0", "h1"])
    e = space.event(["h1"])
    delta = AssociationMap.build(site, [(site.region(["a"]), [e]), (site.region(["b"]), [e])])
    t = OnticTheory(space, space.everything, site, delta, settings=[Setting(e, site.region(["a"]))])
    verdict = detect_signal(t, e, site.region(["a"]), e, site.region(["b"]))
    assert verdict.kind == "strong"


def test_detect_signal_unfree_setting_errors():
    c = build_conspiriton_model()
    with pytest.raises(CheckerPreconditionError) as err:
        detect_signal(c, c.events["A"], c.site.region(["a"]), c.events["B"], c.site.region(["b"]))
    assert "C" in str(err.value)


def test_detect_signal_requires_definite_events(eprb_full):
    t = eprb_full.theory
    with pytest.raises(CheckerPreconditionError):
        detect_signal(
            t,
            eprb_full.events["A_s"],
            eprb_full.regions["A_s"],
            eprb_full.events["P_B0"] & eprb_full.events["B_r"],
            eprb_full.regions["B_r"],
        )


def test_el_plus_freedom_implies_no_signal_on_strategy_models():
    from locality_lab.oracles import _bell_theory, _strategy_theta

    rng = random.Random(2)
    for _ in range(25):
        fa = {(l, s): rng.randint(0, 1) for l in (0, 1) for s in (0, 1)}
        fb = {(l, s): rng.randint(0, 1) for l in (0, 1) for s in (0, 1)}
        t = _bell_theory(1, sorted(set(_strategy_theta(fa, fb))))
        assert check_el_three_valued(derive_three_valued(t), exempt_settings=True).holds
        assert check_freedom_of_settings(t).holds
        site = t.site
        verdict = detect_signal(
            t,
            t.events["A_s"],
            site.region(["a_s"]),
            t.events["B_r"],
            site.region(["b_r"]),
        )
        assert verdict.kind == "none"


# ---------------------------------------------------------------------------
# the refuted block identity, frozen
# ---------------------------------------------------------------------------

def test_block_identity_holds_exactly_for_aligned_record_patterns(eprb_full):
    t = eprb_full.theory
    past_alg = t.subalgebra_of(eprb_full.regions["P"])
    ev = eprb_full.events

    def pattern_of(spec):
        bits = []
        for name in ("P_A0", "P_A1", "P_B0", "P_B1"):
            bits.append(1 if spec.issubset(ev[name]) else 0)
        return tuple(bits)

    aligned = 0
    for spec in full_specifications(past_alg):
        identity = all(
            len({t.basics[i + 4 * k].value(spec) for k in range(4)}) == 1 for i in range(4)
        )
        p = pattern_of(spec)
        expected = p[0] == p[1] and p[2] == p[3]
        assert identity == expected
        aligned += identity
    assert aligned == 4


def test_block_identity_counterexample_frozen(eprb_full):
    t = eprb_full.theory
    ev = eprb_full.events
    spec = (
        ev["P_A0"].complement() & ev["P_A1"].complement() & ev["P_B0"] & ev["P_B1"].complement()
    )
    assert t.basics[0].value(spec) == FALSE  # row 1
    assert t.basics[4].value(spec) == INDEFINITE  # row 5
