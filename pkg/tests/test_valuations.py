import itertools
from fractions import Fraction

import pytest

from locality_lab.eprb import build_eprb_model
from locality_lab.histories import Event, HistorySpace
from locality_lab.theory import ThreeValuedTheory
from locality_lab.valuations import (
    FALSE,
    INDEFINITE,
    TRUE,
    ThreeValuation,
    TwoValuation,
    all_events,
    all_valuations,
    check_conjunction_table,
    coarse_grain,
    cyclical_negation,
    evaluate,
    is_complementary,
    is_definite_event,
)


@pytest.fixture(scope="module")
def eprb():
    return build_eprb_model("full")


def test_evaluate_basic_rules():
    space = HistorySpace(["g1", "g2", "g3"])
    v = ThreeValuation.from_histories(space, ["g1", "g2"])
    assert evaluate(v, space.event(["g1", "g2", "g3"])) == TRUE
    assert evaluate(v, space.everything) == TRUE
    assert evaluate(v, space.empty) == FALSE
    assert evaluate(v, space.event(["g1"])) == INDEFINITE
    assert evaluate(v, space.event(["g3"])) == FALSE


def test_evaluate_matches_named_row_union(eprb):
    # the valuation derived from the two mixed completions makes the union of
    # the two free records definitely true
    family = eprb.row_families[0]
    y = ThreeValuation.from_histories(eprb.theory.space, [family[1], family[2]])
    union = eprb.events["P_B1"] | eprb.events["P_A1"]
    assert evaluate(y, union) == TRUE


def test_coarse_grain_single_input_identity():
    space = HistorySpace(["g1", "g2"])
    v = ThreeValuation.from_histories(space, ["g1"])
    assert coarse_grain([v]).derivation_mask == v.derivation_mask


def test_coarse_grain_pair_matches_pooled_derivation(eprb):
    family = eprb.row_families[0]
    space = eprb.theory.space
    v1 = ThreeValuation.from_histories(space, [family[0]])
    v4 = ThreeValuation.from_histories(space, [family[3]])
    pooled = coarse_grain([v1, v4])
    direct = ThreeValuation.from_histories(space, [family[0], family[3]])
    assert pooled.derivation_mask == direct.derivation_mask
    # the (w, x, y, z) cells of the first row come out (1/2, 0, 0, 1/2)
    a_ind, b_ind = eprb.events["P_A1"], eprb.events["P_B1"]
    cells = (
        pooled.value(a_ind & b_ind),
        pooled.value(a_ind & b_ind.complement()),
        pooled.value(a_ind.complement() & b_ind),
        pooled.value(a_ind.complement() & b_ind.complement()),
    )
    assert cells == (INDEFINITE, FALSE, FALSE, INDEFINITE)


def test_coarse_grain_of_all_singletons():
    space = HistorySpace(["g1", "g2", "g3"])
    theta = ["g1", "g2"]
    pooled = coarse_grain([ThreeValuation.from_histories(space, [h]) for h in theta])
    theta_mask = space.mask_of(theta)
    for e in all_events(space):
        t = pooled.value(e)
        if t == TRUE:
            assert e.mask & theta_mask == theta_mask
        elif t == FALSE:
            assert e.mask & theta_mask == 0
        else:
            assert e.mask & theta_mask not in (0, theta_mask)


def test_conjunction_table_classical_rows():
    for a in (FALSE, TRUE):
        for b in (FALSE, TRUE):
            meet = TRUE if (a == TRUE and b == TRUE) else FALSE
            assert check_conjunction_table(a, b, meet)
            for wrong in (FALSE, INDEFINITE, TRUE):
                if wrong != meet:
                    assert not check_conjunction_table(a, b, wrong)


def test_conjunction_table_indefinite_rows():
    assert not check_conjunction_table(INDEFINITE, INDEFINITE, TRUE)
    assert check_conjunction_table(INDEFINITE, INDEFINITE, FALSE)
    assert check_conjunction_table(INDEFINITE, INDEFINITE, INDEFINITE)


def test_conjunction_table_against_independent_enumeration():
    # independent oracle: recompute every realizable triple over a five-history
    # space, which can only add realizations; the tables must agree
    space = HistorySpace([f"s{i}" for i in range(5)])
    events = list(all_events(space))
    seen = set()
    for v in all_valuations(space):
        for a in events:
            for b in events:
                seen.add((v.value(a), v.value(b), v.value(a & b)))
    for triple in itertools.product((FALSE, INDEFINITE, TRUE), repeat=3):
        assert check_conjunction_table(*triple) == (triple in seen)


def test_cyclical_negation():
    assert cyclical_negation(TRUE) == INDEFINITE
    assert cyclical_negation(INDEFINITE) == FALSE
    assert cyclical_negation(FALSE) == TRUE
    with pytest.raises(ValueError):
        cyclical_negation(Fraction(1, 3))


def test_diametrical_negation_exhaustive():
    space = HistorySpace([f"s{i}" for i in range(6)])
    for v in all_valuations(space):
        for e in all_events(space):
            t = v.value(e)
            tc = v.value(e.complement())
            if t == INDEFINITE:
                assert tc == INDEFINITE
            else:
                assert tc == 1 - t


def test_singleton_reduction_to_two_valued_exhaustive():
    space = HistorySpace([f"s{i}" for i in range(6)])
    for name in space.names:
        three = ThreeValuation.from_histories(space, [name])
        two = TwoValuation(space, name)
        for e in all_events(space):
            assert three.value(e) == two.value(e)


def test_monotone_coarsening_exhaustive():
    # anything definite under a coarser valuation stays definite with the
    # same value under any finer one
    space = HistorySpace([f"s{i}" for i in range(4)])
    for big in range(1, space.full_mask + 1):
        vb = ThreeValuation(space, big)
        sub = big
        while True:
            if sub:
                vs = ThreeValuation(space, sub)
                for e in all_events(space):
                    t = vb.value(e)
                    if t != INDEFINITE:
                        assert vs.value(e) == t
            if sub == 0:
                break
            sub = (sub - 1) & big


def test_complementarity_on_records(eprb):
    t = eprb.theory
    assert is_complementary(t, eprb.events["P_A0"], eprb.events["P_A1"])
    assert is_complementary(t, eprb.events["P_B0"], eprb.events["P_B1"])
    assert not is_complementary(t, eprb.events["A_s"], eprb.events["B_s"])
    assert not is_complementary(t, eprb.events["A_s"], eprb.events["A_s"])


def test_is_definite_event(eprb):
    t = eprb.theory
    everything = is_definite_event(t, t.space.everything)
    assert everything.mask == everything.space.full_mask
    settings_on = is_definite_event(t, eprb.events["P_A1"])
    # the record for the on-setting is definite exactly when the setting is on
    expected = [f"row{i:02d}" for i in range(9, 17)]
    assert list(settings_on.members()) == expected
    always = is_definite_event(t, eprb.events["A_r"])
    assert always.mask == always.space.full_mask
