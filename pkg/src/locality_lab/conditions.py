"""Causal-condition checkers.

Einstein locality in both two-valued formulations and the three-valued form
with setting exemptions, the joint- and mutual-past common-cause conditions,
freedom of settings, and signalling detection.  Every checker quantifies
"for all regions" over all subsets of site points, and every failure carries
a witness that can be re-verified without the checker.

The event-quantified checks do not loop over the full (exponential) event
lattice.  They rely on three exact reductions, each cross-checked against a
literal brute-force loop in the test suite:

* an event A associated to R has a correlated partner in an algebra S iff
  A's allowed-set trace is a union of S-atom traces (event lattices are
  closed under union, so it is enough to check the atoms of R);
* the partner of an event that is definite under every basic valuation is
  forced: the union of S-atoms meeting the derivation sets of the basics
  valuing it 1;
* once every generator of R has a partner, logical combinations inherit
  partners componentwise, provided each substituted generator is definite
  under every basic valuation.  When that proviso fails the checker falls
  back to exhausting the region's algebra, and refuses if it is too large.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .histories import Event, Subalgebra, generate_subalgebra
from .reports import ConditionReport, Witness
from .sites import Region, is_spacelike, joint_past, mutual_past
from .theory import OnticTheory, Setting, Theory, ThreeValuedTheory, correlated, weakly_correlated
from .valuations import FALSE, INDEFINITE, TRUE, ThreeValuation

_FALLBACK_ATOM_CAP = 12     # exhaustive region sweep: at most 2^12 events
_ALGEBRA_ATOM_CAP = 16      # freedom-of-settings sweep: at most 2^16 past events
_ANTECEDENT_NODE_CAP = 200_000


class CheckerPreconditionError(ValueError):
    """A checker was invoked outside its contract (exit code 3 in the CLI)."""


class ModelTooLargeError(ValueError):
    """The model exceeds the bounds of an exact check."""


# ---------------------------------------------------------------------------
# Einstein locality, two-valued
# ---------------------------------------------------------------------------

def _region_names(theory: Theory, mask: int) -> tuple[str, ...]:
    return theory.site.region_from_mask(mask).sorted_members()


def check_el_first(theory: OnticTheory) -> ConditionReport:
    """First formulation: for every region X, allowed histories that agree on
    the exclusive past of X agree on everything associated to past(X)."""
    site = theory.site
    theta_bits = [theory.space.index(h) for h in theory.theta.members()]
    detail = []
    for x_mask in site.all_region_masks():
        r_mask = site.past_mask(x_mask)
        p_mask = r_mask & ~x_mask
        p_tab = theory.subalgebra_within(p_mask).atom_of_table()
        r_tab = theory.subalgebra_within(r_mask).atom_of_table()
        seen: dict[int, tuple[int, int]] = {}
        bad = None
        for h in theta_bits:
            key = p_tab[h]
            prev = seen.get(key)
            if prev is None:
                seen[key] = (r_tab[h], h)
            elif prev[0] != r_tab[h]:
                bad = (prev[1], h)
                break
        detail.append((_region_names(theory, x_mask), bad is None))
        if bad is not None:
            g1, g2 = theory.space.names[bad[0]], theory.space.names[bad[1]]
            atom = theory.subalgebra_within(r_mask).atoms[r_tab[bad[0]]]
            return ConditionReport(
                condition="el1",
                holds=False,
                witness=Witness(
                    description=(
                        "allowed histories match on the exclusive past but differ on "
                        "an event associated to the past closure"
                    ),
                    region=_region_names(theory, x_mask),
                    events={"distinguishing": theory.space.names_of(atom)},
                    valuations=(g1, g2),
                ),
                detail=tuple(detail),
            )
    return ConditionReport(condition="el1", holds=True, detail=tuple(detail))


def check_el_second(theory: OnticTheory) -> ConditionReport:
    """Second formulation: every event associated to past(X) is correlated to
    some event associated to the exclusive past of X."""
    site = theory.site
    theta = theory.theta.mask
    detail = []
    for x_mask in site.all_region_masks():
        r_mask = site.past_mask(x_mask)
        p_mask = r_mask & ~x_mask
        r_sub = theory.subalgebra_within(r_mask)
        p_traces = [a & theta for a in theory.subalgebra_within(p_mask).atoms]
        bad_atom = None
        for atom in r_sub.atoms:
            t = atom & theta
            u = 0
            for pt in p_traces:
                if pt & ~t == 0:
                    u |= pt
            if u != t:
                bad_atom = atom
                break
        detail.append((_region_names(theory, x_mask), bad_atom is None))
        if bad_atom is not None:
            return ConditionReport(
                condition="el2",
                holds=False,
                witness=Witness(
                    description="event associated to the past closure has no correlated "
                    "event in the exclusive past",
                    region=_region_names(theory, x_mask),
                    events={"uncaused": theory.space.names_of(bad_atom)},
                ),
                detail=tuple(detail),
            )
    return ConditionReport(condition="el2", holds=True, detail=tuple(detail))


def construct_causal_antecedent(theory: OnticTheory, x: Region, a: Event) -> Event:
    """The exclusive-past event correlated to `a`: the union of exclusive-past
    atoms all of whose allowed histories satisfy `a` (atoms carrying no
    allowed history enter vacuously)."""
    site = theory.site
    r_mask = site.past_mask(x.mask)
    p_mask = r_mask & ~x.mask
    r_sub = theory.subalgebra_within(r_mask)
    if not r_sub.contains_mask(a.mask):
        raise CheckerPreconditionError("event is not associated to the past of the region")
    theta = theory.theta.mask
    p_tab = theory.subalgebra_within(p_mask).atom_of_table()
    r_tab = r_sub.atom_of_table()
    seen: dict[int, tuple[int, int]] = {}
    for h in (theory.space.index(n) for n in theory.theta.members()):
        key = p_tab[h]
        prev = seen.get(key)
        if prev is None:
            seen[key] = (r_tab[h], h)
        elif prev[0] != r_tab[h]:
            names = (theory.space.names[prev[1]], theory.space.names[h])
            raise CheckerPreconditionError(
                f"Einstein locality fails at region {sorted(x.members)}: histories "
                f"{names[0]!r} and {names[1]!r} match on the exclusive past but not beyond"
            )
    b_mask = 0
    for q in theory.subalgebra_within(p_mask).atoms:
        if q & theta & ~a.mask == 0:
            b_mask |= q
    return Event(theory.space, b_mask)


# ---------------------------------------------------------------------------
# Einstein locality, three-valued
# ---------------------------------------------------------------------------

def _basic_keys(v: ThreeValuation, sub: Subalgebra) -> int:
    """Bitmask of sub-atom indices meeting the valuation's derivation set."""
    tab = sub.atom_of_table()
    k = 0
    m = v.derivation_mask
    while m:
        h = (m & -m).bit_length() - 1
        m &= m - 1
        k |= 1 << tab[h]
    return k


def _find_valuation_matching_event(
    sub: Subalgebra, basics: Sequence[ThreeValuation], target: tuple
) -> int | None:
    """An event of `sub` (as a mask) whose value under every basic valuation
    matches `target`, or None if no such event exists.  Exact."""
    keys = [_basic_keys(v, sub) for v in basics]
    forced = 0
    forbidden = 0
    halves = []
    for k, t in zip(keys, target):
        if t == TRUE:
            forced |= k
        elif t == FALSE:
            forbidden |= k
        else:
            halves.append(k)
    if forced & forbidden:
        return None

    pending = []
    free_bits = 0
    for k in halves:
        hit = bool(k & forced)        # touched by a mandatory atom
        miss = bool(k & forbidden)    # escapes coverage via an excluded atom
        free = k & ~forced & ~forbidden
        if not hit and free == 0:
            return None  # cannot be touched
        if not miss and free == 0:
            return None  # fully forced: cannot avoid coverage
        if not hit and not miss and free == k and _popcount(free) < 2:
            return None  # a single free atom cannot be both in and out
        if not (hit and miss):
            pending.append((k & free, hit, miss))
            free_bits |= k & free
    chosen = _search_half_assignment(pending, free_bits)
    if chosen is None:
        return None
    selection = forced | chosen
    mask = 0
    for i, a in enumerate(sub.atoms):
        if (selection >> i) & 1:
            mask |= a
    for v, t in zip(basics, target):
        if v.value_of_mask(mask) != t:  # pragma: no cover - search is exact
            raise AssertionError("antecedent search produced a mismatched event")
    return mask


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _search_half_assignment(pending, free_bits) -> int | None:
    """Choose a set of free atoms so every constraint (kfree, hit, miss) has
    a chosen atom in kfree unless `hit`, and an unchosen one unless `miss`.

    Returns the chosen atoms as a bitmask, or None when unsatisfiable.
    """
    free_list = []
    m = free_bits
    while m:
        b = m & -m
        m &= m - 1
        free_list.append(b)
    n = len(free_list)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | free_list[i]
    nodes = 0

    def dfs(i: int, chosen: int, out: int) -> int | None:
        nonlocal nodes
        nodes += 1
        if nodes > _ANTECEDENT_NODE_CAP:
            raise ModelTooLargeError("antecedent search exceeded its node budget")
        undecided = suffix[i]
        for kfree, hit, miss in pending:
            if not hit and kfree & chosen == 0 and kfree & undecided == 0:
                return None
            if not miss and kfree & out == 0 and kfree & undecided == 0:
                return None
        if i == n:
            return chosen
        bit = free_list[i]
        got = dfs(i + 1, chosen | bit, out)
        if got is not None:
            return got
        return dfs(i + 1, chosen, out | bit)

    return dfs(0, 0, 0)


def _setting_events_within(theory: Theory, region_mask: int) -> list[Event]:
    return [s.event for s in theory.settings if s.region.mask & ~region_mask == 0]


def check_el_three_valued(theory: ThreeValuedTheory, exempt_settings: bool = False) -> ConditionReport:
    """Three-valued Einstein locality: every event associated to past(X) has a
    value-matching event in the antecedent algebra.

    The antecedent algebra is generated by the exclusive past of X, events on
    minimal points inside past(X) (earliest modelled events are their own
    antecedents), and, when `exempt_settings`, the declared setting events
    inside past(X).
    """
    site = theory.site
    space = theory.space
    basics = theory.basics
    name = "el3v" + ("+settings" if exempt_settings else "")
    detail = []
    memo: dict[tuple, tuple] = {}
    for x_mask in site.all_region_masks():
        r_mask = site.past_mask(x_mask)
        p_mask = r_mask & ~x_mask
        s_gens: list[Event] = list(theory.delta.generators_within(p_mask))
        s_gens += theory.delta.generators_within(site.minimal_mask & r_mask)
        if exempt_settings:
            s_gens += _setting_events_within(theory, r_mask)
        r_gens = theory.delta.generators_within(r_mask)
        key = (
            tuple(sorted({g.mask for g in s_gens})),
            tuple(sorted({g.mask for g in r_gens})),
        )
        if key in memo:
            ok, wit = memo[key]
        else:
            ok, wit = _el3v_region(theory, s_gens, r_gens)
            memo[key] = (ok, wit)
        detail.append((_region_names(theory, x_mask), ok))
        if not ok:
            event_mask, reason = wit
            return ConditionReport(
                condition=name,
                holds=False,
                witness=Witness(
                    description=f"event has no causal antecedent ({reason})",
                    region=_region_names(theory, x_mask),
                    events={"uncaused": space.names_of(event_mask)},
                    data={"event": theory.event_name(Event(space, event_mask))},
                ),
                detail=tuple(detail),
            )
    return ConditionReport(condition=name, holds=True, detail=tuple(detail))


def _el3v_region(theory: ThreeValuedTheory, s_gens, r_gens):
    space = theory.space
    basics = theory.basics
    s_alg = generate_subalgebra(space, _dedup(s_gens))
    substituted_indefinite = False
    for g in _dedup(r_gens):
        if s_alg.contains_mask(g.mask):
            continue
        target = tuple(v.value_of_mask(g.mask) for v in basics)
        found = _find_valuation_matching_event(s_alg, basics, target)
        if found is None:
            return False, (g.mask, "no value-matching event in the antecedent algebra")
        if INDEFINITE in target:
            substituted_indefinite = True
    if substituted_indefinite:
        # componentwise substitution is only justified for everywhere-definite
        # generators; fall back to exhausting the region's algebra
        r_alg = generate_subalgebra(space, _dedup(r_gens))
        if len(r_alg.atoms) > _FALLBACK_ATOM_CAP:
            raise ModelTooLargeError(
                "region algebra too large for the exhaustive three-valued locality sweep"
            )
        for bits in range(1 << len(r_alg.atoms)):
            mask = 0
            for i, a in enumerate(r_alg.atoms):
                if (bits >> i) & 1:
                    mask |= a
            if s_alg.contains_mask(mask):
                continue
            target = tuple(v.value_of_mask(mask) for v in basics)
            if _find_valuation_matching_event(s_alg, basics, target) is None:
                return False, (mask, "no value-matching event (exhaustive sweep)")
    return True, None


def _dedup(events) -> list[Event]:
    seen = set()
    out = []
    for e in events:
        if e.mask not in seen:
            seen.add(e.mask)
            out.append(e)
    return out


# ---------------------------------------------------------------------------
# Nonprobabilistic principle of common cause
# ---------------------------------------------------------------------------

def check_npcc_joint(theory: Theory, ra: Region, rb: Region) -> ConditionReport:
    """Correlated spacelike event pairs need a correlated event in the joint
    past (anticorrelated pairs are covered through complements, which the
    event algebras contain)."""
    return _check_npcc(theory, ra, rb, joint_past, "npccj")


def check_npcc_mutual(theory: Theory, ra: Region, rb: Region) -> ConditionReport:
    """As check_npcc_joint with the mutual past (intersection of the pasts)."""
    return _check_npcc(theory, ra, rb, mutual_past, "npccm")


def _check_npcc(theory: Theory, ra: Region, rb: Region, past_fn, name: str) -> ConditionReport:
    if not is_spacelike(ra, rb):
        raise CheckerPreconditionError("common-cause conditions need spacelike regions")
    pm = past_fn(ra, rb).mask
    if isinstance(theory, OnticTheory):
        return _npcc_ontic(theory, ra, rb, pm, name)
    return _npcc_three_valued(theory, ra, rb, pm, name)


def _npcc_ontic(theory: OnticTheory, ra, rb, past_mask, name) -> ConditionReport:
    theta = theory.theta.mask
    a_sub = theory.subalgebra_of(ra)
    b_sub = theory.subalgebra_of(rb)
    if len(a_sub.atoms) > _ALGEBRA_ATOM_CAP or len(b_sub.atoms) > _ALGEBRA_ATOM_CAP:
        raise ModelTooLargeError("region algebras too large for the common-cause sweep")
    a_traces = _trace_examples(a_sub, theta)
    b_traces = _trace_examples(b_sub, theta)
    p_traces = [q & theta for q in theory.subalgebra_within(past_mask).atoms]
    p_atoms = theory.subalgebra_within(past_mask).atoms
    for t in sorted(set(a_traces) & set(b_traces)):
        c_mask = 0
        got = 0
        for q, qt in zip(p_atoms, p_traces):
            if qt & ~t == 0:
                c_mask |= q
                got |= qt
        if got != t:
            a_ev = a_traces[t]
            b_ev = b_traces[t]
            return ConditionReport(
                condition=name,
                holds=False,
                witness=Witness(
                    description="correlated spacelike pair with no correlated past event",
                    region=tuple(sorted(ra.members)) + tuple(sorted(rb.members)),
                    events={
                        "first": theory.space.names_of(a_ev),
                        "second": theory.space.names_of(b_ev),
                    },
                    data={"past_region": _region_names(theory, past_mask)},
                ),
            )
    return ConditionReport(condition=name, holds=True)


def _trace_examples(sub: Subalgebra, theta: int) -> dict[int, int]:
    """Map each achievable allowed-set trace to one event mask realizing it."""
    out: dict[int, int] = {}
    atoms = sub.atoms
    for bits in range(1 << len(atoms)):
        mask = 0
        for i, a in enumerate(atoms):
            if (bits >> i) & 1:
                mask |= a
        t = mask & theta
        if t not in out:
            out[t] = mask
    return out


def _npcc_three_valued(theory: ThreeValuedTheory, ra, rb, past_mask, name) -> ConditionReport:
    basics = theory.basics
    a_sub = theory.subalgebra_of(ra)
    b_sub = theory.subalgebra_of(rb)
    p_sub = theory.subalgebra_within(past_mask)
    if max(len(a_sub.atoms), len(b_sub.atoms)) > _FALLBACK_ATOM_CAP:
        raise ModelTooLargeError("region algebras too large for the common-cause sweep")
    b_by_vv: dict[tuple, int] = {}
    for mask in _algebra_masks(b_sub):
        vv = tuple(v.value_of_mask(mask) for v in basics)
        b_by_vv.setdefault(vv, mask)
    for mask in _algebra_masks(a_sub):
        vv = tuple(v.value_of_mask(mask) for v in basics)
        partner = b_by_vv.get(vv)
        if partner is None:
            continue
        if _find_valuation_matching_event(p_sub, basics, vv) is None:
            return ConditionReport(
                condition=name,
                holds=False,
                witness=Witness(
                    description="correlated spacelike pair with no value-matching past event",
                    region=tuple(sorted(ra.members)) + tuple(sorted(rb.members)),
                    events={
                        "first": theory.space.names_of(mask),
                        "second": theory.space.names_of(partner),
                    },
                    data={"past_region": _region_names(theory, past_mask)},
                ),
            )
    return ConditionReport(condition=name, holds=True)


def _algebra_masks(sub: Subalgebra):
    atoms = sub.atoms
    for bits in range(1 << len(atoms)):
        mask = 0
        for i, a in enumerate(atoms):
            if (bits >> i) & 1:
                mask |= a
        yield mask


# ---------------------------------------------------------------------------
# Freedom of settings
# ---------------------------------------------------------------------------

def check_freedom_of_settings(theory: Theory, all_setting_events: bool = False) -> ConditionReport:
    """No non-trivial past event may be weakly correlated to a full
    specification of the settings, and settings of disjoint home regions may
    not be weakly correlated to each other.

    By default the setting side ranges over the full specifications (atoms)
    of the subalgebra generated by each minimal set of setting generators,
    tested against every event associated to the past of that set's home
    regions.  `all_setting_events` widens the setting side to the whole
    setting subalgebra; that is strictly stronger, since weak correlation to
    a union of specifications is not implied by the per-specification checks.
    """
    if not theory.settings:
        return ConditionReport(condition="fos", holds=True, detail=(("no settings declared", True),))
    site = theory.site
    space = theory.space
    gens = list(dict.fromkeys((s.event.mask, s.region.mask) for s in theory.settings))
    # minimal-support grouping: event mask -> set of home-region unions to test at
    membership: dict[frozenset, set] = {}
    spec_masks: dict[frozenset, set] = {}
    for bits in range(1, 1 << len(gens)):
        subset = frozenset(i for i in range(len(gens)) if (bits >> i) & 1)
        alg = generate_subalgebra(space, [Event(space, gens[i][0]) for i in subset])
        membership[subset] = {m for m in _algebra_masks(alg)}
        spec_masks[subset] = set(alg.atoms)
    test_at: dict[int, set[int]] = {}
    for subset, masks in membership.items():
        candidates = masks if all_setting_events else spec_masks[subset]
        for m in candidates:
            minimal = not any(
                m in membership[other] for other in membership if other < subset
            )
            if minimal:
                region_union = 0
                for i in subset:
                    region_union |= gens[i][1]
                test_at.setdefault(m, set()).add(region_union)

    tested = 0
    for past_home in sorted({rm for homes in test_at.values() for rm in homes}):
        past_mask = site.past_mask(past_home) & ~past_home
        p_sub = theory.subalgebra_within(past_mask)
        if len(p_sub.atoms) > _ALGEBRA_ATOM_CAP:
            raise ModelTooLargeError("past algebra too large for the freedom-of-settings sweep")
        targets = [m for m, homes in test_at.items() if past_home in homes]
        verdict = _fos_sweep(theory, p_sub, targets)
        if verdict is not None:
            c_mask, a_mask = verdict
            return ConditionReport(
                condition="fos",
                holds=False,
                witness=Witness(
                    description="past event weakly correlated to a setting",
                    region=_region_names(theory, past_mask),
                    events={
                        "influencing": space.names_of(c_mask),
                        "setting": space.names_of(a_mask),
                    },
                    data={
                        "influencing": theory.event_name(Event(space, c_mask)),
                        "setting": theory.event_name(Event(space, a_mask)),
                    },
                ),
            )
        tested += len(targets)

    # settings with disjoint home regions must not be weakly correlated
    regions = sorted({rm for _, rm in gens})
    for i, ra in enumerate(regions):
        for rb in regions[i + 1 :]:
            if ra & rb:
                continue
            alg_a = generate_subalgebra(space, [Event(space, m) for m, rm in gens if rm == ra])
            alg_b = generate_subalgebra(space, [Event(space, m) for m, rm in gens if rm == rb])
            for ma in _algebra_masks(alg_a):
                for mb in _algebra_masks(alg_b):
                    for first, second in ((ma, mb), (mb, ma)):
                        if _weakly_correlated_nontrivial(theory, first, second):
                            return ConditionReport(
                                condition="fos",
                                holds=False,
                                witness=Witness(
                                    description="settings of disjoint regions are weakly correlated",
                                    events={
                                        "first": space.names_of(first),
                                        "second": space.names_of(second),
                                    },
                                ),
                            )
    return ConditionReport(condition="fos", holds=True, detail=((f"setting events tested: {tested}", True),))


def _weakly_correlated_nontrivial(theory: Theory, a_mask: int, b_mask: int) -> bool:
    """a weakly correlated to b, with the trivial cases excluded: a must hold
    value 1 somewhere and b value 0 somewhere."""
    space = theory.space
    if isinstance(theory, OnticTheory):
        theta = theory.theta.mask
        if a_mask & theta == 0 or b_mask & theta == theta:
            return False
        return a_mask & theta & ~b_mask == 0
    ones_a = zeros_b = False
    for v in theory.basics:
        if v.value_of_mask(a_mask) == TRUE:
            ones_a = True
        if v.value_of_mask(b_mask) == FALSE:
            zeros_b = True
    if not (ones_a and zeros_b):
        return False
    return weakly_correlated(theory, Event(space, a_mask), Event(space, b_mask))


def _fos_sweep(theory: Theory, p_sub: Subalgebra, setting_masks: list[int]):
    """Scan every event of the past algebra against every setting event;
    returns (past_mask, setting_mask) for the first violation, else None."""
    atoms = p_sub.atoms
    n = len(atoms)
    if isinstance(theory, OnticTheory):
        theta = theory.theta.mask
        targets = [m for m in setting_masks if m & theta != theta]  # falsifiable settings
        atom_traces = [a & theta for a in atoms]
        for bits in range(1 << n):
            trace = 0
            mask = 0
            for i in range(n):
                if (bits >> i) & 1:
                    trace |= atom_traces[i]
                    mask |= atoms[i]
            if trace == 0:
                continue  # trivial influencer
            for m in targets:
                if trace & ~m == 0:
                    return mask, m
        return None
    basics = theory.basics
    keys = [_basic_keys(v, p_sub) for v in basics]
    prepared = []
    for m in setting_masks:
        zeros = 0
        falsifiable = False
        for i, v in enumerate(basics):
            if v.value_of_mask(m) == FALSE:
                zeros |= 1 << i
                falsifiable = True
        if falsifiable:
            prepared.append((zeros, m))
    for bits in range(1 << n):
        ones_c = zeros_c = 0
        for i, k in enumerate(keys):
            if k & ~bits == 0:
                ones_c |= 1 << i
            elif k & bits == 0:
                zeros_c |= 1 << i
        if ones_c == 0:
            continue  # influencer never definitely true
        for zeros_a, m in prepared:
            if zeros_a & ~zeros_c == 0:
                mask = 0
                for i, a in enumerate(atoms):
                    if (bits >> i) & 1:
                        mask |= a
                return mask, m
    return None


# ---------------------------------------------------------------------------
# Signalling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignalVerdict:
    """Outcome of signal detection between a setting and a spacelike event."""

    kind: str  # "none" | "strong" | "weak"
    relation: str = ""

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "relation": self.relation}


def detect_signal(theory: Theory, a: Event, ra: Region, b: Event, rb: Region) -> SignalVerdict:
    """Classify the channel from setting `a` (home `ra`) to event `b` at the
    spacelike region `rb`: strong (correlated), weak (weak correlation, closed
    under complements), or none.

    Preconditions: the regions are spacelike; `a` belongs to the setting
    algebra of its region and the freedom-of-settings check passes; on
    three-valued theories both events are definite under every basic
    valuation.  A trivial output event carries no information and yields
    "none".
    """
    if not is_spacelike(ra, rb):
        raise CheckerPreconditionError("signal detection needs spacelike regions")
    setting_events = _setting_events_within(theory, ra.mask)
    if not setting_events:
        raise CheckerPreconditionError("no setting declared inside the input region")
    setting_alg = generate_subalgebra(theory.space, setting_events)
    if not setting_alg.contains_mask(a.mask):
        raise CheckerPreconditionError("input event is not a setting of its region")
    freedom = check_freedom_of_settings(theory)
    if not freedom.holds:
        influencing = freedom.witness.data.get("influencing") or "/".join(
            freedom.witness.events.get("influencing", ())
        )
        raise CheckerPreconditionError(
            f"setting is not free: influenced by past event {influencing}"
        )
    if isinstance(theory, ThreeValuedTheory):
        for e, label in ((a, "input"), (b, "output")):
            if any(v.value_of_mask(e.mask) == INDEFINITE for v in theory.basics):
                raise CheckerPreconditionError(f"{label} event is indefinite in some basic valuation")
    if _trivial_event(theory, b):
        return SignalVerdict("none", "output event carries no information")
    if correlated(theory, a, b):
        return SignalVerdict("strong", "input and output are correlated")
    if correlated(theory, a, b.complement()):
        return SignalVerdict("strong", "input and output are anticorrelated")
    for first, second, label in (
        (b, a, "output weakly correlated to input"),
        (b.complement(), a, "output complement weakly correlated to input"),
        (b, a.complement(), "output weakly correlated to input complement"),
        (b.complement(), a.complement(), "output complement weakly correlated to input complement"),
    ):
        if _trivial_event(theory, first):
            continue
        if weakly_correlated(theory, first, second):
            return SignalVerdict("weak", label)
    return SignalVerdict("none", "no correlation between input and output")


def _trivial_event(theory: Theory, e: Event) -> bool:
    if isinstance(theory, OnticTheory):
        t = theory.theta.mask
        return e.mask & t == 0 or e.mask & t == t
    values = {v.value_of_mask(e.mask) for v in theory.basics}
    return values == {TRUE} or values == {FALSE}
