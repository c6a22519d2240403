"""Enumeration suites: the checker-equivalence and screening-off theorems
run wholesale over small-theory families, and the CHSH bound over two-wing
hidden-past models passing the causal conditions.

Each suite reports how many theories it swept and embeds any counterexample
as a model file, so a disagreement can be replayed through the CLI.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .conditions import (
    check_el_first,
    check_el_second,
    check_el_three_valued,
    check_freedom_of_settings,
    check_npcc_joint,
    check_npcc_mutual,
)
from .eprb import build_eprb_site
from .histories import AssociationMap, Event, HistorySpace
from .modelspec import serialize
from .probability import (
    ChshScenario,
    Distribution,
    check_probabilistic_free_settings,
    check_so1,
    check_so2,
    chsh_value,
    local_deterministic_bound,
)
from .sites import CausalSite, is_spacelike
from .theory import (
    OnticTheory,
    Setting,
    check_ontic_definiteness,
    derive_three_valued,
    enumerate_theories,
    standard_delta_family,
)

_MAX_COUNTEREXAMPLES = 5


@dataclass
class OracleResult:
    suite: str
    theories_checked: int = 0
    comparisons: int = 0
    disagreements: int = 0
    counterexamples: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.disagreements == 0

    def record_disagreement(self, model_text: str) -> None:
        self.disagreements += 1
        if len(self.counterexamples) < _MAX_COUNTEREXAMPLES:
            self.counterexamples.append(model_text)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "theories_checked": self.theories_checked,
            "comparisons": self.comparisons,
            "disagreements": self.disagreements,
            "counterexamples": self.counterexamples,
            "passed": self.passed,
            "extra": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.extra.items()},
        }


def site_catalog(max_points: int) -> list[tuple[str, CausalSite]]:
    """Deterministic family of small posets covering chains, antichains,
    merges, splits, and diamonds."""
    sites = [("point", CausalSite(["a"]))]
    if max_points >= 2:
        sites.append(("chain2", CausalSite(["a", "b"], [("a", "b")])))
        sites.append(("antichain2", CausalSite(["a", "b"])))
    if max_points >= 3:
        sites.append(("chain3", CausalSite(["a", "b", "c"], [("a", "b"), ("b", "c")])))
        sites.append(("merge3", CausalSite(["a", "b", "c"], [("a", "c"), ("b", "c")])))
        sites.append(("split3", CausalSite(["a", "b", "c"], [("a", "b"), ("a", "c")])))
    if max_points >= 4:
        sites.append(("chain4", CausalSite(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])))
        sites.append(
            ("diamond4", CausalSite(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]))
        )
        sites.append(("zigzag4", CausalSite(["a", "b", "c", "d"], [("a", "c"), ("b", "c"), ("b", "d")])))
        sites.append(("twochains4", CausalSite(["a", "b", "c", "d"], [("a", "b"), ("c", "d")])))
    return sites


def _pool_limit(n_points: int) -> int | None:
    if n_points <= 2:
        return None
    if n_points == 3:
        return 6
    return 3


def _theories(max_omega: int, max_points: int):
    for name, site in site_catalog(max_points):
        limit = _pool_limit(len(site.points))
        for omega in range(2, max_omega + 1):
            family = standard_delta_family(site, omega, limit)
            yield from enumerate_theories(site, omega, family)


def _spacelike_pairs(site: CausalSite):
    """All unordered pairs of spacelike subset regions, as masks."""
    n = len(site.points)
    pairs = []
    for am in range(1, 1 << n):
        for bm in range(am + 1, 1 << n):
            if am & bm:
                continue
            if site.past_mask(am) & bm == 0 and site.past_mask(bm) & am == 0:
                pairs.append((am, bm))
    return pairs


def run_el_equivalence(max_omega: int = 4, max_points: int = 4) -> OracleResult:
    """The two locality formulations agree on every enumerated theory."""
    result = OracleResult(suite="el-equiv")
    for theory in _theories(max_omega, max_points):
        result.theories_checked += 1
        first = check_el_first(theory).holds
        second = check_el_second(theory).holds
        result.comparisons += 1
        if first != second:
            result.record_disagreement(serialize(theory))
    return result


def run_npcc_equivalence(max_omega: int = 4, max_points: int = 4) -> OracleResult:
    """The joint- and mutual-past common-cause conditions, each quantified
    over all spacelike region pairs, agree on every enumerated theory.

    The equivalence is between the universally quantified conditions: the
    joint-to-mutual direction applies the joint version to the derived pair
    (past(A) minus past(B), past(B) minus past(A)), so verdicts on a single
    pair can differ.  Per pair, mutual-holds implies joint-holds (the mutual
    past is inside the joint past); that direction is checked pairwise.
    """
    result = OracleResult(suite="npcc-equiv")
    pair_cache: dict[CausalSite, list] = {}
    one_way_violations = 0
    for theory in _theories(max_omega, max_points):
        result.theories_checked += 1
        site = theory.site
        pairs = pair_cache.get(site)
        if pairs is None:
            pairs = [
                (site.region_from_mask(am), site.region_from_mask(bm))
                for am, bm in _spacelike_pairs(site)
            ]
            pair_cache[site] = pairs
        if not pairs:
            continue
        all_joint = True
        all_mutual = True
        for ra, rb in pairs:
            joint = check_npcc_joint(theory, ra, rb).holds
            mutual = check_npcc_mutual(theory, ra, rb).holds
            if mutual and not joint:
                one_way_violations += 1
                result.record_disagreement(serialize(theory))
            all_joint = all_joint and joint
            all_mutual = all_mutual and mutual
        result.comparisons += 1
        if all_joint != all_mutual:
            result.record_disagreement(serialize(theory))
    result.extra["pairwise_mutual_implies_joint_violations"] = one_way_violations
    return result


def _random_support_distribution(rng: random.Random, theory: OnticTheory) -> Distribution:
    n = len(theory.theta.members())
    weights = [rng.randint(0, 9) for _ in range(n)]
    if not any(weights):
        weights[rng.randrange(n)] = 1
    total = sum(weights)
    return Distribution(theory, [Fraction(w, total) for w in weights])


def run_el_so2(
    max_omega: int = 3,
    max_points: int = 3,
    seed: int = 0,
    dists_per_theory: int = 20,
    tol: Fraction | None = None,
) -> OracleResult:
    """Every locality-passing theory screens off every spacelike pair under
    random allowed-support distributions, in both SO variants."""
    result = OracleResult(suite="el-so2")
    rng = random.Random(seed)
    pair_cache: dict[CausalSite, list] = {}
    el_passing = 0
    for theory in _theories(max_omega, max_points):
        result.theories_checked += 1
        if not check_el_second(theory).holds:
            continue
        el_passing += 1
        site = theory.site
        pairs = pair_cache.get(site)
        if pairs is None:
            pairs = [
                (site.region_from_mask(am), site.region_from_mask(bm))
                for am, bm in _spacelike_pairs(site)
            ]
            pair_cache[site] = pairs
        if not pairs:
            continue
        for _ in range(dists_per_theory):
            dist = _random_support_distribution(rng, theory)
            for ra, rb in pairs:
                so2 = check_so2(theory, dist, ra, rb, tol)
                so1 = check_so1(theory, dist, ra, rb, tol)
                result.comparisons += 1
                if not so2.holds or not so1.holds or so1.holds != so2.holds:
                    result.record_disagreement(serialize(theory, dist))
    result.extra["el_passing"] = el_passing
    return result


# ---------------------------------------------------------------------------
# CHSH bound over hidden-past two-wing models
# ---------------------------------------------------------------------------

def _bell_space(lam_bits: int) -> tuple[HistorySpace, list[tuple[int, ...]]]:
    combos = list(itertools.product((0, 1), repeat=4 + lam_bits))
    names = ["h" + "".join(str(b) for b in bits) for bits in combos]
    return HistorySpace(names), combos


def _bell_theory(lam_bits: int, theta_names) -> OnticTheory:
    site, regions = build_eprb_site()
    space, combos = _bell_space(lam_bits)
    bit_event = lambda pos: Event(
        space, sum(1 << i for i, bits in enumerate(combos) if bits[pos])
    )
    events = {
        "A_s": bit_event(0),
        "B_s": bit_event(1),
        "A_r": bit_event(2),
        "B_r": bit_event(3),
    }
    for k in range(lam_bits):
        events[f"L{k + 1}"] = bit_event(4 + k)
    delta = AssociationMap.build(
        site,
        [
            (regions["A_s"], [events["A_s"]]),
            (regions["A_r"], [events["A_r"]]),
            (regions["B_s"], [events["B_s"]]),
            (regions["B_r"], [events["B_r"]]),
            (regions["P"], [events[f"L{k + 1}"] for k in range(lam_bits)]),
        ],
    )
    return OnticTheory(
        space,
        space.event(theta_names),
        site,
        delta,
        settings=[Setting(events["A_s"], regions["A_s"]), Setting(events["B_s"], regions["B_s"])],
        events=events,
    )


def _strategy_theta(fa, fb) -> list[str]:
    names = []
    for sa, sb, lam in itertools.product((0, 1), (0, 1), (0, 1)):
        bits = (sa, sb, fa[(lam, sa)], fb[(lam, sb)], lam)
        names.append("h" + "".join(str(b) for b in bits))
    return names


def _passes_causal_conditions(theory: OnticTheory) -> bool:
    derived = derive_three_valued(theory)
    if not check_el_three_valued(derived, exempt_settings=True).holds:
        return False
    if not check_freedom_of_settings(theory).holds:
        return False
    return check_ontic_definiteness(derived).holds


def _setting_cells_inhabited(theory: OnticTheory) -> bool:
    a, b = theory.events["A_s"], theory.events["B_s"]
    theta = theory.theta.mask
    for ea in (a, a.complement()):
        for eb in (b, b.complement()):
            if (ea & eb).mask & theta == 0:
                return False
    return True


def _product_distribution(rng: random.Random, theory: OnticTheory, lam_bits: int) -> Distribution:
    """Setting-cell weights times hidden-past weights: the probabilistic
    freedom condition holds by construction."""
    cell_w = [rng.randint(1, 5) for _ in range(4)]
    lam_w = [rng.randint(1, 5) for _ in range(1 << lam_bits)]
    cell_total = sum(cell_w)
    lam_total = sum(lam_w)
    weights = []
    for name in theory.theta.members():
        bits = [int(c) for c in name[1:]]
        cell = (bits[0] << 1) | bits[1]
        lam = 0
        for k in range(lam_bits):
            lam = (lam << 1) | bits[4 + k]
        weights.append(Fraction(cell_w[cell], cell_total) * Fraction(lam_w[lam], lam_total))
    total = sum(weights)
    return Distribution(theory, [w / total for w in weights])


def run_bell_bound(seed: int = 0, random_theories: int = 40, dists_per_theory: int = 3) -> OracleResult:
    """Max CHSH over hidden-past two-wing theories passing settings-exempt
    locality, freedom of settings, and ontic definiteness, under
    distributions passing probabilistic freedom: exactly the local bound.

    Systematic part: all 256 deterministic response pairs to (hidden bit,
    local setting).  Random part: seeded allowed-set samples over one- and
    two-bit hidden pasts, filtered through the same conditions.
    """
    result = OracleResult(suite="bell-bound")
    rng = random.Random(seed)
    bound = local_deterministic_bound()
    max_seen = Fraction(0)
    passing = 0

    responses = list(itertools.product((0, 1), repeat=4))

    def as_map(bits):
        return {(lam, s): bits[(lam << 1) | s] for lam in (0, 1) for s in (0, 1)}

    for fa_bits in responses:
        for fb_bits in responses:
            theta = _strategy_theta(as_map(fa_bits), as_map(fb_bits))
            theory = _bell_theory(1, sorted(set(theta)))
            result.theories_checked += 1
            if not (_setting_cells_inhabited(theory) and _passes_causal_conditions(theory)):
                result.record_disagreement(serialize(theory))
                continue
            passing += 1
            scen = ChshScenario(
                theory.events["A_s"], theory.events["B_s"], theory.events["A_r"], theory.events["B_r"]
            )
            derived = derive_three_valued(theory)
            dists = [Distribution.uniform(theory)]
            dists += [_product_distribution(rng, theory, 1) for _ in range(dists_per_theory)]
            for dist in dists:
                ddist = Distribution(derived, dist.weights)
                if not check_probabilistic_free_settings(derived, ddist).holds:
                    continue
                value = chsh_value(dist, scen)
                result.comparisons += 1
                max_seen = max(max_seen, value)
                if value > bound:
                    result.record_disagreement(serialize(theory, dist))

    for lam_bits in (1, 2):
        space, _ = _bell_space(lam_bits)
        for _ in range(random_theories):
            chosen = [n for n in space.names if rng.random() < 0.4]
            if not chosen:
                continue
            theory = _bell_theory(lam_bits, chosen)
            result.theories_checked += 1
            if not (_setting_cells_inhabited(theory) and _passes_causal_conditions(theory)):
                continue
            passing += 1
            scen = ChshScenario(
                theory.events["A_s"], theory.events["B_s"], theory.events["A_r"], theory.events["B_r"]
            )
            derived = derive_three_valued(theory)
            for _ in range(dists_per_theory):
                dist = _product_distribution(rng, theory, lam_bits)
                ddist = Distribution(derived, dist.weights)
                if not check_probabilistic_free_settings(derived, ddist).holds:
                    continue
                value = chsh_value(dist, scen)
                result.comparisons += 1
                max_seen = max(max_seen, value)
                if value > bound:
                    result.record_disagreement(serialize(theory, dist))

    result.extra["passing_theories"] = passing
    result.extra["max_chsh"] = max_seen
    result.extra["local_bound"] = bound
    return result
