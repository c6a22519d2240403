"""Built-in models: the two-wing experiment with a shared past (sixteen basic
valuations over a 64-history space), the PR-box distribution on it, the
box/ball pair illustrating loss of ontic definiteness, the "conspiriton"
counterexample to freedom of settings, and a one-shot verification suite.

The two-wing model lives on a five-point site: a past point below both wings,
and a setting point below a result point inside each wing.  Each wing carries
a setting event and a result event; the past point carries four events, one
"record" per wing per setting value.  A history fixes all eight bits subject
to the constraint that the record matching the local setting equals the local
result; the record for the setting not chosen is unconstrained, which is what
makes it indefinite in the basic valuations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .conditions import (
    CheckerPreconditionError,
    check_el_three_valued,
    check_freedom_of_settings,
)
from .histories import AssociationMap, Event, HistorySpace, full_specifications
from .probability import (
    ChshScenario,
    Distribution,
    check_probabilistic_free_settings,
    chsh_value,
    correlator,
    default_tolerance,
    local_deterministic_bound,
)
from .reports import ConditionReport
from .sites import CausalSite, Region
from .theory import OnticTheory, Setting, ThreeValuedTheory, check_ontic_definiteness
from .valuations import FALSE, INDEFINITE, TRUE, ThreeValuation, TruthValue

EVENT_ORDER = ("A_s", "B_s", "A_r", "B_r", "P_A0", "P_A1", "P_B0", "P_B1")

DERIVATION_CHOICES = ("full", "pair_14", "pair_23")


class EprbModelError(ValueError):
    """Invalid derivation choice or closure data."""


def build_eprb_site() -> tuple[CausalSite, dict[str, Region]]:
    """Five-point site: p below both wings, setting below result per wing."""
    site = CausalSite(
        ["p", "a_s", "a_r", "b_s", "b_r"],
        [("p", "a_s"), ("a_s", "a_r"), ("p", "b_s"), ("b_s", "b_r")],
    )
    regions = {
        "A": site.region(["a_s", "a_r"]),
        "B": site.region(["b_s", "b_r"]),
        "P": site.region(["p"]),
        "A_s": site.region(["a_s"]),
        "A_r": site.region(["a_r"]),
        "B_s": site.region(["b_s"]),
        "B_r": site.region(["b_r"]),
    }
    return site, regions


def _history_bits() -> list[tuple[int, ...]]:
    """All 8-bit assignments (in EVENT_ORDER) whose chosen-setting record
    matches the local result; 64 of them."""
    out = []
    for bits in itertools.product((0, 1), repeat=8):
        a_s, b_s, a_r, b_r, p_a0, p_a1, p_b0, p_b1 = bits
        if (p_a1 if a_s else p_a0) != a_r:
            continue
        if (p_b1 if b_s else p_b0) != b_r:
            continue
        out.append(bits)
    return out


def _history_name(bits: Sequence[int]) -> str:
    return "h" + "".join(str(b) for b in bits)


def eprb_truth_table() -> tuple[tuple[TruthValue, ...], ...]:
    """The sixteen basic valuations' values on the eight named events, rows
    ordered by the binary count of (A_s, B_s, A_r, B_r)."""
    rows = []
    for idx in range(16):
        a_s, b_s, a_r, b_r = (idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        p_a0 = Fraction(a_r) if a_s == 0 else INDEFINITE
        p_a1 = Fraction(a_r) if a_s == 1 else INDEFINITE
        p_b0 = Fraction(b_r) if b_s == 0 else INDEFINITE
        p_b1 = Fraction(b_r) if b_s == 1 else INDEFINITE
        rows.append(
            (Fraction(a_s), Fraction(b_s), Fraction(a_r), Fraction(b_r), p_a0, p_a1, p_b0, p_b1)
        )
    return tuple(rows)


@dataclass(frozen=True)
class EprbModel:
    """The two-wing model: its theory, site regions, named events, per-row
    derivation families, and the realized closure values (w, x, y, z)."""

    theory: ThreeValuedTheory
    site: CausalSite
    regions: dict[str, Region]
    events: dict[str, Event]
    row_families: tuple[tuple[str, ...], ...]  # 16 rows x 4 completion names
    closure: tuple[TruthValue, TruthValue, TruthValue, TruthValue]
    derivation_choice: str

    def scenario(self) -> ChshScenario:
        return ChshScenario(
            a_setting=self.events["A_s"],
            b_setting=self.events["B_s"],
            a_outcome=self.events["A_r"],
            b_outcome=self.events["B_r"],
        )


def _normalize_choice(choice) -> str | None:
    if isinstance(choice, str):
        squashed = choice.replace("_", "").lower()
        for known in DERIVATION_CHOICES:
            if squashed == known.replace("_", ""):
                return known
        raise EprbModelError(f"unknown derivation choice {choice!r}")
    return None


def build_eprb_model(derivation_choice="full") -> EprbModel:
    """Construct the sixteen-basic model.

    `derivation_choice` picks each row's derivation set out of its family of
    four definite completions: "full" takes all four, "pair_14" the two where
    the free records agree, "pair_23" the two where they differ.  A mapping
    {row index (1-16) -> iterable of history names} supplies explicit sets,
    which must straddle both free records; the closure values (w, x, y, z)
    must then come out uniform across the rows.
    """
    named_choice = _normalize_choice(derivation_choice)
    site, regions = build_eprb_site()
    all_bits = _history_bits()
    space = HistorySpace([_history_name(b) for b in all_bits])
    events = {
        name: Event(space, sum(1 << i for i, b in enumerate(all_bits) if b[pos]))
        for pos, name in enumerate(EVENT_ORDER)
    }
    delta = AssociationMap.build(
        site,
        [
            (regions["A_s"], [events["A_s"]]),
            (regions["A_r"], [events["A_r"]]),
            (regions["B_s"], [events["B_s"]]),
            (regions["B_r"], [events["B_r"]]),
            (regions["P"], [events["P_A0"], events["P_A1"], events["P_B0"], events["P_B1"]]),
        ],
    )

    table = eprb_truth_table()
    basics = []
    families = []
    realized_closures = []
    for idx in range(16):
        a_s, b_s, a_r, b_r = (idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        a_free = "P_A1" if a_s == 0 else "P_A0"
        b_free = "P_B1" if b_s == 0 else "P_B0"
        a_pos = EVENT_ORDER.index(a_free)
        b_pos = EVENT_ORDER.index(b_free)
        family = []
        for fa, fb in ((0, 0), (0, 1), (1, 0), (1, 1)):
            bits = [a_s, b_s, a_r, b_r, 0, 0, 0, 0]
            bits[EVENT_ORDER.index("P_A0")] = a_r if a_s == 0 else fa
            bits[EVENT_ORDER.index("P_A1")] = a_r if a_s == 1 else fa
            bits[EVENT_ORDER.index("P_B0")] = b_r if b_s == 0 else fb
            bits[EVENT_ORDER.index("P_B1")] = b_r if b_s == 1 else fb
            family.append(_history_name(bits))
        families.append(tuple(family))

        if named_choice == "full":
            chosen = family
        elif named_choice == "pair_14":
            chosen = [family[0], family[3]]
        elif named_choice == "pair_23":
            chosen = [family[1], family[2]]
        else:
            try:
                chosen = list(derivation_choice[idx + 1])
            except (KeyError, TypeError) as exc:
                raise EprbModelError(f"no derivation set supplied for row {idx + 1}") from exc
            bad = [h for h in chosen if h not in family]
            if bad:
                raise EprbModelError(
                    f"row {idx + 1} derivation set leaves its completion family: {bad}"
                )
        valuation = ThreeValuation.from_histories(space, chosen, name=f"row{idx + 1:02d}")
        for pos, name in enumerate(EVENT_ORDER):
            if valuation.value(events[name]) != table[idx][pos]:
                raise EprbModelError(
                    f"row {idx + 1} derivation set does not realize the declared value of {name}"
                )
        basics.append(valuation)

        a_ind = events[a_free]
        b_ind = events[b_free]
        realized_closures.append(
            (
                valuation.value(a_ind & b_ind),
                valuation.value(a_ind & b_ind.complement()),
                valuation.value(a_ind.complement() & b_ind),
                valuation.value(a_ind.complement() & b_ind.complement()),
            )
        )

    uniform = set(realized_closures)
    if len(uniform) != 1:
        offenders = [
            i + 1
            for i, c in enumerate(realized_closures)
            if c != realized_closures[0]
        ]
        raise EprbModelError(
            f"closure values (w, x, y, z) differ across rows; offending rows: {offenders}"
        )

    theory = ThreeValuedTheory(
        space,
        site,
        delta,
        basics,
        settings=[
            Setting(events["A_s"], regions["A_s"]),
            Setting(events["B_s"], regions["B_s"]),
        ],
        events=dict(events),
    )
    return EprbModel(
        theory=theory,
        site=site,
        regions=regions,
        events=dict(events),
        row_families=tuple(families),
        closure=realized_closures[0],
        derivation_choice=named_choice or "explicit",
    )


def pr_box_distribution(
    model: EprbModel, setting_weights: Sequence | None = None
) -> Distribution:
    """Within each setting cell, the two outcome pairs satisfying
    (result XOR result) = (setting AND setting) get equal weight."""
    if setting_weights is None:
        setting_weights = [Fraction(1, 4)] * 4
    ws = [Fraction(w) for w in setting_weights]
    if len(ws) != 4:
        raise EprbModelError("need four setting-cell weights")
    if any(w <= 0 for w in ws):
        raise EprbModelError("setting-cell weights must be strictly positive")
    if sum(ws) != 1:
        raise EprbModelError("setting-cell weights must sum to 1")
    weights = []
    for idx in range(16):
        a_s, b_s, a_r, b_r = (idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        cell = ws[(a_s << 1) | b_s]
        weights.append(cell / 2 if (a_r ^ b_r) == (a_s & b_s) else Fraction(0))
    return Distribution(model.theory, weights)


def uniform_outcome_distribution(model: EprbModel) -> Distribution:
    """Uniform over all sixteen basic valuations: independent fair outcomes."""
    return Distribution.uniform(model.theory)


# ---------------------------------------------------------------------------
# Box/ball and conspiriton
# ---------------------------------------------------------------------------

def build_box_ball_models() -> tuple[OnticTheory, ThreeValuedTheory]:
    """A box that may be open and a ball that may be inside.

    The ontic theory allows all four combinations.  The indefinite variant
    keeps the two open-box histories but replaces the closed-box ones with a
    single basic valuation on which "ball inside" has no definite value.
    """
    site = CausalSite(["t0", "t1"], [("t0", "t1")])
    space = HistorySpace(["open_in", "open_out", "closed_in", "closed_out"])
    box_open = space.event(["open_in", "open_out"])
    ball_in = space.event(["open_in", "closed_in"])
    delta = AssociationMap.build(
        site,
        [(site.region(["t1"]), [box_open]), (site.region(["t0"]), [ball_in])],
    )
    named = {"box_open": box_open, "ball_inside": ball_in}
    ontic = OnticTheory(space, space.everything, site, delta, events=named)
    indefinite = ThreeValuedTheory(
        space,
        site,
        delta,
        basics=[
            ThreeValuation.from_histories(space, ["open_in"], name="open_in"),
            ThreeValuation.from_histories(space, ["open_out"], name="open_out"),
            ThreeValuation.from_histories(space, ["closed_in", "closed_out"], name="closed"),
        ],
        events=named,
    )
    return ontic, indefinite


def build_conspiriton_model() -> OnticTheory:
    """Two spacelike events perfectly correlated through a past event that
    also determines the setting; exists as the freedom-of-settings
    counterexample."""
    site = CausalSite(["c", "a", "b"], [("c", "a"), ("c", "b")])
    names = []
    for c_bit, a_bit, b_bit in itertools.product((0, 1), repeat=3):
        names.append(f"h{c_bit}{a_bit}{b_bit}")
    space = HistorySpace(names)
    ev_c = space.event([n for n in names if n[1] == "1"])
    ev_a = space.event([n for n in names if n[2] == "1"])
    ev_b = space.event([n for n in names if n[3] == "1"])
    theta = space.event(["h000", "h111"])
    delta = AssociationMap.build(
        site,
        [
            (site.region(["c"]), [ev_c]),
            (site.region(["a"]), [ev_a]),
            (site.region(["b"]), [ev_b]),
        ],
    )
    return OnticTheory(
        space,
        theta,
        site,
        delta,
        settings=[Setting(ev_a, site.region(["a"]))],
        events={"C": ev_c, "A": ev_a, "B": ev_b},
    )


# ---------------------------------------------------------------------------
# One-shot verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EprbVerification:
    """Aggregated verdicts for one model and one distribution."""

    antecedent_identity: bool
    el_with_settings: ConditionReport
    freedom_of_settings: ConditionReport
    fj_sweep: bool
    ontic_definiteness: ConditionReport
    no_signalling: bool
    probabilistic_freedom: ConditionReport
    correlators: tuple[Fraction, Fraction, Fraction, Fraction]
    chsh: Fraction
    local_bound: Fraction
    closure: tuple

    def as_expected(self) -> bool:
        """The model's advertised profile: every causal item passes while
        ontic definiteness fails."""
        return (
            self.antecedent_identity
            and self.el_with_settings.holds
            and self.freedom_of_settings.holds
            and self.fj_sweep
            and not self.ontic_definiteness.holds
            and self.no_signalling
            and self.probabilistic_freedom.holds
        )

    def to_json_dict(self) -> dict:
        return {
            "antecedent_identity": self.antecedent_identity,
            "el_with_settings": self.el_with_settings.to_json_dict(),
            "freedom_of_settings": self.freedom_of_settings.to_json_dict(),
            "fj_sweep": self.fj_sweep,
            "ontic_definiteness": self.ontic_definiteness.to_json_dict(),
            "no_signalling": self.no_signalling,
            "probabilistic_freedom": self.probabilistic_freedom.to_json_dict(),
            "correlators": [str(e) for e in self.correlators],
            "chsh": float(self.chsh),
            "local_bound": float(self.local_bound),
            "closure_wxyz": [str(v) for v in self.closure],
            "as_expected": self.as_expected(),
        }


def _antecedent_identity(model: EprbModel) -> bool:
    ev = model.events
    for wing in ("A", "B"):
        s, r = ev[f"{wing}_s"], ev[f"{wing}_r"]
        p0, p1 = ev[f"P_{wing}0"], ev[f"P_{wing}1"]
        combined = (s & p1) | (s.complement() & p0)
        if any(v.value(combined) != v.value(r) for v in model.theory.basics):
            return False
    return True


def _fj_sweep(model: EprbModel) -> bool:
    """No finest-grained past event is non-trivially weakly correlated to any
    full specification of the settings (a named slice of the freedom check)."""
    from .conditions import _weakly_correlated_nontrivial
    from .histories import generate_subalgebra

    theory = model.theory
    past_alg = theory.subalgebra_of(model.regions["P"])
    setting_alg = generate_subalgebra(theory.space, [s.event for s in theory.settings])
    for spec in full_specifications(past_alg):
        for cell in setting_alg.atoms:
            if _weakly_correlated_nontrivial(theory, spec.mask, cell):
                return False
    return True


def _no_signalling(model: EprbModel, dist: Distribution, tol: Fraction) -> bool:
    scen = model.scenario()
    for local, remote, outcome in (("A_s", "B_s", "A_r"), ("B_s", "A_s", "B_r")):
        for local_val in (False, True):
            marginals = []
            for remote_val in (False, True):
                loc = model.events[local] if local_val else model.events[local].complement()
                rem = model.events[remote] if remote_val else model.events[remote].complement()
                cell_bits = dist._support_bits_of_event(loc & rem)
                mass = dist.mass_of_bits(cell_bits)
                if mass == 0:
                    continue
                out_bits = dist._support_bits_of_event(model.events[outcome])
                marginals.append(dist.mass_of_bits(cell_bits & out_bits) / mass)
            if len(marginals) == 2 and abs(marginals[0] - marginals[1]) > tol:
                return False
    return True


def verify_eprb(model: EprbModel, dist: Distribution, tol: Fraction | None = None) -> EprbVerification:
    """Run the whole battery: the causal-antecedent identity, three-valued
    locality with the settings exemption, freedom of settings with the
    full-specification block identity, ontic definiteness (expected to fail),
    no-signalling marginals, probabilistic freedom, and the CHSH value
    against the local deterministic bound."""
    tol = default_tolerance() if tol is None else Fraction(tol)
    scen = model.scenario()
    correlators = tuple(
        correlator(dist, scen, sa, sb) for sa, sb in ((0, 0), (0, 1), (1, 0), (1, 1))
    )
    return EprbVerification(
        antecedent_identity=_antecedent_identity(model),
        el_with_settings=check_el_three_valued(model.theory, exempt_settings=True),
        freedom_of_settings=check_freedom_of_settings(model.theory),
        fj_sweep=_fj_sweep(model),
        ontic_definiteness=check_ontic_definiteness(model.theory),
        no_signalling=_no_signalling(model, dist, tol),
        probabilistic_freedom=check_probabilistic_free_settings(model.theory, dist, tol),
        correlators=correlators,
        chsh=chsh_value(dist, scen),
        local_bound=local_deterministic_bound(),
        closure=model.closure,
    )
