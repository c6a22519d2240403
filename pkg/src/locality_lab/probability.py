"""Probability distributions over allowed histories or basic valuations,
conditioning, screening-off checks, probabilistic freedom of settings,
correlators, and CHSH evaluation with its local deterministic bound.

Weights are stored as exact fractions (floats are converted exactly), so the
screening-off factorizations reduce to integer cross-multiplication and the
stated tolerances only matter for genuinely approximate user input.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .conditions import CheckerPreconditionError, ModelTooLargeError, _ALGEBRA_ATOM_CAP
from .histories import Event, Subalgebra
from .reports import ConditionReport, Witness
from .sites import Region, is_spacelike, joint_past, mutual_past
from .theory import OnticTheory, Theory, ThreeValuedTheory
from .valuations import FALSE, INDEFINITE, TRUE

_NORMALIZATION_TOL = Fraction(1, 10**12)


def default_tolerance() -> Fraction:
    """Checker tolerance: 1e-9 unless overridden by LOCALITY_LAB_TOL."""
    raw = os.environ.get("LOCALITY_LAB_TOL")
    if raw is None:
        return Fraction(1, 10**9)
    return Fraction(raw)


class DistributionError(ValueError):
    """Invalid distribution construction or conditioning."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact binary expansion
    if isinstance(x, str):
        return Fraction(x)
    raise DistributionError(f"unsupported weight type: {type(x).__name__}")


class Distribution:
    """Non-negative weights summing to one, carried by the allowed histories
    of an ontic theory or the basic valuations of a three-valued one."""

    __slots__ = ("carrier", "labels", "weights", "_label_index")

    def __init__(self, carrier: Theory, weights: Sequence):
        self.carrier = carrier
        self.labels = self._carrier_labels(carrier)
        ws = tuple(_as_fraction(w) for w in weights)
        if len(ws) != len(self.labels):
            raise DistributionError(
                f"expected {len(self.labels)} weights, got {len(ws)}"
            )
        if any(w < 0 for w in ws):
            raise DistributionError("weights must be non-negative")
        total = sum(ws)
        if abs(total - 1) > _NORMALIZATION_TOL:
            raise DistributionError(f"weights sum to {total}, not 1")
        self.weights = ws
        self._label_index = {n: i for i, n in enumerate(self.labels)}

    @staticmethod
    def _carrier_labels(carrier: Theory) -> tuple[str, ...]:
        if isinstance(carrier, OnticTheory):
            return carrier.theta.members()
        return tuple(v.label() for v in carrier.basics)

    @classmethod
    def from_mapping(cls, carrier: Theory, mapping: Mapping[str, object]) -> "Distribution":
        labels = cls._carrier_labels(carrier)
        unknown = set(mapping) - set(labels)
        if unknown:
            raise DistributionError(f"weights for unknown carriers: {sorted(unknown)}")
        return cls(carrier, [mapping.get(n, 0) for n in labels])

    @classmethod
    def uniform(cls, carrier: Theory) -> "Distribution":
        labels = cls._carrier_labels(carrier)
        w = Fraction(1, len(labels))
        return cls(carrier, [w] * len(labels))

    def weight_of(self, label: str) -> Fraction:
        return self.weights[self._label_index[label]]

    # --- event probabilities --------------------------------------------

    def _support_bits_of_event(self, e: Event) -> int:
        """Carrier positions where the event holds value 1."""
        carrier = self.carrier
        if isinstance(carrier, OnticTheory):
            bits = 0
            for i, name in enumerate(self.labels):
                if (e.mask >> carrier.space.index(name)) & 1:
                    bits |= 1 << i
            return bits
        bits = 0
        for i, v in enumerate(carrier.basics):
            if v.value_of_mask(e.mask) == TRUE:
                bits |= 1 << i
        return bits

    def mass_of_bits(self, bits: int) -> Fraction:
        total = Fraction(0)
        m = bits
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            total += self.weights[i]
        return total

    def mu(self, e: Event) -> Fraction:
        """Probability of the event (three-valued carriers: mass of basics
        valuing it 1)."""
        return self.mass_of_bits(self._support_bits_of_event(e))

    def condition_on_bits(self, bits: int) -> "Distribution":
        mass = self.mass_of_bits(bits)
        if mass == 0:
            raise DistributionError("conditioning on a zero-probability event")
        ws = [
            (w / mass if (bits >> i) & 1 else Fraction(0))
            for i, w in enumerate(self.weights)
        ]
        new = object.__new__(Distribution)
        new.carrier = self.carrier
        new.labels = self.labels
        new.weights = tuple(ws)
        new._label_index = self._label_index
        return new


def condition(d: Distribution, e: Event) -> Distribution:
    """Bayesian restriction to the event and renormalization."""
    return d.condition_on_bits(d._support_bits_of_event(e))


# ---------------------------------------------------------------------------
# Screening off
# ---------------------------------------------------------------------------

def check_so2(
    theory: OnticTheory,
    d: Distribution,
    ra: Region,
    rb: Region,
    tol: Fraction | None = None,
) -> ConditionReport:
    """SO2: conditioned on any full specification of the joint past, events of
    the two spacelike regions are statistically independent."""
    return _check_screening(theory, d, ra, rb, joint_past(ra, rb), "so2", tol)


def check_so1(
    theory: OnticTheory,
    d: Distribution,
    ra: Region,
    rb: Region,
    tol: Fraction | None = None,
) -> ConditionReport:
    """SO1: as SO2 with the mutual past (intersection of the two pasts)."""
    return _check_screening(theory, d, ra, rb, mutual_past(ra, rb), "so1", tol)


def _int_weights(d: Distribution) -> list[int]:
    """Weights scaled by a common denominator; factorization differences are
    then integer cross-multiplications (the scale cancels)."""
    denom = 1
    for w in d.weights:
        denom = math.lcm(denom, w.denominator)
    return [int(w * denom) for w in d.weights]


def _int_mass(iw: list[int], bits: int) -> int:
    total = 0
    m = bits
    while m:
        i = (m & -m).bit_length() - 1
        m &= m - 1
        total += iw[i]
    return total


def _check_screening(theory, d, ra, rb, past_region, name, tol) -> ConditionReport:
    if not isinstance(theory, OnticTheory):
        raise CheckerPreconditionError("screening-off checks apply to ontic theories")
    if not is_spacelike(ra, rb):
        raise CheckerPreconditionError("screening-off checks need spacelike regions")
    if d.carrier is not theory and d.carrier != theory:
        raise CheckerPreconditionError("distribution carried by a different theory")
    tol = default_tolerance() if tol is None else Fraction(tol)
    a_sub = theory.subalgebra_of(ra)
    b_sub = theory.subalgebra_of(rb)
    p_sub = theory.subalgebra_of(past_region)
    iw = _int_weights(d)
    bits_of = lambda mask: d._support_bits_of_event(Event(theory.space, mask))
    worst = Fraction(0)
    for spec in p_sub.atoms:
        spec_bits = bits_of(spec)
        n_p = _int_mass(iw, spec_bits)
        if n_p == 0:
            continue
        a_cells = [(a, bits_of(a) & spec_bits) for a in a_sub.atoms]
        b_cells = [(b, bits_of(b) & spec_bits) for b in b_sub.atoms]
        # independence on the atom grid extends to all events by additivity
        exact = all(
            _int_mass(iw, ab & bb) * n_p == _int_mass(iw, ab) * _int_mass(iw, bb)
            for _, ab in a_cells
            for _, bb in b_cells
        )
        if exact:
            continue
        # the tolerance applies to every event pair, so exhaust the algebras
        if max(len(a_sub.atoms), len(b_sub.atoms)) > _ALGEBRA_ATOM_CAP:
            raise ModelTooLargeError("region algebras too large for the screening sweep")
        for a_mask in _all_unions(a_sub):
            a_bits = bits_of(a_mask) & spec_bits
            n_a = _int_mass(iw, a_bits)
            for b_mask in _all_unions(b_sub):
                b_bits = bits_of(b_mask) & spec_bits
                n_b = _int_mass(iw, b_bits)
                n_ab = _int_mass(iw, a_bits & b_bits)
                diff = Fraction(abs(n_ab * n_p - n_a * n_b), n_p * n_p)
                if diff > tol:
                    return ConditionReport(
                        condition=name,
                        holds=False,
                        witness=Witness(
                            description="conditional factorization fails",
                            region=tuple(sorted(past_region.members)),
                            events={
                                "first": theory.space.names_of(a_mask),
                                "second": theory.space.names_of(b_mask),
                                "full_specification": theory.space.names_of(spec),
                            },
                            data={"difference": diff},
                        ),
                    )
                worst = max(worst, diff)
    return ConditionReport(condition=name, holds=True, detail=(("worst deviation", str(worst)),))


def _all_unions(sub: Subalgebra):
    atoms = sub.atoms
    for bits in range(1 << len(atoms)):
        mask = 0
        for i, a in enumerate(atoms):
            if (bits >> i) & 1:
                mask |= a
        yield mask


def check_probabilistic_free_settings(
    theory: ThreeValuedTheory,
    d: Distribution,
    tol: Fraction | None = None,
) -> ConditionReport:
    """The probability of a past event being true, given that it is definite,
    may not depend on which setting cell obtains.

    Tested events: the declared past generators (their complements satisfy
    the condition iff they do), and, when every basic valuation is fully
    definite, the whole past algebra, where the condition is classical
    measurement independence.  Sweeping the full algebra of a genuinely
    indefinite theory is not meaningful: joint events spanning both wings'
    records are definite only on setting-entangled row sets, so even the
    uniform distribution would fail.
    """
    if not isinstance(theory, ThreeValuedTheory):
        raise CheckerPreconditionError("probabilistic freedom applies to three-valued theories")
    if not theory.settings:
        raise CheckerPreconditionError("no settings declared")
    tol = default_tolerance() if tol is None else Fraction(tol)
    site = theory.site
    space = theory.space
    home = 0
    for s in theory.settings:
        home |= s.region.mask
    past_mask = site.past_mask(home) & ~home
    p_sub = theory.subalgebra_within(past_mask)
    if len(p_sub.atoms) > _ALGEBRA_ATOM_CAP:
        raise ModelTooLargeError("past algebra too large for the probabilistic freedom sweep")
    from .histories import generate_subalgebra  # local import to avoid cycles at module load

    setting_alg = generate_subalgebra(space, [s.event for s in theory.settings])
    iw = _int_weights(d)
    spec_bits = []
    for spec in setting_alg.atoms:
        bits = d._support_bits_of_event(Event(space, spec))
        if _int_mass(iw, bits) > 0:
            spec_bits.append((spec, bits))
    basics = theory.basics

    candidates = [g.mask for g in theory.delta.generators_within(past_mask)]
    if all(v.is_definite_everywhere() for v in basics):
        candidates = list(_all_unions(p_sub))

    seen: set[int] = set()
    for c_mask in candidates:
        if c_mask in seen:
            continue
        seen.add(c_mask)
        ones = definite = 0
        for i, v in enumerate(basics):
            t = v.value_of_mask(c_mask)
            if t != INDEFINITE:
                definite |= 1 << i
                if t == TRUE:
                    ones |= 1 << i
        n_def = _int_mass(iw, definite)
        if n_def == 0:
            continue
        n_ones = _int_mass(iw, ones)
        for spec, bits in spec_bits:
            n_def_s = _int_mass(iw, definite & bits)
            if n_def_s == 0:
                continue
            n_ones_s = _int_mass(iw, ones & bits)
            if abs(Fraction(n_ones_s, n_def_s) - Fraction(n_ones, n_def)) > tol:
                return ConditionReport(
                    condition="prob-fos",
                    holds=False,
                    witness=Witness(
                        description="past event's definite-value distribution depends on the settings",
                        events={
                            "past_event": space.names_of(c_mask),
                            "setting_cell": space.names_of(spec),
                        },
                        data={
                            "past_event": theory.event_name(Event(space, c_mask)),
                            "conditional": Fraction(n_ones_s, n_def_s),
                            "unconditional": Fraction(n_ones, n_def),
                        },
                    ),
                )
    return ConditionReport(condition="prob-fos", holds=True)


# ---------------------------------------------------------------------------
# CHSH
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChshScenario:
    """Two-setting, two-outcome scenario: setting and outcome events per wing.

    Truth value 1 maps to outcome +1 and 0 to -1; the CHSH combination uses
    the + + + - sign pattern.
    """

    a_setting: Event
    b_setting: Event
    a_outcome: Event
    b_outcome: Event

    def cell_event(self, sa: bool, sb: bool) -> Event:
        a = self.a_setting if sa else self.a_setting.complement()
        b = self.b_setting if sb else self.b_setting.complement()
        return a & b


def _outcome_sign_bits(d: Distribution, e: Event) -> int:
    carrier = d.carrier
    if isinstance(carrier, OnticTheory):
        return d._support_bits_of_event(e)
    bits = 0
    for i, v in enumerate(carrier.basics):
        t = v.value_of_mask(e.mask)
        if d.weights[i] > 0 and t == INDEFINITE:
            raise CheckerPreconditionError(
                "scenario event is indefinite in a supported valuation"
            )
        if t == TRUE:
            bits |= 1 << i
    return bits


def correlator(
    d: Distribution, scen: ChshScenario, sa: bool, sb: bool, tol: Fraction | None = None
) -> Fraction:
    """Expectation of the +-1-encoded outcome product in one setting cell."""
    cell_bits = _outcome_sign_bits(d, scen.cell_event(sa, sb))
    n_cell = d.mass_of_bits(cell_bits)
    if n_cell == 0:
        raise CheckerPreconditionError(f"setting cell ({int(sa)},{int(sb)}) has probability zero")
    a_bits = _outcome_sign_bits(d, scen.a_outcome)
    b_bits = _outcome_sign_bits(d, scen.b_outcome)
    same = cell_bits & ~(a_bits ^ b_bits)
    diff = cell_bits & (a_bits ^ b_bits)
    return (d.mass_of_bits(same) - d.mass_of_bits(diff)) / n_cell


def chsh_value(d: Distribution, scen: ChshScenario, tol: Fraction | None = None) -> Fraction:
    """|E(0,0) + E(0,1) + E(1,0) - E(1,1)|."""
    e00 = correlator(d, scen, False, False, tol)
    e01 = correlator(d, scen, False, True, tol)
    e10 = correlator(d, scen, True, False, tol)
    e11 = correlator(d, scen, True, True, tol)
    return abs(e00 + e01 + e10 - e11)


def local_deterministic_strategies() -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All 16 pairs of per-wing deterministic responses (outcome per setting)."""
    responses = list(itertools.product((0, 1), repeat=2))
    return [(fa, fb) for fa in responses for fb in responses]


def strategy_chsh(fa: tuple[int, int], fb: tuple[int, int]) -> Fraction:
    def sign(v: int) -> int:
        return 1 if v else -1

    e = {
        (sa, sb): Fraction(sign(fa[sa]) * sign(fb[sb]))
        for sa in (0, 1)
        for sb in (0, 1)
    }
    return abs(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])


def local_deterministic_bound() -> Fraction:
    """Maximum CHSH value over all local deterministic strategies, exactly."""
    return max(strategy_chsh(fa, fb) for fa, fb in local_deterministic_strategies())
