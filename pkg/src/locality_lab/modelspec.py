"""Line-oriented model files: parser with located diagnostics, theory
builder, and a canonical serializer whose output parses back to an equal
theory.

Format: `section:` headers, `name = value` entries, `#` comments, blank
lines ignored.  Sections: site (points, order), histories (names), theta
(names; two-valued models only), events (name = history list), regions
(name = point list), assoc (event = region name or point list; an event may
carry several rows), settings (event = home region), valuations (name =
derivation set; presence makes the model three-valued), distribution
(carrier name = weight, "p/q" or decimal).  Every referenced name must be
declared on an earlier line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .histories import AssociationMap, Event, HistorySpace
from .probability import Distribution
from .sites import CausalSite, Region, SiteError
from .theory import OnticTheory, Setting, Theory, TheoryError, ThreeValuedTheory
from .valuations import ThreeValuation

SECTIONS = (
    "site",
    "histories",
    "theta",
    "events",
    "regions",
    "assoc",
    "settings",
    "valuations",
    "distribution",
)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.code}: {self.message}"


class ModelSpecError(ValueError):
    """Parse or build failure; carries the full diagnostic list."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass
class ModelDocument:
    """Validated parse result, ready for theory construction."""

    site_points: tuple[str, ...] = ()
    order_pairs: tuple[tuple[str, str], ...] = ()
    histories: tuple[str, ...] = ()
    theta: tuple[str, ...] | None = None
    events: dict[str, tuple[str, ...]] = field(default_factory=dict)
    regions: dict[str, tuple[str, ...]] = field(default_factory=dict)
    assoc: tuple[tuple[str, tuple[str, ...]], ...] = ()
    settings: tuple[tuple[str, tuple[str, ...]], ...] = ()
    valuations: dict[str, tuple[str, ...]] = field(default_factory=dict)
    distribution: dict[str, Fraction] = field(default_factory=dict)

    @property
    def three_valued(self) -> bool:
        return bool(self.valuations)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.diagnostics: list[Diagnostic] = []
        self.doc = ModelDocument()
        self.seen_sections: list[str] = []
        self.assoc_rows: list[tuple[str, tuple[str, ...]]] = []
        self.setting_rows: list[tuple[str, tuple[str, ...]]] = []
        self.order_rows: list[tuple[int, tuple[str, str]]] = []

    def error(self, line: int, column: int, code: str, message: str) -> None:
        self.diagnostics.append(Diagnostic(line, column, code, message))

    def run(self) -> ModelDocument:
        section = None
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            stripped = raw.split("#", 1)[0].rstrip()
            if not stripped.strip():
                continue
            body = stripped.strip()
            if body.endswith(":") and "=" not in body:
                name = body[:-1].strip()
                if name not in SECTIONS:
                    self.error(lineno, 1, "E_UNKNOWN_SECTION", f"unknown section {name!r}")
                    section = None
                    continue
                if name in self.seen_sections:
                    self.error(lineno, 1, "E_DUPLICATE", f"section {name!r} declared twice")
                    section = None
                    continue
                self.seen_sections.append(name)
                section = name
                continue
            if "=" not in body:
                self.error(lineno, 1, "E_SYNTAX", "expected `name = value` or a `section:` header")
                continue
            if section is None:
                self.error(lineno, 1, "E_SYNTAX", "entry outside any section")
                continue
            left, _, right = body.partition("=")
            name = left.strip()
            col = stripped.index("=") + 2
            tokens = right.replace(",", " ").split()
            if not name or len(name.split()) != 1:
                self.error(lineno, 1, "E_SYNTAX", "entry name must be a single token")
                continue
            self.entry(section, lineno, col, name, tokens)
        self.finish()
        if self.diagnostics:
            raise ModelSpecError(self.diagnostics)
        return self.doc

    # --- entries ----------------------------------------------------------

    def entry(self, section: str, lineno: int, col: int, name: str, tokens: list[str]) -> None:
        doc = self.doc
        if section == "site":
            if name == "points":
                if doc.site_points:
                    self.error(lineno, 1, "E_DUPLICATE", "points already declared")
                elif len(set(tokens)) != len(tokens) or not tokens:
                    self.error(lineno, col, "E_SYNTAX", "points must be distinct and non-empty")
                else:
                    doc.site_points = tuple(tokens)
            elif name == "order":
                for tok in tokens:
                    if tok.count("<") != 1:
                        self.error(lineno, col, "E_SYNTAX", f"order token {tok!r} is not `x<y`")
                        continue
                    x, y = tok.split("<")
                    for pt in (x, y):
                        if pt not in doc.site_points:
                            self.error(lineno, col, "E_UNRESOLVED", f"unknown point {pt!r}")
                            break
                    else:
                        self.order_rows.append((lineno, (x, y)))
            else:
                self.error(lineno, 1, "E_SYNTAX", f"unknown site entry {name!r}")
        elif section in ("histories", "theta"):
            if name != "names":
                self.error(lineno, 1, "E_SYNTAX", f"unknown {section} entry {name!r}")
                return
            if section == "histories":
                if doc.histories:
                    self.error(lineno, 1, "E_DUPLICATE", "histories already declared")
                elif len(set(tokens)) != len(tokens) or not tokens:
                    self.error(lineno, col, "E_SYNTAX", "history names must be distinct and non-empty")
                else:
                    doc.histories = tuple(tokens)
            else:
                missing = [t for t in tokens if t not in doc.histories]
                if missing:
                    self.error(lineno, col, "E_UNRESOLVED", f"unknown histories in theta: {missing}")
                else:
                    doc.theta = tuple(dict.fromkeys(tokens))
        elif section == "events":
            if name in doc.events:
                self.error(lineno, 1, "E_DUPLICATE", f"event {name!r} declared twice")
                return
            missing = [t for t in tokens if t not in doc.histories]
            if missing:
                self.error(lineno, col, "E_UNRESOLVED", f"unknown histories in event: {missing}")
                return
            doc.events[name] = tuple(dict.fromkeys(tokens))
        elif section == "regions":
            if name in doc.regions:
                self.error(lineno, 1, "E_DUPLICATE", f"region {name!r} declared twice")
                return
            missing = [t for t in tokens if t not in doc.site_points]
            if missing:
                self.error(lineno, col, "E_UNRESOLVED", f"unknown points in region: {missing}")
                return
            doc.regions[name] = tuple(dict.fromkeys(tokens))
        elif section in ("assoc", "settings"):
            if name not in doc.events:
                self.error(lineno, col, "E_UNRESOLVED", f"unknown event {name!r}")
                return
            points = self.resolve_region(lineno, col, tokens)
            if points is None:
                return
            row = (name, points)
            if section == "assoc":
                self.assoc_rows.append(row)
            else:
                self.setting_rows.append(row)
        elif section == "valuations":
            if name in doc.valuations:
                self.error(lineno, 1, "E_DUPLICATE", f"valuation {name!r} declared twice")
                return
            missing = [t for t in tokens if t not in doc.histories]
            if missing:
                self.error(lineno, col, "E_UNRESOLVED", f"unknown histories in valuation: {missing}")
                return
            if not tokens:
                self.error(lineno, col, "E_EMPTY_DERIVATION", f"valuation {name!r} has an empty derivation set")
                return
            doc.valuations[name] = tuple(dict.fromkeys(tokens))
        elif section == "distribution":
            if name in doc.distribution:
                self.error(lineno, 1, "E_DUPLICATE", f"weight for {name!r} declared twice")
                return
            carriers = doc.valuations if doc.valuations else dict.fromkeys(doc.histories)
            if name not in carriers:
                self.error(lineno, col, "E_UNRESOLVED", f"unknown carrier {name!r} in distribution")
                return
            if len(tokens) != 1:
                self.error(lineno, col, "E_BAD_WEIGHT", "weight must be a single number")
                return
            try:
                w = Fraction(tokens[0])
            except (ValueError, ZeroDivisionError):
                self.error(lineno, col, "E_BAD_WEIGHT", f"cannot parse weight {tokens[0]!r}")
                return
            if w < 0:
                self.error(lineno, col, "E_BAD_WEIGHT", "weights must be non-negative")
                return
            doc.distribution[name] = w

    def resolve_region(self, lineno: int, col: int, tokens: list[str]) -> tuple[str, ...] | None:
        doc = self.doc
        if len(tokens) == 1 and tokens[0] in doc.regions:
            return doc.regions[tokens[0]]
        missing = [t for t in tokens if t not in doc.site_points]
        if missing:
            self.error(lineno, col, "E_UNRESOLVED", f"unknown points: {missing}")
            return None
        if not tokens:
            self.error(lineno, col, "E_SYNTAX", "empty region")
            return None
        return tuple(dict.fromkeys(tokens))

    def finish(self) -> None:
        doc = self.doc
        if "site" not in self.seen_sections or not doc.site_points:
            self.error(0, 0, "E_MISSING_SITE", "missing site section")
            return
        if "histories" not in self.seen_sections or not doc.histories:
            self.error(0, 0, "E_MISSING_HISTORIES", "missing histories section")
            return
        if doc.valuations and doc.theta is not None:
            self.error(0, 0, "E_THETA_WITH_VALUATIONS", "theta section is for two-valued models")
        try:
            CausalSite(doc.site_points, [pair for _, pair in self.order_rows])
        except SiteError as exc:
            line = self.order_rows[0][0] if self.order_rows else 0
            self.error(line, 1, "E_ORDER_CYCLE", str(exc))
        doc.order_pairs = tuple(pair for _, pair in self.order_rows)
        doc.assoc = tuple(self.assoc_rows)
        doc.settings = tuple(self.setting_rows)


def parse(text: str) -> ModelDocument:
    """Parse and validate a model file; raises ModelSpecError with located
    diagnostics on any problem."""
    return _Parser(text).run()


# ---------------------------------------------------------------------------
# Building
# ---------------------------------------------------------------------------

def build_theory(doc: ModelDocument) -> Theory:
    """Construct the theory a validated document describes: three-valued iff
    it has a valuations section."""
    site = CausalSite(doc.site_points, doc.order_pairs)
    space = HistorySpace(doc.histories)
    events = {name: space.event(members) for name, members in doc.events.items()}
    entries = [(site.region(points), [events[name]]) for name, points in doc.assoc]
    delta = AssociationMap.build(site, entries)
    settings = [Setting(events[name], site.region(points)) for name, points in doc.settings]
    try:
        if doc.three_valued:
            basics = [
                ThreeValuation.from_histories(space, members, name=name)
                for name, members in doc.valuations.items()
            ]
            return ThreeValuedTheory(space, site, delta, basics, settings=settings, events=events)
        theta = space.event(doc.theta) if doc.theta is not None else space.everything
        return OnticTheory(space, theta, site, delta, settings=settings, events=events)
    except TheoryError as exc:
        raise ModelSpecError([Diagnostic(0, 0, "E_BAD_THEORY", str(exc))]) from exc


def build_distribution(doc: ModelDocument, theory: Theory) -> Distribution | None:
    """The document's distribution over the theory's carrier, if any."""
    if not doc.distribution:
        return None
    try:
        return Distribution.from_mapping(theory, doc.distribution)
    except ValueError as exc:
        raise ModelSpecError([Diagnostic(0, 0, "E_BAD_WEIGHT", str(exc))]) from exc


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------

def serialize(theory: Theory, distribution: Distribution | None = None) -> str:
    """Canonical text for a theory (plus optional distribution): fixed section
    order, entries sorted by name, members sorted, rationals in lowest terms.
    Parsing the output builds a theory equal to the input."""
    lines: list[str] = []
    site = theory.site
    lines.append("site:")
    lines.append("  points = " + " ".join(sorted(site.points)))
    covers = site.covering_pairs()
    if covers:
        lines.append("  order = " + " ".join(f"{x}<{y}" for x, y in sorted(covers)))
    lines.append("histories:")
    lines.append("  names = " + " ".join(sorted(theory.space.names)))
    if isinstance(theory, OnticTheory):
        lines.append("theta:")
        lines.append("  names = " + " ".join(sorted(theory.theta.members())))
    named = sorted(theory.events.items())
    if named:
        lines.append("events:")
        for name, e in named:
            lines.append(f"  {name} = " + " ".join(sorted(e.members())))
    assoc_rows = sorted(
        (theory.event_name(g), tuple(sorted(region.members)))
        for region, gens in theory.delta.entries
        for g in gens
    )
    if assoc_rows:
        lines.append("assoc:")
        for name, points in assoc_rows:
            lines.append(f"  {name} = " + " ".join(points))
    if theory.settings:
        lines.append("settings:")
        for name, points in sorted(
            (theory.event_name(s.event), tuple(sorted(s.region.members))) for s in theory.settings
        ):
            lines.append(f"  {name} = " + " ".join(points))
    if isinstance(theory, ThreeValuedTheory):
        lines.append("valuations:")
        for v in sorted(theory.basics, key=lambda v: v.label()):
            lines.append(f"  {v.label()} = " + " ".join(sorted(v.derivation_set())))
    if distribution is not None:
        lines.append("distribution:")
        for label in sorted(distribution.labels):
            lines.append(f"  {label} = {distribution.weight_of(label)}")
    return "\n".join(lines) + "\n"
