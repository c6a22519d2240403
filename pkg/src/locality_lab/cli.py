"""Command-line front end.

Subcommands:
  check   run condition checkers on a model file
  eprb    build the two-wing model and run the verification battery
  oracle  run an enumeration suite

Exit codes: 0 all requested conditions hold / suite passed, 1 a condition
failed, 2 input error (parse failure, bad flags, bad distribution), 3 a
checker precondition was violated.  LOCALITY_LAB_TOL overrides the default
1e-9 tolerance of the probabilistic checkers.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .conditions import (
    CheckerPreconditionError,
    ModelTooLargeError,
    check_el_first,
    check_el_second,
    check_el_three_valued,
    check_freedom_of_settings,
    check_npcc_joint,
    check_npcc_mutual,
    detect_signal,
)
from .eprb import (
    EprbModelError,
    build_eprb_model,
    pr_box_distribution,
    uniform_outcome_distribution,
    verify_eprb,
)
from .modelspec import ModelSpecError, build_distribution, build_theory, parse
from .oracles import run_bell_bound, run_el_equivalence, run_el_so2, run_npcc_equivalence
from .probability import Distribution, DistributionError, check_so1, check_so2
from .reports import ConditionReport, Witness
from .theory import OnticTheory, ThreeValuedTheory, check_ontic_definiteness, derive_three_valued

CONDITIONS = ("el1", "el2", "el3v", "npccj", "npccm", "fos", "onticdef", "so1", "so2", "signal")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3


class _InputError(ValueError):
    pass


def _read_model(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    doc = parse(text)
    theory = build_theory(doc)
    dist = build_distribution(doc, theory)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return doc, theory, dist, digest


def _declared_region_pairs(doc, theory):
    """Spacelike pairs among declared regions, or singleton point regions
    when none are declared."""
    site = theory.site
    if doc.regions:
        regions = [site.region(points) for points in doc.regions.values()]
    else:
        regions = [site.region([p]) for p in site.points]
    pairs = []
    for i, ra in enumerate(regions):
        for rb in regions[i + 1 :]:
            if not ra.members or not rb.members or ra.members & rb.members:
                continue
            if site.past_mask(ra.mask) & rb.mask == 0 and site.past_mask(rb.mask) & ra.mask == 0:
                pairs.append((ra, rb))
    return pairs


def _vacuous(condition: str, note: str) -> ConditionReport:
    return ConditionReport(condition=condition, holds=True, detail=((note, True),))


def _run_condition(cond: str, doc, theory, dist):
    three = theory if isinstance(theory, ThreeValuedTheory) else None
    ontic = theory if isinstance(theory, OnticTheory) else None
    if cond in ("el1", "el2"):
        if ontic is None:
            raise CheckerPreconditionError(f"{cond} applies to two-valued models")
        return check_el_first(ontic) if cond == "el1" else check_el_second(ontic)
    if cond == "el3v":
        return check_el_three_valued(three or derive_three_valued(ontic), exempt_settings=True)
    if cond == "onticdef":
        return check_ontic_definiteness(three or derive_three_valued(ontic))
    if cond == "fos":
        return check_freedom_of_settings(theory)
    if cond in ("npccj", "npccm"):
        pairs = _declared_region_pairs(doc, theory)
        if not pairs:
            return _vacuous(cond, "no spacelike region pairs")
        checker = check_npcc_joint if cond == "npccj" else check_npcc_mutual
        for ra, rb in pairs:
            report = checker(theory, ra, rb)
            if not report.holds:
                return report
        return _vacuous(cond, f"all {len(pairs)} spacelike region pairs pass")
    if cond in ("so1", "so2"):
        if ontic is None:
            raise CheckerPreconditionError(f"{cond} applies to two-valued models")
        d = dist if dist is not None else Distribution.uniform(ontic)
        pairs = _declared_region_pairs(doc, theory)
        if not pairs:
            return _vacuous(cond, "no spacelike region pairs")
        checker = check_so2 if cond == "so2" else check_so1
        for ra, rb in pairs:
            report = checker(ontic, d, ra, rb)
            if not report.holds:
                return report
        return _vacuous(cond, f"all {len(pairs)} spacelike region pairs pass")
    if cond == "signal":
        homes = {}
        for region, gens in theory.delta.entries:
            for g in gens:
                homes.setdefault(g.mask, region)
        findings = []
        for s in theory.settings:
            for mask, region in sorted(homes.items()):
                if region.members == s.region.members or region.members & s.region.members:
                    continue
                site = theory.site
                if site.past_mask(region.mask) & s.region.mask or site.past_mask(s.region.mask) & region.mask:
                    continue
                from .histories import Event

                target = Event(theory.space, mask)
                verdict = detect_signal(theory, s.event, s.region, target, region)
                if verdict.kind != "none":
                    findings.append((s, target, verdict))
        if findings:
            s, target, verdict = findings[0]
            return ConditionReport(
                condition="signal",
                holds=False,
                witness=Witness(
                    description=f"{verdict.kind} signal: {verdict.relation}",
                    events={
                        "setting": s.event.members(),
                        "output": target.members(),
                    },
                ),
            )
        return _vacuous("signal", "no signalling channel found")
    raise _InputError(f"unknown condition {cond!r}")


def cmd_check(args) -> int:
    try:
        doc, theory, dist, digest = _read_model(args.file)
    except (_InputError, ModelSpecError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    requested = [c.strip() for c in args.conditions.split(",") if c.strip()]
    informational = {c.strip() for c in (args.informational or "").split(",") if c.strip()}
    unknown = [c for c in requested + sorted(informational) if c not in CONDITIONS]
    if unknown:
        print(f"input error: unknown conditions {unknown}", file=sys.stderr)
        return EXIT_INPUT
    reports = []
    try:
        for cond in requested:
            report = _run_condition(cond, doc, theory, dist)
            reports.append((cond, report, cond in informational))
    except (CheckerPreconditionError, ModelTooLargeError, DistributionError) as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    binding_fail = any(not r.holds and not info for _, r, info in reports)
    payload = {
        "kind": "check",
        "tool_version": __version__,
        "input": {"path": args.file, "sha256": digest},
        "conditions": [
            {**r.to_json_dict(), "informational": info} for _, r, info in reports
        ],
        "verdict": "fail" if binding_fail else "pass",
    }
    _emit(payload, args.format)
    return EXIT_FAIL if binding_fail else EXIT_PASS


def cmd_eprb(args) -> int:
    try:
        model = build_eprb_model(args.derivation)
    except EprbModelError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.dist == "pr":
            dist = pr_box_distribution(model)
        elif args.dist == "uniform":
            dist = uniform_outcome_distribution(model)
        else:
            dist = _custom_distribution(args.dist, model)
    except (DistributionError, EprbModelError, _InputError, ModelSpecError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    verification = verify_eprb(model, dist)
    payload = {
        "kind": "eprb",
        "tool_version": __version__,
        "input": None,
        "eprb": {
            "derivation": model.derivation_choice,
            "distribution": args.dist,
            **verification.to_json_dict(),
        },
        "probability": {
            "correlators": [str(e) for e in verification.correlators],
            "chsh": float(verification.chsh),
            "local_bound": float(verification.local_bound),
        },
        "verdict": "pass" if verification.as_expected() else "fail",
    }
    _emit(payload, args.format)
    return EXIT_PASS if verification.as_expected() else EXIT_FAIL


def _custom_distribution(path: str, model) -> Distribution:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body or body == "distribution:":
            continue
        name, _, value = body.partition("=")
        if not _:
            raise _InputError(f"{path}:{lineno}: expected `name = weight`")
        try:
            mapping[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise _InputError(f"{path}:{lineno}: bad weight {value.strip()!r}") from exc
    return Distribution.from_mapping(model.theory, mapping)


def cmd_oracle(args) -> int:
    try:
        if args.suite == "el-equiv":
            _check_bounds(args.max_omega or 4, args.max_points or 4)
            result = run_el_equivalence(args.max_omega or 4, args.max_points or 4)
        elif args.suite == "npcc-equiv":
            _check_bounds(args.max_omega or 4, args.max_points or 4)
            result = run_npcc_equivalence(args.max_omega or 4, args.max_points or 4)
        elif args.suite == "el-so2":
            _check_bounds(args.max_omega or 3, args.max_points or 3)
            result = run_el_so2(args.max_omega or 3, args.max_points or 3, seed=args.seed)
        elif args.suite == "bell-bound":
            result = run_bell_bound(seed=args.seed)
        else:
            print(f"input error: unknown suite {args.suite!r}", file=sys.stderr)
            return EXIT_INPUT
    except _InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = {
        "kind": "oracle",
        "tool_version": __version__,
        "input": None,
        "oracle": result.to_json_dict(),
        "verdict": "pass" if result.passed else "fail",
    }
    _emit(payload, args.format)
    return EXIT_PASS if result.passed else EXIT_FAIL


def _check_bounds(max_omega: int, max_points: int) -> None:
    if not 1 <= max_omega <= 5:
        raise _InputError(f"max-omega must be between 1 and 5, got {max_omega}")
    if not 1 <= max_points <= 4:
        raise _InputError(f"max-points must be between 1 and 4, got {max_points}")


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    print(f"locality-lab {payload['tool_version']} [{payload['kind']}]")
    if payload.get("input"):
        print(f"input: {payload['input']['path']} sha256={payload['input']['sha256'][:12]}...")
    for cond in payload.get("conditions", ()):
        mark = "PASS" if cond["holds"] else "FAIL"
        info = " (informational)" if cond.get("informational") else ""
        print(f"  {cond['condition']}: {mark}{info}")
        if not cond["holds"] and "witness" in cond:
            print(f"    witness: {cond['witness']['description']}")
    if payload.get("eprb"):
        e = payload["eprb"]
        print(f"  derivation: {e['derivation']}  closure (w,x,y,z): {', '.join(e['closure_wxyz'])}")
        for key in (
            "antecedent_identity",
            "fj_sweep",
            "no_signalling",
        ):
            print(f"  {key}: {'PASS' if e[key] else 'FAIL'}")
        for key in ("el_with_settings", "freedom_of_settings", "probabilistic_freedom", "ontic_definiteness"):
            print(f"  {key}: {'PASS' if e[key]['holds'] else 'FAIL'}")
    if payload.get("probability"):
        p = payload["probability"]
        print(f"  correlators: {', '.join(p['correlators'])}")
        print(f"  chsh: {p['chsh']}  local bound: {p['local_bound']}")
    if payload.get("oracle"):
        o = payload["oracle"]
        print(
            f"  suite {o['suite']}: {o['theories_checked']} theories, "
            f"{o['comparisons']} comparisons, {o['disagreements']} disagreements"
        )
        for k, v in sorted(o.get("extra", {}).items()):
            print(f"    {k}: {v}")
        for ce in o.get("counterexamples", ()):
            print("    counterexample model:")
            for line in ce.splitlines():
                print("      " + line)
    print(f"verdict: {payload['verdict']}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locality-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run condition checkers on a model file")
    p_check.add_argument("file")
    p_check.add_argument(
        "--conditions",
        default="el1,el2,fos",
        help="comma list from: " + ",".join(CONDITIONS),
    )
    p_check.add_argument(
        "--informational",
        default="",
        help="conditions reported but excluded from the exit status",
    )
    p_check.add_argument("--format", choices=("text", "json"), default="text")
    p_check.set_defaults(func=cmd_check)

    p_eprb = sub.add_parser("eprb", help="run the two-wing verification battery")
    p_eprb.add_argument("--derivation", default="full", help="full | pair14 | pair23")
    p_eprb.add_argument("--dist", default="pr", help="pr | uniform | path to a weight file")
    p_eprb.add_argument("--format", choices=("text", "json"), default="text")
    p_eprb.set_defaults(func=cmd_eprb)

    p_oracle = sub.add_parser("oracle", help="run an enumeration suite")
    p_oracle.add_argument("--suite", required=True, help="el-equiv | npcc-equiv | el-so2 | bell-bound")
    p_oracle.add_argument("--max-omega", type=int, default=None, dest="max_omega")
    p_oracle.add_argument("--max-points", type=int, default=None, dest="max_points")
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--format", choices=("text", "json"), default="text")
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EprbModelError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CheckerPreconditionError, ModelTooLargeError) as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
