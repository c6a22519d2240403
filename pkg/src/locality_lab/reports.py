"""Condition-check reports with re-checkable counterexample witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, frozenset):
        return sorted(str(v) for v in value)
    return value


@dataclass(frozen=True)
class Witness:
    """Counterexample data for a failed condition.

    Fields hold names (points, histories, events) rather than live objects so
    a witness can be re-checked against a freshly built model.
    """

    description: str
    region: tuple[str, ...] = ()
    events: dict[str, tuple[str, ...]] = field(default_factory=dict)
    valuations: tuple[str, ...] = ()
    data: dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "description": self.description,
            "region": list(self.region),
            "events": {k: list(v) for k, v in self.events.items()},
            "valuations": list(self.valuations),
            "data": _jsonable(self.data),
        }


@dataclass(frozen=True)
class ConditionReport:
    """Verdict of a causal-condition checker.

    A failed report always carries a witness that can be re-verified
    independently of the checker that produced it.
    """

    condition: str
    holds: bool
    witness: Witness | None = None
    detail: tuple = ()

    def __post_init__(self) -> None:
        if not self.holds and self.witness is None:
            raise ValueError("failing report requires a witness")

    def to_json_dict(self) -> dict:
        out: dict[str, Any] = {"condition": self.condition, "holds": self.holds}
        if self.witness is not None:
            out["witness"] = self.witness.to_json_dict()
        if self.detail:
            out["detail"] = _jsonable(list(self.detail))
        return out
