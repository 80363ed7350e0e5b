"""Strict and permissive pinout accuracy scoring against the knowledge base.

Strict scoring requires the generated pin set, after normalization, to equal
the component's full canonical pin set.  Permissive scoring requires only
the function-critical pins to be present, so omitting rarely-used pins still
counts.  Generated names that normalize to a known pin more than once are
duplicates and ignored; names that normalize to nothing are reported and
break strict (but not permissive) scoring.

An expert may override the automated verdict for a component; overrides are
carried in the report next to the automated result, with attribution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .partsdb import ComponentRecord, normalize_pin


class EmptyInput(ValueError):
    """Aggregate requires at least one score."""


@dataclass(frozen=True)
class PinoutScore:
    component: str
    strict: bool
    permissive: bool
    missing_critical: tuple[str, ...]
    missing_noncritical: tuple[str, ...]
    unknown_generated: tuple[str, ...]

    def __post_init__(self) -> None:
        empty = not (self.missing_critical or self.missing_noncritical or self.unknown_generated)
        if self.strict != empty:
            raise ValueError("strict must hold exactly when nothing is missing or unknown")
        if self.strict and not self.permissive:
            raise ValueError("strict scores are always permissive")


@dataclass(frozen=True)
class ScoreAggregate:
    n: int
    strict_rate: float
    permissive_rate: float


@dataclass(frozen=True)
class ManualOverride:
    """Expert verdict replacing the automated one, with attribution."""

    strict: bool
    permissive: bool
    verdict_by: str
    note: str | None = None

    def __post_init__(self) -> None:
        if self.strict and not self.permissive:
            raise ValueError("an override cannot be strict but not permissive")


def score_pinout(record: ComponentRecord, generated: Sequence[str]) -> PinoutScore:
    """Score one generated pin-name list against a knowledge-base record."""
    matched: set[str] = set()
    unknown: list[str] = []
    for name in generated:
        canonical = normalize_pin(record, name)
        if canonical is None:
            if name not in unknown:
                unknown.append(name)
        else:
            matched.add(canonical)

    missing_critical = tuple(p for p in record.critical_pins() if p not in matched)
    missing_noncritical = tuple(
        p for p in record.canonical_pins() if p not in matched and p not in record.critical_pins()
    )
    strict = not missing_critical and not missing_noncritical and not unknown
    permissive = not missing_critical
    return PinoutScore(
        component=record.canonical_name,
        strict=strict,
        permissive=permissive,
        missing_critical=missing_critical,
        missing_noncritical=missing_noncritical,
        unknown_generated=tuple(unknown),
    )


def aggregate(scores: Sequence[PinoutScore]) -> ScoreAggregate:
    """Exact pass fractions over a non-empty score list."""
    if not scores:
        raise EmptyInput("cannot aggregate zero scores")
    n = len(scores)
    return ScoreAggregate(
        n=n,
        strict_rate=sum(s.strict for s in scores) / n,
        permissive_rate=sum(s.permissive for s in scores) / n,
    )


def build_report(
    scores: Sequence[PinoutScore],
    overrides: Mapping[str, ManualOverride] | None = None,
) -> dict[str, Any]:
    """Assemble the scoring report document, applying any expert overrides.

    The aggregate is computed over the effective (possibly overridden)
    verdicts; each row keeps the automated result so overrides stay auditable.
    """
    overrides = dict(overrides or {})
    rows = []
    effective: list[tuple[bool, bool]] = []
    for score in scores:
        row: dict[str, Any] = {
            "component": score.component,
            "strict": score.strict,
            "permissive": score.permissive,
            "missing_critical": list(score.missing_critical),
            "missing_noncritical": list(score.missing_noncritical),
            "unknown_generated": list(score.unknown_generated),
            "source": "auto",
        }
        override = overrides.pop(score.component, None)
        if override is not None:
            row["source"] = "manual"
            row["auto"] = {"strict": score.strict, "permissive": score.permissive}
            row["strict"] = override.strict
            row["permissive"] = override.permissive
            row["override"] = {
                "verdict_by": override.verdict_by,
                "note": override.note,
            }
        rows.append(row)
        effective.append((row["strict"], row["permissive"]))
    if overrides:
        raise KeyError(f"overrides for unscored component(s): {sorted(overrides)}")
    if not effective:
        raise EmptyInput("cannot aggregate zero scores")
    n = len(effective)
    return {
        "scores": rows,
        "aggregate": {
            "n": n,
            "strict_rate": sum(s for s, _ in effective) / n,
            "permissive_rate": sum(p for _, p in effective) / n,
        },
    }


def load_overrides(data: Iterable[Mapping[str, Any]]) -> dict[str, ManualOverride]:
    """Parse override rows: [{component, strict, permissive, verdict_by, note?}]."""
    out: dict[str, ManualOverride] = {}
    for row in data:
        out[row["component"]] = ManualOverride(
            strict=bool(row["strict"]),
            permissive=bool(row["permissive"]),
            verdict_by=row["verdict_by"],
            note=row.get("note"),
        )
    return out
