"""Component knowledge base: canonical pinouts, aliases, criticality, roles.

This is the single normalization authority for part and pin names.  Lookups
are exact against a prebuilt alias index after normalization (lowercase,
trimmed, with internal whitespace, hyphens and underscores removed); there
is deliberately no fuzzy matching, so unknown names stay unknown and get
surfaced by the rule checker instead of being silently guessed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

CATEGORIES = frozenset(
    {"passive", "input", "output", "sensor", "ic", "power", "logic", "microcontroller"}
)
PIN_ROLES = frozenset({"power", "ground", "digital_io", "analog_io", "signal", "nc"})

SUPPLY_CATEGORIES = frozenset({"power", "microcontroller"})


class SchemaError(ValueError):
    """The knowledge-base file does not match the expected schema."""


class DuplicateAlias(ValueError):
    """One name or alias resolves to two different component records."""


def normalize_name(text: str) -> str:
    """Lowercase, trim, and drop internal whitespace/hyphens/underscores.

    Pure-punctuation names like "+" or "-" (common pin labels) would collapse
    to nothing, so they are kept as their stripped lowercase form instead.
    """
    stripped = text.strip().lower()
    collapsed = "".join(ch for ch in stripped if ch not in " \t\n\r-_")
    return collapsed if collapsed else stripped


@dataclass(frozen=True)
class PinSpec:
    canonical: str
    aliases: tuple[str, ...] = ()
    critical: bool = False
    role: str = "signal"

    def __post_init__(self) -> None:
        if self.role not in PIN_ROLES:
            raise SchemaError(f"pin {self.canonical!r} has unknown role {self.role!r}")
        if normalize_name(self.canonical) in {normalize_name(a) for a in self.aliases}:
            raise SchemaError(f"pin {self.canonical!r} lists its own name as an alias")


@dataclass(frozen=True)
class ComponentRecord:
    canonical_name: str
    category: str
    pins: tuple[PinSpec, ...]
    name_aliases: tuple[str, ...] = ()
    requires: tuple[str, ...] = ()
    _pin_index: dict[str, str] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise SchemaError(
                f"record {self.canonical_name!r} has unknown category {self.category!r}"
            )
        if not 2 <= len(self.pins) <= 40:
            raise SchemaError(
                f"record {self.canonical_name!r} has {len(self.pins)} pins, expected 2..40"
            )
        index: dict[str, str] = {}
        for pin in self.pins:
            for name in (pin.canonical, *pin.aliases):
                key = normalize_name(name)
                if key in index and index[key] != pin.canonical:
                    raise SchemaError(
                        f"record {self.canonical_name!r}: name {name!r} is claimed "
                        f"by pins {index[key]!r} and {pin.canonical!r}"
                    )
                index[key] = pin.canonical
        object.__setattr__(self, "_pin_index", index)

    def canonical_pins(self) -> tuple[str, ...]:
        return tuple(p.canonical for p in self.pins)

    def critical_pins(self) -> tuple[str, ...]:
        return tuple(p.canonical for p in self.pins if p.critical)

    def pin_spec(self, canonical: str) -> PinSpec | None:
        for p in self.pins:
            if p.canonical == canonical:
                return p
        return None

    def pins_with_role(self, role: str) -> tuple[str, ...]:
        return tuple(p.canonical for p in self.pins if p.role == role)


@dataclass(frozen=True)
class KnowledgeBase:
    records: dict[str, ComponentRecord]
    alias_index: dict[str, str]

    def __len__(self) -> int:
        return len(self.records)


def _record_from_row(row: Mapping[str, Any]) -> ComponentRecord:
    try:
        pins = tuple(
            PinSpec(
                canonical=p["canonical"],
                aliases=tuple(p.get("aliases", ())),
                critical=bool(p.get("critical", False)),
                role=p.get("role", "signal"),
            )
            for p in row["pins"]
        )
        return ComponentRecord(
            canonical_name=row["canonical_name"],
            category=row["category"],
            pins=pins,
            name_aliases=tuple(row.get("name_aliases", ())),
            requires=tuple(row.get("requires", ())),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad component record: {exc!r}") from exc


def kb_from_records(records: Iterable[ComponentRecord]) -> KnowledgeBase:
    """Assemble a knowledge base, building the alias index and rejecting clashes."""
    by_name: dict[str, ComponentRecord] = {}
    alias_index: dict[str, str] = {}
    for record in records:
        if record.canonical_name in by_name:
            raise DuplicateAlias(f"duplicate record {record.canonical_name!r}")
        by_name[record.canonical_name] = record
        for name in (record.canonical_name, *record.name_aliases):
            key = normalize_name(name)
            owner = alias_index.get(key)
            if owner is not None and owner != record.canonical_name:
                raise DuplicateAlias(
                    f"name {name!r} resolves to both {owner!r} and {record.canonical_name!r}"
                )
            alias_index[key] = record.canonical_name
    return KnowledgeBase(records=by_name, alias_index=alias_index)


def load_kb(path: str | Path) -> KnowledgeBase:
    """Load a parts.kb.json document: a JSON array of component records."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read knowledge base {path}: {exc}") from exc
    if not isinstance(data, list):
        raise SchemaError("knowledge base document must be a JSON array of records")
    return kb_from_records(_record_from_row(row) for row in data)


def lookup(kb: KnowledgeBase, name: str) -> ComponentRecord | None:
    """Exact alias-index hit after normalization; None when unknown."""
    canonical = kb.alias_index.get(normalize_name(name))
    return kb.records[canonical] if canonical is not None else None


def normalize_pin(record: ComponentRecord, pin_name: str) -> str | None:
    """Map a generated pin name to the record's canonical pin, or None."""
    return record._pin_index.get(normalize_name(pin_name))


def bundled_kb_path() -> Path:
    """Path of the packaged desk-scale knowledge base (19 common parts)."""
    return Path(resources.files("circuitsmith").joinpath("data/parts.kb.json"))  # type: ignore[arg-type]


@lru_cache(maxsize=1)
def bundled_kb() -> KnowledgeBase:
    return load_kb(bundled_kb_path())
