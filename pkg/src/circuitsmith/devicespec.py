"""Core data model for generated microcontroller devices.

A device is a bill of materials, per-part pinouts, a netlist of pin-to-pin
connections, optional microcontroller code, and provenance describing how
it was generated.  Connections are pairwise edges between pins; nets (sets
of pins at the same electrical potential) are always derived as connected
components of the connection graph, never declared directly.

Pins are addressed as ``PART.PIN``, split at the first ``.``; the dot is
therefore banned in part refs.  All values are immutable after construction
and safe to share between threads.  Comparisons here are exact and
case-preserving; name normalization is the knowledge base's job.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

DEVICE_FILE_SUFFIX = ".device.json"

_PIN_SEP = "."


class InvalidSpec(ValueError):
    """An operation required a structurally clean spec, but findings exist."""

    def __init__(self, findings: Sequence["ValidationFinding"]):
        self.findings = list(findings)
        detail = "; ".join(f.message for f in self.findings[:4])
        super().__init__(
            f"device spec has {len(self.findings)} structural finding(s): {detail}"
        )


class MalformedDocument(ValueError):
    """Input text is not a canonical device document."""


def _checked_ref(ref: Any) -> str:
    if not isinstance(ref, str):
        raise ValueError(f"part ref must be a string, got {type(ref).__name__}")
    ref = ref.strip()
    if not ref:
        raise ValueError("part ref must be non-empty")
    if any(ch.isspace() for ch in ref):
        raise ValueError(f"part ref {ref!r} contains whitespace")
    if _PIN_SEP in ref:
        raise ValueError(f"part ref {ref!r} contains '.', reserved as the pin separator")
    return ref


def _checked_pin(pin: Any) -> str:
    if not isinstance(pin, str):
        raise ValueError(f"pin name must be a string, got {type(pin).__name__}")
    pin = pin.strip()
    if not pin:
        raise ValueError("pin name must be non-empty after trimming")
    return pin


@dataclass(frozen=True)
class PinRef:
    """One endpoint of a connection: a part ref plus a pin name on that part."""

    part: str
    pin: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "part", _checked_ref(self.part))
        object.__setattr__(self, "pin", _checked_pin(self.pin))

    def __str__(self) -> str:
        return f"{self.part}{_PIN_SEP}{self.pin}"

    @classmethod
    def from_string(cls, text: str) -> "PinRef":
        """Split ``PART.PIN`` at the first dot.  Strict: no dot is an error."""
        text = text.strip()
        if _PIN_SEP not in text:
            raise ValueError(f"pin endpoint {text!r} has no '.' separator")
        part, pin = text.split(_PIN_SEP, 1)
        return cls(part, pin)


@dataclass(frozen=True)
class BomItem:
    """One bill-of-materials line: ref, free-text part type, optional value and note."""

    ref: str
    part_type: str
    value: str | None = None
    note: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "ref", _checked_ref(self.ref))
        if not isinstance(self.part_type, str) or not self.part_type.strip():
            raise ValueError(f"part_type for {self.ref!r} must be non-empty")


@dataclass(frozen=True)
class Connection:
    """An undirected pin-to-pin edge.  Self-loops on the identical pin are rejected."""

    a: PinRef
    b: PinRef
    note: str | None = None

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"connection joins {self.a} to itself")

    def endpoints(self) -> tuple[PinRef, PinRef]:
        return (self.a, self.b)


@dataclass(frozen=True)
class PinoutEntry:
    pin: str
    note: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "pin", _checked_pin(self.pin))


@dataclass(frozen=True)
class PinoutMap:
    """Ordered pin lists per part.  Pin names are unique per part after trimming."""

    entries: dict[str, tuple[PinoutEntry, ...]]

    def __post_init__(self) -> None:
        cleaned: dict[str, tuple[PinoutEntry, ...]] = {}
        for ref, pins in self.entries.items():
            ref = _checked_ref(ref)
            pin_list = tuple(
                p if isinstance(p, PinoutEntry) else PinoutEntry(*p) if isinstance(p, tuple) else PinoutEntry(p)
                for p in pins
            )
            names = [p.pin for p in pin_list]
            if len(set(names)) != len(names):
                dupes = sorted({n for n in names if names.count(n) > 1})
                raise ValueError(f"duplicate pin name(s) {dupes} on part {ref!r}")
            cleaned[ref] = pin_list
        object.__setattr__(self, "entries", cleaned)

    @classmethod
    def from_dict(cls, mapping: Mapping[str, Iterable[Any]]) -> "PinoutMap":
        """Build from ``{ref: [pin, (pin, note), PinoutEntry, ...]}``."""
        return cls({ref: tuple(pins) for ref, pins in mapping.items()})

    def pins_for(self, ref: str) -> tuple[str, ...]:
        return tuple(p.pin for p in self.entries.get(ref, ()))

    def has_pin(self, ref: str, pin: str) -> bool:
        return pin.strip() in self.pins_for(ref)


@dataclass(frozen=True)
class CodeArtifact:
    """Microcontroller source attached to a device."""

    source: str
    language_tag: str = "arduino-cpp"
    note: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.source, str) or not self.source.strip():
            raise ValueError("code artifact source must be non-empty")


@dataclass(frozen=True)
class Provenance:
    model_id: str
    prompt_digest: str
    reflection_iterations: int
    created_at: str


@dataclass(frozen=True)
class DeviceSpec:
    """A full generated device design."""

    description: str
    bom: tuple[BomItem, ...]
    pinouts: PinoutMap
    connections: tuple[Connection, ...]
    code: CodeArtifact | None = None
    provenance: Provenance | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "bom", tuple(self.bom))
        object.__setattr__(self, "connections", tuple(self.connections))

    def bom_refs(self) -> tuple[str, ...]:
        return tuple(item.ref for item in self.bom)

    def declares_ref(self, ref: str) -> bool:
        return any(item.ref == ref for item in self.bom)


@dataclass(frozen=True)
class Net:
    """A set of electrically joined pins: one connected component of the pin graph."""

    id: int
    members: frozenset[PinRef]
    label: str | None = None

    def __post_init__(self) -> None:
        if len(self.members) < 2:
            raise ValueError(f"net {self.id} has fewer than 2 members")

    def sorted_members(self) -> tuple[PinRef, ...]:
        return tuple(sorted(self.members, key=str))


@dataclass(frozen=True)
class ValidationFinding:
    """One structural defect: an endpoint naming an undeclared part or missing pin."""

    kind: str  # "undeclared_part" | "missing_pin"
    message: str
    endpoint: PinRef
    connection_index: int


def validate(spec: DeviceSpec) -> list[ValidationFinding]:
    """Report every connection endpoint that does not resolve against BOM and pinouts.

    An empty report means the spec is structurally well-formed: every endpoint
    names a declared part and a pin listed in that part's pinout.  Findings are
    data, not failures; callers that need a hard gate use them to raise.
    """
    declared = set(spec.bom_refs())
    findings: list[ValidationFinding] = []
    for index, conn in enumerate(spec.connections):
        for endpoint in conn.endpoints():
            if endpoint.part not in declared:
                findings.append(
                    ValidationFinding(
                        kind="undeclared_part",
                        message=f"connection {index} references undeclared part {endpoint.part}",
                        endpoint=endpoint,
                        connection_index=index,
                    )
                )
            elif not spec.pinouts.has_pin(endpoint.part, endpoint.pin):
                findings.append(
                    ValidationFinding(
                        kind="missing_pin",
                        message=(
                            f"connection {index} references pin {endpoint} "
                            f"absent from the pinout of {endpoint.part}"
                        ),
                        endpoint=endpoint,
                        connection_index=index,
                    )
                )
    return findings


class _UnionFind:
    """Union-find with path compression over dense integer ids."""

    def __init__(self, size: int) -> None:
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def build_nets(connections: Sequence[Connection]) -> list[Net]:
    """Derive nets as connected components of the pin graph.

    Output is deterministic: members sorted lexicographically by ``PART.PIN``,
    nets ordered by their smallest member, ids assigned 1..n in that order.
    """
    index_of: dict[PinRef, int] = {}
    for conn in connections:
        for endpoint in conn.endpoints():
            if endpoint not in index_of:
                index_of[endpoint] = len(index_of)
    uf = _UnionFind(len(index_of))
    for conn in connections:
        uf.union(index_of[conn.a], index_of[conn.b])

    groups: dict[int, set[PinRef]] = {}
    for pin, idx in index_of.items():
        groups.setdefault(uf.find(idx), set()).add(pin)

    ordered = sorted(groups.values(), key=lambda members: str(min(members, key=str)))
    return [Net(id=i + 1, members=frozenset(members)) for i, members in enumerate(ordered)]


# --- canonical document format -------------------------------------------------
#
# Top-level keys, in order: description, bill_of_materials, pinouts, schematic,
# code, provenance.  Two-space indent, arrays in declaration order, optional
# fields omitted when absent.  Files carry the .device.json suffix.

_TOP_KEYS = ("description", "bill_of_materials", "pinouts", "schematic", "code", "provenance")


def spec_to_document(spec: DeviceSpec) -> dict[str, Any]:
    """Plain-data form of a spec, in canonical key order."""
    doc: dict[str, Any] = {"description": spec.description}
    bom = []
    for item in spec.bom:
        entry: dict[str, Any] = {"ref": item.ref, "part_type": item.part_type}
        if item.value is not None:
            entry["value"] = item.value
        if item.note is not None:
            entry["note"] = item.note
        bom.append(entry)
    doc["bill_of_materials"] = bom
    pinouts: dict[str, Any] = {}
    for ref, pins in spec.pinouts.entries.items():
        rows = []
        for p in pins:
            row: dict[str, Any] = {"pin": p.pin}
            if p.note is not None:
                row["note"] = p.note
            rows.append(row)
        pinouts[ref] = rows
    doc["pinouts"] = pinouts
    schematic = []
    for conn in spec.connections:
        edge: dict[str, Any] = {"from": str(conn.a), "to": str(conn.b)}
        if conn.note is not None:
            edge["note"] = conn.note
        schematic.append(edge)
    doc["schematic"] = schematic
    if spec.code is not None:
        code: dict[str, Any] = {
            "language_tag": spec.code.language_tag,
            "source": spec.code.source,
        }
        if spec.code.note is not None:
            code["note"] = spec.code.note
        doc["code"] = code
    else:
        # All six top-level keys are always present; null marks explicit absence,
        # which parsers treat differently from a model forgetting the section.
        doc["code"] = None
    if spec.provenance is not None:
        doc["provenance"] = {
            "model_id": spec.provenance.model_id,
            "prompt_digest": spec.provenance.prompt_digest,
            "reflection_iterations": spec.provenance.reflection_iterations,
            "created_at": spec.provenance.created_at,
        }
    else:
        doc["provenance"] = None
    return doc


def render_document(spec: DeviceSpec) -> str:
    """Serialize without the validation gate.

    Prompt assembly needs to show imperfect in-flight specs to the model;
    everything user-facing should go through canonical_serialize instead.
    """
    return json.dumps(spec_to_document(spec), indent=2, ensure_ascii=False) + "\n"


def canonical_serialize(spec: DeviceSpec) -> str:
    """Emit the canonical on-disk document.  Refuses specs with validation findings."""
    findings = validate(spec)
    if findings:
        raise InvalidSpec(findings)
    return render_document(spec)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise MalformedDocument(message)


def document_to_spec(doc: Mapping[str, Any]) -> DeviceSpec:
    """Build a DeviceSpec from plain document data, checking shape strictly."""
    _require(isinstance(doc, Mapping), "document root must be an object")
    unknown = set(doc) - set(_TOP_KEYS)
    _require(not unknown, f"unknown top-level key(s): {sorted(unknown)}")
    _require("description" in doc, "missing 'description'")
    _require(isinstance(doc["description"], str), "'description' must be a string")

    raw_bom = doc.get("bill_of_materials", [])
    _require(isinstance(raw_bom, list), "'bill_of_materials' must be an array")
    bom = []
    for row in raw_bom:
        _require(isinstance(row, Mapping), "BOM entries must be objects")
        _require("ref" in row and "part_type" in row, "BOM entries need 'ref' and 'part_type'")
        try:
            bom.append(
                BomItem(
                    ref=row["ref"],
                    part_type=row["part_type"],
                    value=row.get("value"),
                    note=row.get("note"),
                )
            )
        except ValueError as exc:
            raise MalformedDocument(f"bad BOM entry: {exc}") from exc

    raw_pinouts = doc.get("pinouts", {})
    _require(isinstance(raw_pinouts, Mapping), "'pinouts' must be an object")
    pin_entries: dict[str, tuple[PinoutEntry, ...]] = {}
    for ref, rows in raw_pinouts.items():
        _require(isinstance(rows, list), f"pinout for {ref!r} must be an array")
        parsed_rows = []
        for row in rows:
            if isinstance(row, str):
                parsed_rows.append(PinoutEntry(row))
                continue
            _require(isinstance(row, Mapping) and "pin" in row, f"pinout rows for {ref!r} need 'pin'")
            parsed_rows.append(PinoutEntry(pin=row["pin"], note=row.get("note")))
        pin_entries[ref] = tuple(parsed_rows)
    try:
        pinouts = PinoutMap(pin_entries)
    except ValueError as exc:
        raise MalformedDocument(f"bad pinouts: {exc}") from exc

    raw_schematic = doc.get("schematic", [])
    _require(isinstance(raw_schematic, list), "'schematic' must be an array")
    connections = []
    for row in raw_schematic:
        _require(isinstance(row, Mapping), "schematic entries must be objects")
        _require("from" in row and "to" in row, "schematic entries need 'from' and 'to'")
        try:
            connections.append(
                Connection(
                    a=PinRef.from_string(row["from"]),
                    b=PinRef.from_string(row["to"]),
                    note=row.get("note"),
                )
            )
        except ValueError as exc:
            raise MalformedDocument(f"bad schematic entry: {exc}") from exc

    code = None
    if doc.get("code") is not None:
        raw_code = doc["code"]
        _require(isinstance(raw_code, Mapping) and "source" in raw_code, "'code' needs 'source'")
        try:
            code = CodeArtifact(
                source=raw_code["source"],
                language_tag=raw_code.get("language_tag", "arduino-cpp"),
                note=raw_code.get("note"),
            )
        except ValueError as exc:
            raise MalformedDocument(f"bad code artifact: {exc}") from exc

    provenance = None
    if doc.get("provenance") is not None:
        raw_prov = doc["provenance"]
        _require(isinstance(raw_prov, Mapping), "'provenance' must be an object")
        for key in ("model_id", "prompt_digest", "reflection_iterations", "created_at"):
            _require(key in raw_prov, f"'provenance' needs {key!r}")
        provenance = Provenance(
            model_id=raw_prov["model_id"],
            prompt_digest=raw_prov["prompt_digest"],
            reflection_iterations=int(raw_prov["reflection_iterations"]),
            created_at=raw_prov["created_at"],
        )

    return DeviceSpec(
        description=doc["description"],
        bom=tuple(bom),
        pinouts=pinouts,
        connections=tuple(connections),
        code=code,
        provenance=provenance,
    )


def parse_canonical(text: str) -> DeviceSpec:
    """Parse a canonical device document.  Inverse of canonical_serialize."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from exc
    return document_to_spec(doc)
