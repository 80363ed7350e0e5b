"""Extract a DeviceSpec from raw model response text.

Model responses mix prose, structured JSON-ish blocks, and Markdown code
fences.  This module finds the blocks, applies one lenient repair pass
(trailing commas, ``//`` line comments), identifies the device sections
either by explicit top-level keys or by content shape, and assembles a
DeviceSpec while reporting precise diagnostics for everything it had to
reject or repair.

Extraction is total: any byte string yields a RawBlocks, possibly empty.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .devicespec import (
    BomItem,
    CodeArtifact,
    Connection,
    DeviceSpec,
    PinoutEntry,
    PinoutMap,
    PinRef,
)

SECTION_KEYS = ("bill_of_materials", "pinouts", "schematic", "code")

_CODE_INFO_STRINGS = {"c", "cpp", "c++", "cxx", "arduino", "ino"}
_STRUCTURED_INFO_STRINGS = {"json", "jsonc", "json5"}

_RANGE_PIN = re.compile(r"[A-Za-z]*\d+\s*-\s*[A-Za-z]*\d+$")


class NoParsableContent(ValueError):
    """No device section could be recovered from the response."""

    def __init__(self, message: str, diagnostics: list["ParseDiagnostic"] | None = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class MalformedEndpoint(ValueError):
    """Endpoint string has no PART.PIN separator."""


class RangeShortcut(ValueError):
    """Endpoint uses a range or wildcard instead of enumerating pins."""


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: tuple[int, int]

    def to_json(self) -> dict[str, Any]:
        return {"severity": self.severity, "message": self.message, "span": list(self.span)}


@dataclass(frozen=True)
class StructuredBlock:
    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class CodeFence:
    info_string: str
    body: str
    span: tuple[int, int]


@dataclass(frozen=True)
class RawBlocks:
    structured_blocks: tuple[StructuredBlock, ...] = ()
    code_fences: tuple[CodeFence, ...] = ()
    diagnostics: tuple[ParseDiagnostic, ...] = ()


def has_range_shortcut(endpoint: str) -> bool:
    """True when an endpoint string uses a range or wildcard shortcut."""
    cleaned = endpoint.strip()
    if ".." in cleaned or "*" in cleaned:
        return True
    pin = cleaned.split(".", 1)[1] if "." in cleaned else cleaned
    return bool(_RANGE_PIN.fullmatch(pin.strip()))


def parse_pin_endpoint(text: str) -> PinRef:
    """Parse ``PART.PIN``, rejecting range and wildcard shortcuts.

    Raises RangeShortcut for pin ranges ("D2-D5"), ".." spans and "*"
    wildcards; MalformedEndpoint when there is no '.' separator.
    """
    cleaned = text.strip()
    if ".." in cleaned or "*" in cleaned:
        raise RangeShortcut(f"endpoint {cleaned!r} uses a range/wildcard shortcut")
    if "." not in cleaned:
        raise MalformedEndpoint(f"endpoint {cleaned!r} has no PART.PIN separator")
    part, pin = cleaned.split(".", 1)
    if _RANGE_PIN.fullmatch(pin.strip()):
        raise RangeShortcut(f"endpoint {cleaned!r} spans a pin range instead of one pin")
    if not part.strip() or not pin.strip():
        raise MalformedEndpoint(f"endpoint {cleaned!r} has an empty part or pin")
    return PinRef(part, pin)


def extract_blocks(raw: str) -> RawBlocks:
    """Split raw text into structured blocks and code fences with spans.

    Triple-backtick fences are classified by info string (json family to
    structured, known code languages to code); unlabeled fences are sniffed
    by their first non-blank character.  Bare top-level JSON objects and
    arrays outside any fence are captured as structured blocks too.  An
    unterminated fence is captured to end-of-input with a warning.
    """
    structured: list[StructuredBlock] = []
    fences: list[CodeFence] = []
    diagnostics: list[ParseDiagnostic] = []
    fence_regions: list[tuple[int, int]] = []

    lines = raw.splitlines(keepends=True)
    offsets = []
    pos = 0
    for line in lines:
        offsets.append(pos)
        pos += len(line)

    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if not stripped.startswith("```"):
            i += 1
            continue
        info = stripped[3:].strip().lower()
        start = offsets[i]
        j = i + 1
        body_lines = []
        closed = False
        while j < len(lines):
            if lines[j].strip().startswith("```") and lines[j].strip().strip("`") == "":
                closed = True
                break
            body_lines.append(lines[j])
            j += 1
        if closed:
            end = offsets[j] + len(lines[j])
        else:
            end = len(raw)
            diagnostics.append(
                ParseDiagnostic(
                    severity="warning",
                    message="unterminated code fence captured to end of input",
                    span=(start, end),
                )
            )
        body = "".join(body_lines)
        span = (start, end)
        fence_regions.append(span)
        if info in _STRUCTURED_INFO_STRINGS:
            structured.append(StructuredBlock(text=body, span=span))
        elif info == "" and body.lstrip()[:1] in ("{", "["):
            structured.append(StructuredBlock(text=body, span=span))
        else:
            fences.append(CodeFence(info_string=info, body=body, span=span))
        i = j + 1 if closed else len(lines)

    for block in _bare_structured_blocks(raw, fence_regions):
        structured.append(block)

    structured.sort(key=lambda b: b.span)
    fences.sort(key=lambda f: f.span)
    return RawBlocks(
        structured_blocks=tuple(structured),
        code_fences=tuple(fences),
        diagnostics=tuple(diagnostics),
    )


def _bare_structured_blocks(raw: str, fence_regions: list[tuple[int, int]]) -> list[StructuredBlock]:
    """Find balanced top-level {...} / [...] regions outside fences."""

    def in_fence(index: int) -> bool:
        return any(start <= index < end for start, end in fence_regions)

    blocks = []
    i = 0
    n = len(raw)
    while i < n:
        ch = raw[i]
        if ch not in "{[" or in_fence(i):
            i += 1
            continue
        close = "}" if ch == "{" else "]"
        open_ = ch
        depth = 0
        in_string = False
        escape = False
        j = i
        end = None
        while j < n:
            c = raw[j]
            if in_string:
                if escape:
                    escape = False
                elif c == "\\":
                    escape = True
                elif c == '"':
                    in_string = False
            else:
                if c == '"':
                    in_string = True
                elif c == open_:
                    depth += 1
                elif c == close:
                    depth -= 1
                    if depth == 0:
                        end = j + 1
                        break
            j += 1
        if end is None:
            i += 1
            continue
        blocks.append(StructuredBlock(text=raw[i:end], span=(i, end)))
        i = end
    return blocks


_TRAILING_COMMA = re.compile(r",(\s*[}\]])")


def _repair_structured_text(text: str) -> tuple[str, list[str]]:
    """Strip // line comments and trailing commas, reporting what was repaired."""
    repairs = []
    out_chars: list[str] = []
    in_string = False
    escape = False
    i = 0
    n = len(text)
    stripped_comment = False
    while i < n:
        c = text[i]
        if in_string:
            out_chars.append(c)
            if escape:
                escape = False
            elif c == "\\":
                escape = True
            elif c == '"':
                in_string = False
            i += 1
            continue
        if c == '"':
            in_string = True
            out_chars.append(c)
            i += 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            stripped_comment = True
            continue
        out_chars.append(c)
        i += 1
    repaired = "".join(out_chars)
    if stripped_comment:
        repairs.append("stripped // line comments")
    without_commas = _TRAILING_COMMA.sub(r"\1", repaired)
    if without_commas != repaired:
        repairs.append("removed trailing commas")
    return without_commas, repairs


def _parse_structured(block: StructuredBlock, diagnostics: list[ParseDiagnostic]) -> Any | None:
    try:
        return json.loads(block.text)
    except json.JSONDecodeError:
        pass
    repaired, repairs = _repair_structured_text(block.text)
    try:
        value = json.loads(repaired)
    except json.JSONDecodeError as exc:
        diagnostics.append(
            ParseDiagnostic("warning", f"unparsable structured block: {exc}", block.span)
        )
        return None
    for repair in repairs:
        diagnostics.append(ParseDiagnostic("warning", repair, block.span))
    return value


def _classify(value: Any) -> dict[str, tuple[Any, ...]]:
    """Map a parsed JSON value to candidate sections by key or shape."""
    sections: dict[str, Any] = {}
    if isinstance(value, dict):
        known = set(value) & {"description", *SECTION_KEYS, "provenance"}
        if known:
            for key in known:
                sections[key] = value[key]
            return sections
        if value and all(isinstance(v, list) for v in value.values()):
            return {"pinouts": value}
        if "source" in value:
            return {"code": value}
        return {}
    if isinstance(value, list) and value:
        if all(isinstance(row, dict) and "ref" in row and "part_type" in row for row in value):
            return {"bill_of_materials": value}
        if all(isinstance(row, dict) and "from" in row and "to" in row for row in value):
            return {"schematic": value}
    return {}


def parse_device_spec(raw: str) -> tuple[DeviceSpec, list[ParseDiagnostic]]:
    """Assemble a DeviceSpec from raw response text.

    Returns the best-effort spec plus diagnostics.  Missing sections are
    error diagnostics; rejected rows (range shortcuts, malformed endpoints,
    self-loops) are error diagnostics with the offending block's span.
    Raises NoParsableContent when not a single section can be recovered.
    """
    blocks = extract_blocks(raw)
    diagnostics: list[ParseDiagnostic] = list(blocks.diagnostics)
    whole = (0, len(raw))

    sections: dict[str, Any] = {}
    section_spans: dict[str, tuple[int, int]] = {}
    description = ""
    for block in blocks.structured_blocks:
        value = _parse_structured(block, diagnostics)
        if value is None:
            continue
        for key, payload in _classify(value).items():
            if key == "description":
                if isinstance(payload, str):
                    description = description or payload
                continue
            if key in sections:
                diagnostics.append(
                    ParseDiagnostic("warning", f"duplicate {key} section ignored", block.span)
                )
                continue
            sections[key] = payload
            section_spans[key] = block.span

    bom, bom_ok = _assemble_bom(sections, section_spans, diagnostics, whole)
    pinouts, pinouts_ok = _assemble_pinouts(sections, section_spans, diagnostics, whole)
    connections, schematic_ok = _assemble_schematic(sections, section_spans, diagnostics, whole)
    code, code_ok = _assemble_code(sections, section_spans, blocks, diagnostics, whole)
    provenance = _assemble_provenance(sections, section_spans, diagnostics)

    if not any((bom_ok, pinouts_ok, schematic_ok, code_ok)):
        raise NoParsableContent(
            "no device section could be parsed from the response", diagnostics
        )

    spec = DeviceSpec(
        description=description,
        bom=tuple(bom),
        pinouts=pinouts,
        connections=tuple(connections),
        code=code,
        provenance=provenance,
    )
    return spec, diagnostics


def _assemble_bom(sections, spans, diagnostics, whole) -> tuple[list[BomItem], bool]:
    if "bill_of_materials" not in sections:
        diagnostics.append(ParseDiagnostic("error", "missing bill_of_materials section", whole))
        return [], False
    span = spans["bill_of_materials"]
    items: list[BomItem] = []
    seen: set[str] = set()
    rows = sections["bill_of_materials"]
    if not isinstance(rows, list):
        diagnostics.append(ParseDiagnostic("error", "bill_of_materials is not an array", span))
        return [], False
    for row in rows:
        if not isinstance(row, dict) or "ref" not in row or "part_type" not in row:
            diagnostics.append(
                ParseDiagnostic("error", f"BOM row missing ref/part_type: {row!r}", span)
            )
            continue
        try:
            item = BomItem(
                ref=row["ref"], part_type=row["part_type"],
                value=row.get("value"), note=row.get("note"),
            )
        except ValueError as exc:
            diagnostics.append(ParseDiagnostic("error", f"bad BOM row: {exc}", span))
            continue
        if item.ref in seen:
            diagnostics.append(
                ParseDiagnostic("warning", f"duplicate BOM ref {item.ref} kept as-is", span)
            )
        seen.add(item.ref)
        items.append(item)
    return items, True


def _assemble_pinouts(sections, spans, diagnostics, whole) -> tuple[PinoutMap, bool]:
    if "pinouts" not in sections:
        diagnostics.append(ParseDiagnostic("error", "missing pinouts section", whole))
        return PinoutMap({}), False
    span = spans["pinouts"]
    mapping = sections["pinouts"]
    if not isinstance(mapping, dict):
        diagnostics.append(ParseDiagnostic("error", "pinouts is not an object", span))
        return PinoutMap({}), False
    entries: dict[str, tuple[PinoutEntry, ...]] = {}
    for ref, rows in mapping.items():
        if not isinstance(rows, list):
            diagnostics.append(ParseDiagnostic("error", f"pinout for {ref!r} is not an array", span))
            continue
        parsed: list[PinoutEntry] = []
        seen: set[str] = set()
        for row in rows:
            try:
                if isinstance(row, str):
                    entry = PinoutEntry(row)
                elif isinstance(row, dict) and "pin" in row:
                    entry = PinoutEntry(pin=row["pin"], note=row.get("note"))
                else:
                    raise ValueError(f"unrecognized pinout row {row!r}")
            except ValueError as exc:
                diagnostics.append(ParseDiagnostic("error", f"bad pinout row for {ref!r}: {exc}", span))
                continue
            if entry.pin in seen:
                diagnostics.append(
                    ParseDiagnostic("warning", f"duplicate pin {entry.pin!r} on {ref!r} dropped", span)
                )
                continue
            seen.add(entry.pin)
            parsed.append(entry)
        try:
            entries[ref.strip() if isinstance(ref, str) else ref] = tuple(parsed)
        except Exception:
            diagnostics.append(ParseDiagnostic("error", f"bad pinout part ref {ref!r}", span))
    try:
        return PinoutMap(entries), True
    except ValueError as exc:
        diagnostics.append(ParseDiagnostic("error", f"bad pinouts: {exc}", span))
        return PinoutMap({}), False


def _assemble_schematic(sections, spans, diagnostics, whole) -> tuple[list[Connection], bool]:
    if "schematic" not in sections:
        diagnostics.append(ParseDiagnostic("error", "missing schematic section", whole))
        return [], False
    span = spans["schematic"]
    rows = sections["schematic"]
    if not isinstance(rows, list):
        diagnostics.append(ParseDiagnostic("error", "schematic is not an array", span))
        return [], False
    connections: list[Connection] = []
    for row in rows:
        if not isinstance(row, dict) or "from" not in row or "to" not in row:
            diagnostics.append(
                ParseDiagnostic("error", f"schematic row missing from/to: {row!r}", span)
            )
            continue
        try:
            a = parse_pin_endpoint(str(row["from"]))
            b = parse_pin_endpoint(str(row["to"]))
            connections.append(Connection(a, b, note=row.get("note")))
        except RangeShortcut as exc:
            diagnostics.append(ParseDiagnostic("error", f"RangeShortcut: {exc}", span))
        except (MalformedEndpoint, ValueError) as exc:
            diagnostics.append(ParseDiagnostic("error", f"rejected connection: {exc}", span))
    return connections, True


def _assemble_code(sections, spans, blocks: RawBlocks, diagnostics, whole) -> tuple[CodeArtifact | None, bool]:
    if "code" in sections and sections["code"] is None:
        # Explicit "code": null in a canonical document: code is declaredly absent.
        return None, True
    payload = sections.get("code")
    if payload is not None:
        span = spans["code"]
        if isinstance(payload, dict) and "source" in payload:
            try:
                return (
                    CodeArtifact(
                        source=payload["source"],
                        language_tag=payload.get("language_tag", "arduino-cpp"),
                        note=payload.get("note"),
                    ),
                    True,
                )
            except ValueError as exc:
                diagnostics.append(ParseDiagnostic("error", f"bad code section: {exc}", span))
                return None, False
        if isinstance(payload, str) and payload.strip():
            return CodeArtifact(source=payload), True
        diagnostics.append(ParseDiagnostic("error", "unusable code section", span))
        return None, False

    fence = _pick_code_fence(blocks.code_fences)
    if fence is None:
        diagnostics.append(ParseDiagnostic("error", "missing code section", whole))
        return None, False
    if not fence.body.strip():
        diagnostics.append(ParseDiagnostic("error", "code fence is empty", fence.span))
        return None, False
    tag = fence.info_string if fence.info_string else "arduino-cpp"
    return CodeArtifact(source=fence.body, language_tag=tag), True


def _assemble_provenance(sections, spans, diagnostics):
    payload = sections.get("provenance")
    if payload is None:
        return None
    keys = ("model_id", "prompt_digest", "reflection_iterations", "created_at")
    if not isinstance(payload, dict) or not all(k in payload for k in keys):
        diagnostics.append(
            ParseDiagnostic("warning", "malformed provenance section ignored", spans["provenance"])
        )
        return None
    from .devicespec import Provenance

    return Provenance(
        model_id=payload["model_id"],
        prompt_digest=payload["prompt_digest"],
        reflection_iterations=int(payload["reflection_iterations"]),
        created_at=payload["created_at"],
    )


def _pick_code_fence(fences: tuple[CodeFence, ...]) -> CodeFence | None:
    """First C/C++-family fence, else the longest unlabeled-or-other fence."""
    for fence in fences:
        if fence.info_string in _CODE_INFO_STRINGS:
            return fence
    if not fences:
        return None
    return max(fences, key=lambda f: (len(f.body), -f.span[0]))


def diagnostics_to_json(diagnostics: list[ParseDiagnostic]) -> list[dict[str, Any]]:
    return [d.to_json() for d in diagnostics]
