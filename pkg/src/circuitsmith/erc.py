"""Electrical rule checking over a device spec.

A fixed catalogue of rules turns common wiring and code mistakes into
findings with stable ids.  Error-severity rules (E-*) make a report dirty;
warning rules (W-*) do not.  The two structural rules, E-UNDECLARED and
E-DANGLE, double as the engine's precondition: when they fire, run_erc
raises PrereqFailed carrying a report of just those findings, because the
electrical rules cannot be evaluated over unresolvable endpoints.

Everything knowledge-base dependent resolves names through partsdb; parts
without a knowledge-base record are skipped by those rules rather than
guessed at.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .devicespec import DeviceSpec, Net, PinRef, build_nets, validate
from .partsdb import (
    SUPPLY_CATEGORIES,
    ComponentRecord,
    KnowledgeBase,
    lookup,
    normalize_pin,
)
from .specparser import has_range_shortcut

STRUCTURAL_RULES = ("E-UNDECLARED", "E-DANGLE")


class UnknownRule(KeyError):
    pass


class PrereqFailed(Exception):
    """Structural validation findings block the electrical rules.

    Carries an ErcReport holding the structural findings so callers (the
    reflection loop in particular) can still show the model what is wrong.
    """

    def __init__(self, report: "ErcReport"):
        self.report = report
        super().__init__(
            f"{len(report.findings)} structural finding(s); run devicespec.validate first"
        )


@dataclass(frozen=True)
class Finding:
    rule_id: str
    severity: str  # "error" | "warning"
    message: str
    locus: str  # "pin:PART.PIN" | "part:REF" | "code:line N" | "spec"

    def to_json(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "severity": self.severity,
            "message": self.message,
            "locus": self.locus,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Finding":
        return cls(
            rule_id=data["rule_id"],
            severity=data["severity"],
            message=data["message"],
            locus=data["locus"],
        )


@dataclass(frozen=True)
class ErcReport:
    findings: tuple[Finding, ...]
    rules_run: tuple[str, ...]
    clean: bool

    def to_json(self) -> dict:
        return {
            "findings": [f.to_json() for f in self.findings],
            "rules_run": list(self.rules_run),
            "clean": self.clean,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ErcReport":
        return cls(
            findings=tuple(Finding.from_json(f) for f in data["findings"]),
            rules_run=tuple(data["rules_run"]),
            clean=bool(data["clean"]),
        )


class _Context:
    """Precomputed views shared by all rules for one run."""

    def __init__(self, spec: DeviceSpec, kb: KnowledgeBase):
        self.spec = spec
        self.kb = kb
        self.records: dict[str, ComponentRecord | None] = {
            item.ref: lookup(kb, item.part_type) for item in spec.bom
        }
        self.nets: list[Net] = build_nets(spec.connections)
        self.net_of: dict[PinRef, frozenset[PinRef]] = {}
        for net in self.nets:
            for member in net.members:
                self.net_of[member] = net.members

    def record(self, ref: str) -> ComponentRecord | None:
        return self.records.get(ref)

    def canonical_pin(self, endpoint: PinRef) -> str | None:
        record = self.record(endpoint.part)
        return normalize_pin(record, endpoint.pin) if record else None

    def role_of(self, endpoint: PinRef) -> str | None:
        record = self.record(endpoint.part)
        if record is None:
            return None
        canonical = normalize_pin(record, endpoint.pin)
        if canonical is None:
            return None
        spec = record.pin_spec(canonical)
        return spec.role if spec else None

    def is_supply(self, ref: str) -> bool:
        record = self.record(ref)
        return record is not None and record.category in SUPPLY_CATEGORIES

    def part_endpoints(self, ref: str) -> list[PinRef]:
        out = []
        for conn in self.spec.connections:
            for endpoint in conn.endpoints():
                if endpoint.part == ref and endpoint not in out:
                    out.append(endpoint)
        return out


RuleFn = Callable[[_Context], list[Finding]]


def _rule_undeclared(ctx: _Context) -> list[Finding]:
    return [
        Finding("E-UNDECLARED", "error",
                f"connection endpoint {f.endpoint} names a part missing from the BOM",
                f"pin:{f.endpoint}")
        for f in validate(ctx.spec)
        if f.kind == "undeclared_part"
    ]


def _rule_dangle(ctx: _Context) -> list[Finding]:
    return [
        Finding("E-DANGLE", "error",
                f"connection endpoint {f.endpoint} is not in the pinout of {f.endpoint.part}",
                f"pin:{f.endpoint}")
        for f in validate(ctx.spec)
        if f.kind == "missing_pin"
    ]


def _rule_dup_ref(ctx: _Context) -> list[Finding]:
    counts: dict[str, int] = {}
    for item in ctx.spec.bom:
        counts[item.ref] = counts.get(item.ref, 0) + 1
    return [
        Finding("E-DUP-REF", "error",
                f"BOM declares ref {ref} {n} times",
                f"part:{ref}")
        for ref, n in counts.items()
        if n > 1
    ]


def _rule_range(ctx: _Context) -> list[Finding]:
    findings = []
    for conn in ctx.spec.connections:
        for endpoint in conn.endpoints():
            if has_range_shortcut(str(endpoint)):
                findings.append(
                    Finding("E-RANGE", "error",
                            f"endpoint {endpoint} uses a pin range instead of one "
                            "connection per pin",
                            f"pin:{endpoint}")
                )
    return findings


def _supply_role_members(ctx: _Context, members: frozenset[PinRef], role: str) -> list[PinRef]:
    return sorted(
        (m for m in members if ctx.is_supply(m.part) and ctx.role_of(m) == role),
        key=str,
    )


def _rule_power(ctx: _Context) -> list[Finding]:
    findings = []
    for item in ctx.spec.bom:
        record = ctx.record(item.ref)
        if record is None or record.category == "passive" or record.category in SUPPLY_CATEGORIES:
            continue
        endpoints = ctx.part_endpoints(item.ref)
        for role in ("power", "ground"):
            needed = [
                p for p in record.pins
                if p.role == role and p.critical
            ]
            for pin_spec in needed:
                satisfied = False
                for endpoint in endpoints:
                    if ctx.canonical_pin(endpoint) != pin_spec.canonical:
                        continue
                    members = ctx.net_of.get(endpoint, frozenset())
                    if _supply_role_members(ctx, members, role):
                        satisfied = True
                        break
                if not satisfied:
                    findings.append(
                        Finding("E-POWER", "error",
                                f"{item.ref} ({record.canonical_name}) has no net connecting "
                                f"its {pin_spec.canonical} pin to a supply source {role} pin",
                                f"part:{item.ref}")
                    )
    return findings


def _rule_short(ctx: _Context) -> list[Finding]:
    findings = []
    for net in ctx.nets:
        power = _supply_role_members(ctx, net.members, "power")
        grounds = sorted((m for m in net.members if ctx.role_of(m) == "ground"), key=str)
        if power and grounds:
            findings.append(
                Finding("E-SHORT", "error",
                        f"net joins supply pin {power[0]} directly to ground pin "
                        f"{grounds[0]} with no intervening component",
                        f"pin:{power[0]}")
            )
    return findings


def _conducting_bridges(ctx: _Context, exclude_ref: str) -> dict[frozenset[PinRef], list[frozenset[PinRef]]]:
    """Net adjacency through parts that pass current without limiting it.

    Buttons/switches (category input) and LEDs themselves conduct; resistors
    are the protection being looked for, so they contribute no edges; every
    other part is treated as regulating its own pins.
    """
    adjacency: dict[frozenset[PinRef], list[frozenset[PinRef]]] = {}
    for item in ctx.spec.bom:
        if item.ref == exclude_ref:
            continue
        record = ctx.record(item.ref)
        if record is None or record.canonical_name == "resistor":
            continue
        conducts = record.category == "input" or "needs_series_resistor" in record.requires
        if not conducts:
            continue
        nets = []
        for endpoint in ctx.part_endpoints(item.ref):
            members = ctx.net_of.get(endpoint)
            if members is not None and members not in nets:
                nets.append(members)
        for a in nets:
            for b in nets:
                if a is not b:
                    adjacency.setdefault(a, []).append(b)
    return adjacency


def _rule_led_resistor(ctx: _Context) -> list[Finding]:
    driving: list[frozenset[PinRef]] = []
    for net in ctx.nets:
        for member in net.members:
            if ctx.is_supply(member.part) and ctx.role_of(member) in ("power", "digital_io", "analog_io"):
                driving.append(net.members)
                break

    findings = []
    for item in ctx.spec.bom:
        record = ctx.record(item.ref)
        if record is None or "needs_series_resistor" not in record.requires:
            continue
        anode_endpoints = [
            e for e in ctx.part_endpoints(item.ref) if ctx.canonical_pin(e) == "anode"
        ]
        if not anode_endpoints:
            continue
        anode_nets = {ctx.net_of[e] for e in anode_endpoints if e in ctx.net_of}
        adjacency = _conducting_bridges(ctx, exclude_ref=item.ref)
        seen: list[frozenset[PinRef]] = list(driving)
        queue = list(driving)
        reached = False
        while queue:
            net_members = queue.pop()
            if net_members in anode_nets:
                reached = True
                break
            for neighbor in adjacency.get(net_members, []):
                if neighbor not in seen:
                    seen.append(neighbor)
                    queue.append(neighbor)
        if reached:
            findings.append(
                Finding("E-LED-RESISTOR", "error",
                        f"a drive path reaches the anode of {item.ref} without "
                        "passing a series resistor",
                        f"pin:{sorted(anode_endpoints, key=str)[0]}")
            )
    return findings


def _rule_pullup(ctx: _Context) -> list[Finding]:
    resistor_refs = {
        item.ref for item in ctx.spec.bom
        if (r := ctx.record(item.ref)) is not None and r.canonical_name == "resistor"
    }
    findings = []
    for item in ctx.spec.bom:
        record = ctx.record(item.ref)
        if record is None or "needs_pullup" not in record.requires:
            continue
        signal_nets = [
            ctx.net_of[e]
            for e in ctx.part_endpoints(item.ref)
            if e in ctx.net_of and ctx.role_of(e) == "signal"
        ]
        has_resistor = any(
            any(member.part in resistor_refs for member in members)
            for members in signal_nets
        )
        if not has_resistor:
            findings.append(
                Finding("W-PULLUP", "warning",
                        f"{item.ref} ({record.canonical_name}) needs a pull-up but no "
                        "resistor shares its signal net",
                        f"part:{item.ref}")
            )
    return findings


def _rule_float_input(ctx: _Context) -> list[Finding]:
    findings = []
    for item in ctx.spec.bom:
        record = ctx.record(item.ref)
        if record is None or record.category in SUPPLY_CATEGORIES:
            continue
        connected = {
            canonical
            for endpoint in ctx.part_endpoints(item.ref)
            if (canonical := ctx.canonical_pin(endpoint)) is not None
        }
        for pin in record.pins:
            if not pin.critical or pin.role not in ("signal", "digital_io", "analog_io"):
                continue
            if pin.canonical not in connected:
                findings.append(
                    Finding("W-FLOAT-INPUT", "warning",
                            f"critical pin {pin.canonical} of {item.ref} "
                            f"({record.canonical_name}) is not in any net",
                            f"pin:{PinRef(item.ref, pin.canonical)}")
                )
    return findings


_PIN_CALL = re.compile(
    r"\b(pinMode|digitalWrite|digitalRead|analogWrite|analogRead|tone|noTone|pulseIn)"
    r"\s*\(\s*([AD]?\d+)\s*[,)]"
)


def _rule_code_pin(ctx: _Context) -> list[Finding]:
    if ctx.spec.code is None:
        return []
    mcus = [
        (item.ref, record)
        for item in ctx.spec.bom
        if (record := ctx.record(item.ref)) is not None and record.category == "microcontroller"
    ]
    if not mcus:
        return []

    connected: dict[str, set[str]] = {}
    for ref, record in mcus:
        pins = set()
        for endpoint in ctx.part_endpoints(ref):
            canonical = normalize_pin(record, endpoint.pin)
            if canonical is not None:
                pins.add(canonical)
        connected[ref] = pins

    findings = []
    reported: set[str] = set()
    for match in _PIN_CALL.finditer(ctx.spec.code.source):
        literal = match.group(2)
        if literal in reported:
            continue
        line = ctx.spec.code.source.count("\n", 0, match.start()) + 1
        hit = False
        known = False
        for ref, record in mcus:
            canonical = normalize_pin(record, literal)
            if canonical is None:
                continue
            known = True
            if canonical in connected[ref]:
                hit = True
                break
        if hit:
            continue
        reported.add(literal)
        if known:
            message = (
                f"code references pin {literal} ({match.group(1)}) but that "
                "microcontroller pin is not in any net"
            )
        else:
            message = (
                f"code references pin {literal} ({match.group(1)}) which is not "
                "a known pin of the declared microcontroller"
            )
        findings.append(Finding("W-CODE-PIN", "warning", message, f"code:line {line}"))
    return findings


@dataclass(frozen=True)
class _Rule:
    rule_id: str
    severity: str
    summary: str
    remedy: str
    fn: RuleFn


_REGISTRY: dict[str, _Rule] = {
    rule.rule_id: rule
    for rule in [
        _Rule("E-UNDECLARED", "error",
              "every connection endpoint names a part declared in the BOM",
              "Add the missing part to the bill of materials, or fix the endpoint's "
              "part ref so it matches a declared component.",
              _rule_undeclared),
        _Rule("E-DANGLE", "error",
              "every connection endpoint names a pin listed in that part's pinout",
              "Add the pin to the part's pinout list, or correct the endpoint to one "
              "of the pins the part actually declares.",
              _rule_dangle),
        _Rule("E-DUP-REF", "error",
              "BOM refs are unique",
              "Rename the duplicated component refs so each BOM line has its own "
              "identifier; every connection must then use the intended ref.",
              _rule_dup_ref),
        _Rule("E-RANGE", "error",
              "connections enumerate one pin pair each, never ranges",
              "Replace the ranged line with one connection per pin pair, enumerating "
              "each wire explicitly.",
              _rule_range),
        _Rule("E-POWER", "error",
              "every non-passive part has its supply pins wired to a source",
              "Wire the part's power pin to a supply pin (for example 5V on the "
              "board) and its ground pin to GND so the component is powered.",
              _rule_power),
        _Rule("E-SHORT", "error",
              "no net ties a supply output directly to ground",
              "Remove the wire shorting the supply pin to ground, or place a "
              "component between them; a direct short can destroy the supply.",
              _rule_short),
        _Rule("E-LED-RESISTOR", "error",
              "every drive path into an LED anode passes a series resistor",
              "Insert a current-limiting resistor (around 220 ohms) between the "
              "driving pin or supply and the LED anode.",
              _rule_led_resistor),
        _Rule("W-PULLUP", "warning",
              "parts that need a pull-up have a resistor on their signal net",
              "Add a pull-up resistor (typically 10k ohms) from the part's signal "
              "line to the supply so the input reads high when undriven.",
              _rule_pullup),
        _Rule("W-FLOAT-INPUT", "warning",
              "critical signal pins are connected somewhere",
              "Connect the listed critical pin; a floating signal pin leaves the "
              "part partially wired and its behavior undefined.",
              _rule_float_input),
        _Rule("W-CODE-PIN", "warning",
              "pins referenced by the code appear in the netlist",
              "Either wire the referenced microcontroller pin into the circuit or "
              "update the code to use a pin that is actually connected.",
              _rule_code_pin),
    ]
}

ALL_RULE_IDS = tuple(_REGISTRY)


def _resolve_scope(rules: Iterable[str] | None) -> tuple[str, ...]:
    if rules is None:
        return ALL_RULE_IDS
    scope = tuple(rules)
    for rule_id in scope:
        if rule_id not in _REGISTRY:
            raise UnknownRule(rule_id)
    return tuple(r for r in ALL_RULE_IDS if r in scope)


def _sorted_findings(findings: Iterable[Finding]) -> tuple[Finding, ...]:
    return tuple(sorted(findings, key=lambda f: (f.rule_id, f.locus, f.message)))


def evaluate_rule(rule_id: str, spec: DeviceSpec, kb: KnowledgeBase) -> list[Finding]:
    """Run a single rule in isolation (no structural gate)."""
    if rule_id not in _REGISTRY:
        raise UnknownRule(rule_id)
    return _REGISTRY[rule_id].fn(_Context(spec, kb))


def run_erc(
    spec: DeviceSpec,
    kb: KnowledgeBase,
    rules: Sequence[str] | None = None,
) -> ErcReport:
    """Run the rule catalogue and return a deterministic report.

    Raises PrereqFailed when structural validation findings exist; the raised
    exception carries a report of the structural findings themselves.
    """
    scope = _resolve_scope(rules)
    ctx = _Context(spec, kb)

    structural = [f for rid in STRUCTURAL_RULES for f in _REGISTRY[rid].fn(ctx)]
    if structural:
        raise PrereqFailed(
            ErcReport(findings=_sorted_findings(structural), rules_run=scope, clean=False)
        )

    findings: list[Finding] = []
    for rule_id in scope:
        if rule_id in STRUCTURAL_RULES:
            continue  # already evaluated as the gate; they found nothing
        findings.extend(_REGISTRY[rule_id].fn(ctx))

    ordered = _sorted_findings(findings)
    clean = not any(f.severity == "error" for f in ordered)
    return ErcReport(findings=ordered, rules_run=scope, clean=clean)


def explain(finding: Finding) -> str:
    """One-paragraph remediation text for a finding, deterministic per rule."""
    rule = _REGISTRY.get(finding.rule_id)
    if rule is None:
        raise UnknownRule(finding.rule_id)
    return f"[{finding.rule_id}] {finding.message} ({finding.locus}). {rule.remedy}"


def rule_summaries() -> dict[str, str]:
    """Stable id -> one-line description map, used by prompts and docs."""
    return {rule_id: rule.summary for rule_id, rule in _REGISTRY.items()}
