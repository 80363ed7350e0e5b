"""Interchange renderings of a device: flat netlist text and a graph document.

The flat netlist is one line per net with members sorted lexicographically,
so equal specs always render byte-identically and diffs stay stable.  The
graph document is a JSON node-link structure (one node per part, one
undirected edge per connection) consumed directly by the studio UI and by
common graph tooling.
"""
from __future__ import annotations

import json

from .devicespec import DeviceSpec, InvalidSpec, Net, build_nets, validate
from .partsdb import SUPPLY_CATEGORIES, KnowledgeBase, lookup, normalize_pin


def _checked(spec: DeviceSpec) -> None:
    findings = validate(spec)
    if findings:
        raise InvalidSpec(findings)


def _net_label(spec: DeviceSpec, net: Net, kb: KnowledgeBase | None) -> str | None:
    """VCC/GND label when the net carries a supply-role pin, per KB roles."""
    if kb is None:
        return None
    records = {item.ref: lookup(kb, item.part_type) for item in spec.bom}
    saw_ground = False
    for member in sorted(net.members, key=str):
        record = records.get(member.part)
        if record is None:
            continue
        canonical = normalize_pin(record, member.pin)
        pin_spec = record.pin_spec(canonical) if canonical else None
        if pin_spec is None:
            continue
        if pin_spec.role == "power" and record.category in SUPPLY_CATEGORIES:
            return "VCC"
        if pin_spec.role == "ground":
            saw_ground = True
    return "GND" if saw_ground else None


def to_flat_netlist(spec: DeviceSpec, kb: KnowledgeBase | None = None) -> str:
    """Render ``NET <n>: <PART.PIN> ...`` lines, one per derived net."""
    _checked(spec)
    nets = build_nets(spec.connections)
    lines = [f"# flat netlist: {len(nets)} nets"]
    for net in nets:
        members = " ".join(str(p) for p in net.sorted_members())
        label = _net_label(spec, net, kb)
        suffix = f"  # {label}" if label else ""
        lines.append(f"NET {net.id}: {members}{suffix}")
    return "\n".join(lines) + "\n"


def to_graph_doc(spec: DeviceSpec, kb: KnowledgeBase | None = None) -> str:
    """Render the JSON node-link document: parts as nodes, connections as edges."""
    _checked(spec)
    nodes = [
        {"id": item.ref, "label": f"{item.ref} {item.part_type}"}
        for item in spec.bom
    ]
    edges = []
    for conn in spec.connections:
        edge = {
            "source": conn.a.part,
            "target": conn.b.part,
            "from_pin": conn.a.pin,
            "to_pin": conn.b.pin,
            "label": f"{conn.a.pin} - {conn.b.pin}",
        }
        if conn.note is not None:
            edge["note"] = conn.note
        edges.append(edge)
    doc = {"directed": False, "nodes": nodes, "edges": edges}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
