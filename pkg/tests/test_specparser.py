import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circuitsmith.devicespec import canonical_serialize
from circuitsmith.partsdb import bundled_kb
from circuitsmith.specparser import (
    MalformedEndpoint,
    NoParsableContent,
    RangeShortcut,
    extract_blocks,
    parse_device_spec,
    parse_pin_endpoint,
)
from specgen import random_specs

FOUR_BLOCK_RESPONSE = """Here is the design you asked for.

```json
[
  {"ref": "UNO", "part_type": "arduino uno", "note": "main controller"},
  {"ref": "LED1", "part_type": "LED", "value": "red"},
  {"ref": "R1", "part_type": "resistor", "value": "220 ohms"}
]
```

The pinouts:

```json
{
  "UNO": [{"pin": "D13"}, {"pin": "GND"}],
  "LED1": [{"pin": "anode"}, {"pin": "cathode"}],
  "R1": [{"pin": "1"}, {"pin": "2"}]
}
```

And the schematic:

```json
[
  {"from": "UNO.D13", "to": "R1.1"},
  {"from": "R1.2", "to": "LED1.anode"},
  {"from": "LED1.cathode", "to": "UNO.GND"}
]
```

Finally, the code:

```cpp
void setup() { pinMode(13, OUTPUT); }
void loop() { digitalWrite(13, HIGH); }
```
"""


class TestExtractBlocks:
    def test_structured_and_code_fences_separated(self):
        raw = '```json\n{"a": 1}\n```\nsome prose\n```cpp\nint main() {}\n```\n'
        blocks = extract_blocks(raw)
        assert len(blocks.structured_blocks) == 1
        assert len(blocks.code_fences) == 1
        assert blocks.code_fences[0].info_string == "cpp"

    def test_prose_only_is_empty(self):
        blocks = extract_blocks("nothing structured here, just words.")
        assert blocks.structured_blocks == ()
        assert blocks.code_fences == ()

    def test_unterminated_fence_captured_with_warning(self):
        raw = "intro\n```cpp\nvoid loop() {}\n"
        blocks = extract_blocks(raw)
        assert len(blocks.code_fences) == 1
        assert blocks.code_fences[0].span[1] == len(raw)
        assert any(d.severity == "warning" for d in blocks.diagnostics)

    def test_bare_json_object_outside_fences_captured(self):
        raw = 'preamble text {"description": "x", "bill_of_materials": []} trailing'
        blocks = extract_blocks(raw)
        assert len(blocks.structured_blocks) == 1
        start, end = blocks.structured_blocks[0].span
        assert raw[start] == "{" and raw[end - 1] == "}"

    def test_unlabeled_fence_sniffed_by_content(self):
        raw = "```\n{\"k\": []}\n```\n```\nnot structured\n```\n"
        blocks = extract_blocks(raw)
        assert len(blocks.structured_blocks) == 1
        assert len(blocks.code_fences) == 1

    def test_spans_ascending_and_non_overlapping(self):
        blocks = extract_blocks(FOUR_BLOCK_RESPONSE)
        spans = sorted([b.span for b in blocks.structured_blocks] + [f.span for f in blocks.code_fences])
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert e1 <= s2

    @settings(max_examples=80, deadline=None)
    @given(st.text(max_size=400))
    def test_total_on_arbitrary_text(self, raw):
        extract_blocks(raw)  # must never raise


class TestParsePinEndpoint:
    def test_simple_endpoints(self):
        p = parse_pin_endpoint("LED1.anode")
        assert (p.part, p.pin) == ("LED1", "anode")
        p = parse_pin_endpoint(" UNO.A0 ")
        assert (p.part, p.pin) == ("UNO", "A0")

    def test_range_rejected(self):
        with pytest.raises(RangeShortcut):
            parse_pin_endpoint("UNO.D2-D9")
        with pytest.raises(RangeShortcut):
            parse_pin_endpoint("LED1..LED4")
        with pytest.raises(RangeShortcut):
            parse_pin_endpoint("UNO.D*")

    def test_malformed_rejected(self):
        with pytest.raises(MalformedEndpoint):
            parse_pin_endpoint("UNOD2")
        with pytest.raises(MalformedEndpoint):
            parse_pin_endpoint(".anode")

    def test_no_false_positives_on_kb_pin_names(self):
        kb = bundled_kb()
        for record in kb.records.values():
            for pin in record.pins:
                for name in (pin.canonical, *pin.aliases):
                    endpoint = f"PART1.{name}"
                    parsed = parse_pin_endpoint(endpoint)
                    assert parsed.part == "PART1"


class TestParseDeviceSpec:
    def test_four_block_response_assembles_cleanly(self):
        spec, diagnostics = parse_device_spec(FOUR_BLOCK_RESPONSE)
        assert [item.ref for item in spec.bom] == ["UNO", "LED1", "R1"]
        assert len(spec.connections) == 3
        assert spec.code is not None and "pinMode" in spec.code.source
        assert [d for d in diagnostics if d.severity == "error"] == []

    def test_missing_code_fence_is_one_error(self):
        raw = FOUR_BLOCK_RESPONSE.split("Finally, the code:")[0]
        spec, diagnostics = parse_device_spec(raw)
        assert spec.code is None
        errors = [d for d in diagnostics if d.severity == "error"]
        assert len(errors) == 1 and "code" in errors[0].message

    def test_range_shortcut_connection_rejected_with_error(self):
        raw = """```json
{
  "bill_of_materials": [{"ref": "UNO", "part_type": "arduino uno"}],
  "pinouts": {"UNO": [{"pin": "D2"}]},
  "schematic": [{"from": "UNO.D2-D5", "to": "LED1..LED4"}],
  "code": {"language_tag": "arduino-cpp", "source": "void setup(){}"}
}
```"""
        spec, diagnostics = parse_device_spec(raw)
        assert spec.connections == ()
        assert any("RangeShortcut" in d.message for d in diagnostics if d.severity == "error")

    def test_prose_only_raises(self):
        with pytest.raises(NoParsableContent):
            parse_device_spec("I cannot help with that request.")

    def test_repairs_emit_warnings(self):
        raw = """{
  "bill_of_materials": [
    {"ref": "LED1", "part_type": "LED"},  // indicator
  ],
  "pinouts": {"LED1": [{"pin": "anode"}, {"pin": "cathode"}]},
  "schematic": [],
  "code": {"source": "void setup(){}\\nvoid loop(){}"}
}"""
        spec, diagnostics = parse_device_spec(raw)
        assert [item.ref for item in spec.bom] == ["LED1"]
        warnings = [d.message for d in diagnostics if d.severity == "warning"]
        assert any("comment" in w for w in warnings)
        assert any("trailing comma" in w for w in warnings)

    def test_canonical_documents_round_trip_with_zero_errors(self):
        for spec in random_specs(seed=40, count=40):
            text = canonical_serialize(spec)
            parsed, diagnostics = parse_device_spec(text)
            assert [d for d in diagnostics if d.severity == "error"] == []
            assert parsed == spec

    def test_self_loop_connection_rejected(self):
        raw = """{
  "bill_of_materials": [{"ref": "R1", "part_type": "resistor"}],
  "pinouts": {"R1": [{"pin": "1"}]},
  "schematic": [{"from": "R1.1", "to": "R1.1"}],
  "code": null
}"""
        spec, diagnostics = parse_device_spec(raw)
        assert spec.connections == ()
        assert any(d.severity == "error" for d in diagnostics)
