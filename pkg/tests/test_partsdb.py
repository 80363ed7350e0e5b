import json

import pytest

from circuitsmith.partsdb import (
    ComponentRecord,
    DuplicateAlias,
    PinSpec,
    SchemaError,
    bundled_kb,
    kb_from_records,
    load_kb,
    lookup,
    normalize_name,
    normalize_pin,
)


@pytest.fixture(scope="module")
def kb():
    return bundled_kb()


def _two_pins():
    return (PinSpec("1", critical=True), PinSpec("2"))


class TestNormalize:
    def test_case_space_hyphen_insensitive(self):
        assert normalize_name("HC-SR04") == normalize_name("hcsr04") == "hcsr04"
        assert normalize_name(" Hobby Servo ") == "hobbyservo"
        assert normalize_name("data_in") == "datain"

    def test_punctuation_only_names_survive(self):
        assert normalize_name("+") == "+"
        assert normalize_name(" - ") == "-"


class TestLoad:
    def test_bundled_kb_loads_with_expected_parts(self, kb):
        assert len(kb) >= 12
        for name in [
            "led", "resistor", "pushbutton", "hobby servo", "hc-sr04", "16x2 lcd",
            "piezo buzzer", "relay module", "7-segment display", "arduino uno",
            "7400 quad nand", "cds photocell",
        ]:
            assert name in kb.records, name

    def test_alias_index_covers_everything(self, kb):
        for record in kb.records.values():
            for name in (record.canonical_name, *record.name_aliases):
                assert kb.alias_index[normalize_name(name)] == record.canonical_name

    def test_empty_record_list_is_valid(self, tmp_path):
        path = tmp_path / "empty.kb.json"
        path.write_text("[]")
        assert len(load_kb(path)) == 0

    def test_duplicate_alias_across_records_rejected(self):
        a = ComponentRecord("board a", "microcontroller", pins=_two_pins(), name_aliases=("uno",))
        b = ComponentRecord("board b", "microcontroller", pins=_two_pins(), name_aliases=("uno",))
        with pytest.raises(DuplicateAlias):
            kb_from_records([a, b])

    def test_schema_errors(self, tmp_path):
        bad = tmp_path / "bad.kb.json"
        bad.write_text('{"records": []}')
        with pytest.raises(SchemaError):
            load_kb(bad)
        bad.write_text(json.dumps([{"canonical_name": "x", "category": "weird", "pins": []}]))
        with pytest.raises(SchemaError):
            load_kb(bad)

    def test_pin_count_bounds(self):
        with pytest.raises(SchemaError):
            ComponentRecord("one pin", "sensor", pins=(PinSpec("only"),))

    def test_pin_alias_clash_within_record_rejected(self):
        with pytest.raises(SchemaError):
            ComponentRecord(
                "clash", "sensor",
                pins=(PinSpec("a", aliases=("x",)), PinSpec("b", aliases=("X",))),
            )


class TestLookup:
    def test_hobby_servo_via_alias(self, kb):
        assert lookup(kb, "Hobby Servo").canonical_name == "hobby servo"
        assert lookup(kb, "servo").canonical_name == "hobby servo"

    def test_hcsr04_spellings_hit_same_record(self, kb):
        assert lookup(kb, "HC-SR04") is lookup(kb, "hcsr04")

    def test_unknown_is_none(self, kb):
        assert lookup(kb, "flux capacitor") is None

    def test_lookup_idempotent_under_normalization(self, kb):
        for record in kb.records.values():
            for name in (record.canonical_name, *record.name_aliases):
                assert lookup(kb, normalize_name(name)) is lookup(kb, name)


class TestNormalizePin:
    def test_led_single_letter_alias(self, kb):
        led = kb.records["led"]
        assert normalize_pin(led, "A") == "anode"
        assert normalize_pin(led, "anode") == "anode"

    def test_servo_vcc_maps_to_power(self, kb):
        servo = kb.records["hobby servo"]
        assert normalize_pin(servo, "VCC") == "power"

    def test_unknown_pin_is_none(self, kb):
        assert normalize_pin(kb.records["led"], "gate") is None

    def test_exhaustive_over_fixture(self, kb):
        for record in kb.records.values():
            for pin in record.pins:
                assert normalize_pin(record, pin.canonical) == pin.canonical
                for alias in pin.aliases:
                    assert normalize_pin(record, alias) == pin.canonical


class TestFixtureInvariants:
    def test_critical_subset_nonempty_for_non_passives(self, kb):
        for record in kb.records.values():
            if record.category != "passive":
                assert record.critical_pins(), record.canonical_name

    def test_uno_digital_aliases(self, kb):
        uno = kb.records["arduino uno"]
        assert normalize_pin(uno, "13") == "d13"
        assert normalize_pin(uno, "SDA") == "a4"
        assert 2 <= len(uno.pins) <= 40
