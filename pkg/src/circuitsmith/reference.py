"""Reference devices and a compact builder for wiring them up.

The button-LED device is the canonical clean fixture: a pushbutton with a
pull-up resistor on a digital input, and an LED behind a series resistor on
a digital output.  The alternating blinker is the worked example embedded in
the bundled generation prompt.  Both pass every electrical rule.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .devicespec import (
    BomItem,
    CodeArtifact,
    Connection,
    DeviceSpec,
    PinoutMap,
    PinRef,
)


def device(
    description: str,
    parts: Sequence[tuple],
    pinouts: dict[str, Iterable],
    wires: Sequence[tuple],
    code: str | None = None,
    language_tag: str = "arduino-cpp",
) -> DeviceSpec:
    """Build a DeviceSpec from compact tables.

    parts rows are (ref, part_type[, value[, note]]); wires rows are
    (from, to[, note]) with PART.PIN endpoint strings.
    """
    bom = []
    for row in parts:
        ref, part_type, *rest = row
        value = rest[0] if len(rest) > 0 else None
        note = rest[1] if len(rest) > 1 else None
        bom.append(BomItem(ref=ref, part_type=part_type, value=value, note=note))
    connections = []
    for row in wires:
        a, b, *rest = row
        connections.append(
            Connection(PinRef.from_string(a), PinRef.from_string(b), note=rest[0] if rest else None)
        )
    return DeviceSpec(
        description=description,
        bom=tuple(bom),
        pinouts=PinoutMap.from_dict(pinouts),
        connections=tuple(connections),
        code=CodeArtifact(source=code, language_tag=language_tag) if code else None,
    )


BUTTON_LED_DESCRIPTION = "Illuminate an LED while a pushbutton is held down."

_BUTTON_LED_CODE = """\
void setup() {
  pinMode(2, INPUT);
  pinMode(13, OUTPUT);
}

void loop() {
  if (digitalRead(2) == LOW) {
    digitalWrite(13, HIGH);  // button pressed pulls the input low
  } else {
    digitalWrite(13, LOW);
  }
}
"""


def button_led_device() -> DeviceSpec:
    """Pushbutton with pull-up drives an LED behind a series resistor."""
    return device(
        description=BUTTON_LED_DESCRIPTION,
        parts=[
            ("UNO", "arduino uno", None, "main controller"),
            ("BTN1", "pushbutton", None, "user input"),
            ("R1", "resistor", "220 ohms", "series resistor for LED"),
            ("R2", "resistor", "10k ohms", "pull-up for button"),
            ("LED1", "led", "red", "indicator"),
        ],
        pinouts={
            "UNO": ["5V", "GND", "D2", "D13"],
            "BTN1": ["1", "2"],
            "R1": ["1", "2"],
            "R2": ["1", "2"],
            "LED1": ["anode", "cathode"],
        },
        wires=[
            ("UNO.5V", "R2.1", "pull-up to supply"),
            ("R2.2", "BTN1.1"),
            ("UNO.D2", "BTN1.1", "input senses the button"),
            ("BTN1.2", "UNO.GND"),
            ("UNO.D13", "R1.1"),
            ("R1.2", "LED1.anode"),
            ("LED1.cathode", "UNO.GND"),
        ],
        code=_BUTTON_LED_CODE,
    )


ALTERNATING_BLINKER_DESCRIPTION = "Blink two LEDs in an alternating pattern."

_BLINKER_CODE = """\
void setup() {
  pinMode(12, OUTPUT);
  pinMode(13, OUTPUT);
}

void loop() {
  digitalWrite(12, HIGH);
  digitalWrite(13, LOW);
  delay(500);
  digitalWrite(12, LOW);
  digitalWrite(13, HIGH);
  delay(500);
}
"""


def alternating_blinker_device() -> DeviceSpec:
    """Two LEDs on separate outputs, lit alternately every half second."""
    return device(
        description=ALTERNATING_BLINKER_DESCRIPTION,
        parts=[
            ("UNO", "arduino uno", None, "main controller"),
            ("LED1", "led", "red", "first indicator"),
            ("LED2", "led", "green", "second indicator"),
            ("R1", "resistor", "220 ohms", "series resistor for LED1"),
            ("R2", "resistor", "220 ohms", "series resistor for LED2"),
        ],
        pinouts={
            "UNO": ["GND", "D12", "D13"],
            "LED1": ["anode", "cathode"],
            "LED2": ["anode", "cathode"],
            "R1": ["1", "2"],
            "R2": ["1", "2"],
        },
        wires=[
            ("UNO.D12", "R1.1"),
            ("R1.2", "LED1.anode"),
            ("LED1.cathode", "UNO.GND"),
            ("UNO.D13", "R2.1"),
            ("R2.2", "LED2.anode"),
            ("LED2.cathode", "UNO.GND"),
        ],
        code=_BLINKER_CODE,
    )
