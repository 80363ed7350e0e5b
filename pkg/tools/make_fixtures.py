#!/usr/bin/env python3
"""Regenerate the bundled fixture data under src/circuitsmith/data/.

Produces: the prompt template, the 25-task benchmark corpus, all replay
transcripts (recorded by running the real pipeline against scripted
responders), and the golden button-LED device file.  Run from the repo root
after changing prompt assembly, the template text, or any fixture device:

    python3 tools/make_fixtures.py

Outputs are checked in; transcripts are keyed by prompt digest, so stale
fixtures fail loudly with ReplayMiss rather than silently drifting.
"""
from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from circuitsmith.bench import BenchReport, load_tasks, run_benchmark  # noqa: E402
from circuitsmith.devicespec import canonical_serialize, render_document, spec_to_document  # noqa: E402
from circuitsmith.erc import run_erc  # noqa: E402
from circuitsmith.llmgateway import Provider, count_prompt_tokens  # noqa: E402
from circuitsmith.partsdb import bundled_kb  # noqa: E402
from circuitsmith.pipeline import (  # noqa: E402
    PromptTemplate,
    assemble_generation_prompt,
    generate_device,
    generate_in_session,
    new_session,
    refine,
)
from circuitsmith.reference import (  # noqa: E402
    ALTERNATING_BLINKER_DESCRIPTION,
    BUTTON_LED_DESCRIPTION,
    alternating_blinker_device,
    button_led_device,
    device,
)

DATA = REPO / "src" / "circuitsmith" / "data"
STOP = "ALL-CHECKS-PASSED"


# --- prompt template -------------------------------------------------------------

def build_template_data() -> dict:
    preamble = (
        "You are an electronics design assistant. Design a complete, buildable "
        "microcontroller device from the task description. Unless the task says "
        "otherwise, target the Arduino Uno and power components from the board's "
        "5V and GND pins. Prefer common, easily sourced parts."
    )
    format_instructions = (
        "Respond with one JSON object containing exactly these keys, in order:\n"
        "- description: the task text you are solving\n"
        "- bill_of_materials: array of {ref, part_type, value?, note?}; refs are "
        "short unique identifiers such as R1 or LED1 and must not contain '.'\n"
        "- pinouts: object mapping each ref to an array of {pin, note?}\n"
        "- schematic: array of {from, to, note?}; each entry joins exactly two "
        "pins written as PART.PIN; enumerate every single wire\n"
        "- code: {language_tag, source} with the full Arduino sketch, or null "
        "for devices with no microcontroller\n"
        "- provenance: null\n"
        "Annotate parts and connections with note fields where the purpose is "
        "not obvious."
    )
    one_shot = (
        f"Task: {ALTERNATING_BLINKER_DESCRIPTION}\n\nResponse:\n\n"
        + render_document(alternating_blinker_device()).rstrip()
    )
    snippets = [
        {
            "kind": "positive",
            "text": (
                "Connecting a hobby servo, a three-pin part: power and ground go "
                "to the supply, the signal pin to a digital output.\n\n"
                '"schematic": [\n'
                '  {"from": "SERVO1.power", "to": "UNO.5V"},\n'
                '  {"from": "SERVO1.ground", "to": "UNO.GND"},\n'
                '  {"from": "SERVO1.signal", "to": "UNO.D9"}\n'
                "]"
            ),
        },
        {
            "kind": "positive",
            "text": (
                "Connecting a pushbutton with a pull-up resistor: three pins end "
                "up on one net, the microcontroller input, one resistor terminal "
                "and one button terminal.\n\n"
                '"schematic": [\n'
                '  {"from": "R1.1", "to": "UNO.5V"},\n'
                '  {"from": "R1.2", "to": "BTN1.1"},\n'
                '  {"from": "UNO.D2", "to": "BTN1.1"},\n'
                '  {"from": "BTN1.2", "to": "UNO.GND"}\n'
                "]"
            ),
        },
        {
            "kind": "negative",
            "text": (
                "Never compress the schematic by connecting ranges of pins in a "
                "single line. This is wrong:\n\n"
                '"schematic": [\n'
                '  {"from": "UNO.D2-D5", "to": "LED1..LED4"}\n'
                "]\n\n"
                "List each connection individually instead."
            ),
        },
    ]
    checklist = [
        "Every connection endpoint names a part declared in the bill of materials.",
        "Every connection endpoint names a pin listed in that part's pinout.",
        "Component refs in the bill of materials are unique.",
        "The schematic enumerates every connection individually; no pin ranges.",
        "Every non-passive component has its power and ground pins wired to a supply source.",
        "No net ties a supply output directly to ground.",
        "Every drive path into an LED anode passes through a series resistor.",
        "Inputs that need a pull-up resistor have one on their signal net.",
        "No critical signal pin is left floating.",
        "The code configures every pin it uses and matches the schematic's pin assignments.",
        "The code implements the requested behavior, including timing and edge cases.",
        "The code targets the declared microcontroller: required libraries are included and APIs match.",
    ]
    return {
        "preamble": preamble,
        "format_instructions": format_instructions,
        "one_shot_example": one_shot,
        "snippets": snippets,
        "reflection_checklist": checklist,
        "stop_token": STOP,
    }


# --- fixture devices -------------------------------------------------------------

def flawed_button_led_device():
    """Button-LED device missing the series resistor: one E-LED-RESISTOR error."""
    return device(
        description=BUTTON_LED_DESCRIPTION,
        parts=[
            ("UNO", "arduino uno", None, "main controller"),
            ("BTN1", "pushbutton", None, "user input"),
            ("R2", "resistor", "10k ohms", "pull-up for button"),
            ("LED1", "led", "red", "indicator"),
        ],
        pinouts={
            "UNO": ["5V", "GND", "D2", "D13"],
            "BTN1": ["1", "2"],
            "R2": ["1", "2"],
            "LED1": ["anode", "cathode"],
        },
        wires=[
            ("UNO.5V", "R2.1", "pull-up to supply"),
            ("R2.2", "BTN1.1"),
            ("UNO.D2", "BTN1.1", "input senses the button"),
            ("BTN1.2", "UNO.GND"),
            ("UNO.D13", "LED1.anode"),
            ("LED1.cathode", "UNO.GND"),
        ],
        code=button_led_device().code.source,
    )


def refined_two_led_device():
    """Golden device plus a second LED on D7 (first refine turn)."""
    base = button_led_device()
    code = base.code.source.replace(
        "  pinMode(13, OUTPUT);\n",
        "  pinMode(13, OUTPUT);\n  pinMode(7, OUTPUT);\n",
    ).replace(
        "    digitalWrite(13, HIGH);  // button pressed pulls the input low\n",
        "    digitalWrite(13, HIGH);  // button pressed pulls the input low\n"
        "    digitalWrite(7, LOW);\n",
    ).replace(
        "    digitalWrite(13, LOW);\n  }",
        "    digitalWrite(13, LOW);\n    digitalWrite(7, HIGH);\n  }",
    )
    return device(
        description=BUTTON_LED_DESCRIPTION,
        parts=[
            ("UNO", "arduino uno", None, "main controller"),
            ("BTN1", "pushbutton", None, "user input"),
            ("R1", "resistor", "220 ohms", "series resistor for LED"),
            ("R2", "resistor", "10k ohms", "pull-up for button"),
            ("LED1", "led", "red", "indicator"),
            ("LED2", "led", "green", "inverse indicator"),
            ("R3", "resistor", "220 ohms", "series resistor for LED2"),
        ],
        pinouts={
            "UNO": ["5V", "GND", "D2", "D7", "D13"],
            "BTN1": ["1", "2"],
            "R1": ["1", "2"],
            "R2": ["1", "2"],
            "LED1": ["anode", "cathode"],
            "LED2": ["anode", "cathode"],
            "R3": ["1", "2"],
        },
        wires=[
            ("UNO.5V", "R2.1", "pull-up to supply"),
            ("R2.2", "BTN1.1"),
            ("UNO.D2", "BTN1.1", "input senses the button"),
            ("BTN1.2", "UNO.GND"),
            ("UNO.D13", "R1.1"),
            ("R1.2", "LED1.anode"),
            ("LED1.cathode", "UNO.GND"),
            ("UNO.D7", "R3.1"),
            ("R3.2", "LED2.anode"),
            ("LED2.cathode", "UNO.GND"),
        ],
        code=code,
    )


def refined_two_led_d8_device():
    """Second refine turn: the second LED moves from D7 to D8."""
    base = refined_two_led_device()
    doc = spec_to_document(base)
    doc["pinouts"]["UNO"] = [
        {"pin": p} for p in ["5V", "GND", "D2", "D8", "D13"]
    ]
    doc["schematic"] = [
        row if row["from"] != "UNO.D7" else {"from": "UNO.D8", "to": "R3.1"}
        for row in doc["schematic"]
    ]
    doc["code"]["source"] = doc["code"]["source"].replace("(7,", "(8,")
    from circuitsmith.devicespec import document_to_spec

    return document_to_spec(doc)


MICRO25 = [
    {
        "id": "in-button",
        "category": "input",
        "description": (
            "Turn on an I/O pin while a single pushbutton is pressed. Use a "
            "pull-up resistor so the input reads high until the button pulls it "
            "low, and light an indicator LED on the output pin."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "pushbutton"),
            ("requires_net", "UNO.D2", "BTN1.1"),
            ("code_contains", "digitalRead"),
        ],
        "device": lambda: button_led_device(),
    },
    {
        "id": "in-two-of-four",
        "category": "input",
        "description": (
            "Turn on an I/O pin only while exactly 2 of 4 pushbuttons are "
            "pressed. Each button needs its own pull-up resistor; drive an "
            "indicator LED from the output pin."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "pushbutton"),
            ("code_contains", "digitalRead"),
        ],
        "device": lambda: device(
            "two of four buttons",
            parts=[
                ("UNO", "arduino uno"),
                ("BTN1", "pushbutton"), ("BTN2", "pushbutton"),
                ("BTN3", "pushbutton"), ("BTN4", "pushbutton"),
                ("R1", "resistor", "10k ohms"), ("R2", "resistor", "10k ohms"),
                ("R3", "resistor", "10k ohms"), ("R4", "resistor", "10k ohms"),
                ("R5", "resistor", "220 ohms"), ("LED1", "led"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "D2", "D3", "D4", "D5", "D8"],
                "BTN1": ["1", "2"], "BTN2": ["1", "2"],
                "BTN3": ["1", "2"], "BTN4": ["1", "2"],
                "R1": ["1", "2"], "R2": ["1", "2"], "R3": ["1", "2"],
                "R4": ["1", "2"], "R5": ["1", "2"],
                "LED1": ["anode", "cathode"],
            },
            wires=[
                ("R1.1", "UNO.5V"), ("R1.2", "BTN1.1"), ("UNO.D2", "BTN1.1"), ("BTN1.2", "UNO.GND"),
                ("R2.1", "UNO.5V"), ("R2.2", "BTN2.1"), ("UNO.D3", "BTN2.1"), ("BTN2.2", "UNO.GND"),
                ("R3.1", "UNO.5V"), ("R3.2", "BTN3.1"), ("UNO.D4", "BTN3.1"), ("BTN3.2", "UNO.GND"),
                ("R4.1", "UNO.5V"), ("R4.2", "BTN4.1"), ("UNO.D5", "BTN4.1"), ("BTN4.2", "UNO.GND"),
                ("UNO.D8", "R5.1"), ("R5.2", "LED1.anode"), ("LED1.cathode", "UNO.GND"),
            ],
            code=(
                "void setup() {\n"
                "  pinMode(2, INPUT);\n  pinMode(3, INPUT);\n"
                "  pinMode(4, INPUT);\n  pinMode(5, INPUT);\n"
                "  pinMode(8, OUTPUT);\n"
                "}\n\n"
                "void loop() {\n"
                "  int pressed = 0;\n"
                "  if (digitalRead(2) == LOW) pressed++;\n"
                "  if (digitalRead(3) == LOW) pressed++;\n"
                "  if (digitalRead(4) == LOW) pressed++;\n"
                "  if (digitalRead(5) == LOW) pressed++;\n"
                "  digitalWrite(8, pressed == 2 ? HIGH : LOW);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "in-analog-threshold",
        "category": "input",
        "description": (
            "Read a potentiometer on an analog input and switch an I/O pin on "
            "whenever the measured voltage exceeds 2.5 volts; show the state on "
            "an LED."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "potentiometer"),
            ("requires_net", "UNO.A0", "POT1.2"),
            ("code_contains", "analogRead"),
        ],
        "device": lambda: device(
            "analog threshold",
            parts=[
                ("UNO", "arduino uno"), ("POT1", "potentiometer", "10k ohms"),
                ("R1", "resistor", "220 ohms"), ("LED1", "led"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "A0", "D13"],
                "POT1": ["1", "2", "3"],
                "R1": ["1", "2"],
                "LED1": ["anode", "cathode"],
            },
            wires=[
                ("POT1.1", "UNO.5V"), ("POT1.2", "UNO.A0"), ("POT1.3", "UNO.GND"),
                ("UNO.D13", "R1.1"), ("R1.2", "LED1.anode"), ("LED1.cathode", "UNO.GND"),
            ],
            code=(
                "void setup() {\n  pinMode(13, OUTPUT);\n}\n\n"
                "void loop() {\n"
                "  int reading = analogRead(A0);\n"
                "  digitalWrite(13, reading > 512 ? HIGH : LOW);  // 2.5 V of 5 V\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "proto-serial-uart",
        "category": "protocols",
        "description": (
            "Watch the USB serial port at 9600 baud; whenever the text 'hello' "
            "arrives, respond with 'world'."
        ),
        "checks": [
            ("erc_clean",),
            ("code_contains", "Serial.begin"),
            ("code_contains", "world"),
        ],
        "device": lambda: device(
            "serial responder",
            parts=[("UNO", "arduino uno")],
            pinouts={"UNO": []},
            wires=[],
            code=(
                "void setup() {\n  Serial.begin(9600);\n}\n\n"
                "void loop() {\n"
                "  if (Serial.available()) {\n"
                "    String input = Serial.readStringUntil('\\n');\n"
                "    if (input == \"hello\") {\n      Serial.println(\"world\");\n    }\n"
                "  }\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "proto-spi",
        "category": "protocols",
        "description": (
            "Connect to an SPI peripheral; when the text 'hello' is received "
            "over SPI, respond with 'world'."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_net", "UNO.D11", "SPI1.mosi"),
            ("code_contains", "SPI.begin"),
        ],
        "device": lambda: device(
            "spi responder",
            parts=[("UNO", "arduino uno"), ("SPI1", "spi peripheral breakout")],
            pinouts={
                "UNO": ["5V", "GND", "D10", "D11", "D12", "D13"],
                "SPI1": ["vcc", "gnd", "cs", "mosi", "miso", "sck"],
            },
            wires=[
                ("SPI1.vcc", "UNO.5V"), ("SPI1.gnd", "UNO.GND"),
                ("SPI1.cs", "UNO.D10"), ("SPI1.mosi", "UNO.D11"),
                ("SPI1.miso", "UNO.D12"), ("SPI1.sck", "UNO.D13"),
            ],
            code=(
                "#include <SPI.h>\n\n"
                "void setup() {\n  SPI.begin();\n  pinMode(10, OUTPUT);\n}\n\n"
                "void loop() {\n"
                "  digitalWrite(10, LOW);\n"
                "  char reply[6] = \"world\";\n"
                "  char buffer[6];\n"
                "  for (int i = 0; i < 5; i++) buffer[i] = SPI.transfer(reply[i]);\n"
                "  digitalWrite(10, HIGH);\n"
                "  delay(100);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "proto-i2c",
        "category": "protocols",
        "description": (
            "Every second, read one byte from register 0x00 of the I2C device "
            "at address 0x42 and print it to the serial port."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_net", "UNO.A4", "I2C1.sda"),
            ("code_contains", "Wire.begin"),
        ],
        "device": lambda: device(
            "i2c register reader",
            parts=[("UNO", "arduino uno"), ("I2C1", "i2c device breakout")],
            pinouts={
                "UNO": ["5V", "GND", "A4", "A5"],
                "I2C1": ["vcc", "gnd", "sda", "scl"],
            },
            wires=[
                ("I2C1.vcc", "UNO.5V"), ("I2C1.gnd", "UNO.GND"),
                ("I2C1.sda", "UNO.A4"), ("I2C1.scl", "UNO.A5"),
            ],
            code=(
                "#include <Wire.h>\n\n"
                "void setup() {\n  Wire.begin();\n  Serial.begin(9600);\n}\n\n"
                "void loop() {\n"
                "  Wire.beginTransmission(0x42);\n  Wire.write(0x00);\n"
                "  Wire.endTransmission(false);\n"
                "  Wire.requestFrom(0x42, 1);\n"
                "  if (Wire.available()) {\n    Serial.println(Wire.read());\n  }\n"
                "  delay(1000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "proto-sd-card",
        "category": "protocols",
        "description": (
            "Open a file on an SD card and append one of 4 fixed strings, "
            "chosen at random, every 10 seconds."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "sd card module"),
            ("code_contains", "SD.begin"),
        ],
        "device": lambda: device(
            "sd logger",
            parts=[("UNO", "arduino uno"), ("SD1", "sd card module")],
            pinouts={
                "UNO": ["5V", "GND", "D10", "D11", "D12", "D13"],
                "SD1": ["vcc", "gnd", "cs", "mosi", "miso", "sck"],
            },
            wires=[
                ("SD1.vcc", "UNO.5V"), ("SD1.gnd", "UNO.GND"),
                ("SD1.cs", "UNO.D10"), ("SD1.mosi", "UNO.D11"),
                ("SD1.miso", "UNO.D12"), ("SD1.sck", "UNO.D13"),
            ],
            code=(
                "#include <SPI.h>\n#include <SD.h>\n\n"
                "const char* lines[4] = {\"alpha\", \"beta\", \"gamma\", \"delta\"};\n\n"
                "void setup() {\n  SD.begin(10);\n  randomSeed(analogRead(A0));\n}\n\n"
                "void loop() {\n"
                "  File log = SD.open(\"log.txt\", FILE_WRITE);\n"
                "  if (log) {\n    log.println(lines[random(4)]);\n    log.close();\n  }\n"
                "  delay(10000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-dc-motor",
        "category": "output",
        "description": (
            "Rotate a DC motor clockwise for 5 seconds, then counterclockwise "
            "for 5 seconds, repeatedly, using an H-bridge motor driver."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "dc motor"),
            ("code_contains", "digitalWrite"),
        ],
        "device": lambda: device(
            "dc motor direction cycler",
            parts=[
                ("UNO", "arduino uno"),
                ("DRV1", "l293d motor driver"),
                ("M1", "dc motor"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "D3", "D4", "D9"],
                "DRV1": ["vcc", "gnd", "en1", "in1", "in2", "out1", "out2"],
                "M1": ["1", "2"],
            },
            wires=[
                ("DRV1.vcc", "UNO.5V"), ("DRV1.gnd", "UNO.GND"),
                ("DRV1.en1", "UNO.D9"), ("DRV1.in1", "UNO.D3"), ("DRV1.in2", "UNO.D4"),
                ("DRV1.out1", "M1.1"), ("DRV1.out2", "M1.2"),
            ],
            code=(
                "void setup() {\n"
                "  pinMode(3, OUTPUT);\n  pinMode(4, OUTPUT);\n  pinMode(9, OUTPUT);\n"
                "  analogWrite(9, 255);\n"
                "}\n\n"
                "void loop() {\n"
                "  digitalWrite(3, HIGH);\n  digitalWrite(4, LOW);\n  delay(5000);\n"
                "  digitalWrite(3, LOW);\n  digitalWrite(4, HIGH);\n  delay(5000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-stepper",
        "category": "output",
        "description": (
            "Swing a stepper motor 45 degrees one way, then back the other way, "
            "every 5 seconds, through a driver board."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "stepper motor"),
            ("code_contains", "Stepper"),
        ],
        "device": lambda: device(
            "stepper oscillator",
            parts=[
                ("UNO", "arduino uno"),
                ("DRV1", "stepper driver board"),
                ("STEP1", "stepper motor"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "D8", "D9", "D10", "D11"],
                "DRV1": ["vcc", "gnd", "in1", "in2", "in3", "in4", "out1", "out2", "out3", "out4"],
                "STEP1": ["a1", "a2", "b1", "b2"],
            },
            wires=[
                ("DRV1.vcc", "UNO.5V"), ("DRV1.gnd", "UNO.GND"),
                ("DRV1.in1", "UNO.D8"), ("DRV1.in2", "UNO.D9"),
                ("DRV1.in3", "UNO.D10"), ("DRV1.in4", "UNO.D11"),
                ("DRV1.out1", "STEP1.a1"), ("DRV1.out2", "STEP1.a2"),
                ("DRV1.out3", "STEP1.b1"), ("DRV1.out4", "STEP1.b2"),
            ],
            code=(
                "#include <Stepper.h>\n\n"
                "Stepper motor(200, 8, 9, 10, 11);\n\n"
                "void setup() {\n  motor.setSpeed(30);\n}\n\n"
                "void loop() {\n"
                "  motor.step(25);   // 45 degrees of a 200-step motor\n  delay(5000);\n"
                "  motor.step(-25);\n  delay(5000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-servo",
        "category": "output",
        "description": (
            "Sweep a hobby servo back and forth between 45 and 135 degrees "
            "continuously."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "hobby servo"),
            ("requires_net", "UNO.D9", "SERVO1.signal"),
            ("code_contains", "Servo"),
        ],
        "device": lambda: device(
            "servo sweeper",
            parts=[("UNO", "arduino uno"), ("SERVO1", "hobby servo")],
            pinouts={
                "UNO": ["5V", "GND", "D9"],
                "SERVO1": ["power", "ground", "signal"],
            },
            wires=[
                ("SERVO1.power", "UNO.5V"), ("SERVO1.ground", "UNO.GND"),
                ("SERVO1.signal", "UNO.D9"),
            ],
            code=(
                "#include <Servo.h>\n\nServo servo;\n\n"
                "void setup() {\n  servo.attach(9);\n}\n\n"
                "void loop() {\n"
                "  for (int angle = 45; angle <= 135; angle++) {\n"
                "    servo.write(angle);\n    delay(15);\n  }\n"
                "  for (int angle = 135; angle >= 45; angle--) {\n"
                "    servo.write(angle);\n    delay(15);\n  }\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-led-blink",
        "category": "output",
        "description": "Blink a single LED on and off every 500 milliseconds.",
        "checks": [
            ("erc_clean",),
            ("requires_part", "led"),
            ("requires_net", "R1.2", "LED1.anode"),
            ("code_contains", "digitalWrite"),
        ],
        "device": lambda: device(
            "led blinker",
            parts=[
                ("UNO", "arduino uno"), ("LED1", "led", "red"),
                ("R1", "resistor", "220 ohms"),
            ],
            pinouts={
                "UNO": ["GND", "D13"],
                "LED1": ["anode", "cathode"],
                "R1": ["1", "2"],
            },
            wires=[
                ("UNO.D13", "R1.1"), ("R1.2", "LED1.anode"), ("LED1.cathode", "UNO.GND"),
            ],
            code=(
                "void setup() {\n  pinMode(13, OUTPUT);\n}\n\n"
                "void loop() {\n"
                "  digitalWrite(13, HIGH);\n  delay(500);\n"
                "  digitalWrite(13, LOW);\n  delay(500);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-led-sequence",
        "category": "output",
        "description": (
            "Light 4 LEDs one after another in sequence, moving to the next LED "
            "every 500 milliseconds."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "led"),
            ("requires_net", "UNO.D2", "R1.1"),
            ("code_contains", "digitalWrite"),
        ],
        "device": lambda: device(
            "led chaser",
            parts=[
                ("UNO", "arduino uno"),
                ("LED1", "led"), ("LED2", "led"), ("LED3", "led"), ("LED4", "led"),
                ("R1", "resistor", "220 ohms"), ("R2", "resistor", "220 ohms"),
                ("R3", "resistor", "220 ohms"), ("R4", "resistor", "220 ohms"),
            ],
            pinouts={
                "UNO": ["GND", "D2", "D3", "D4", "D5"],
                "LED1": ["anode", "cathode"], "LED2": ["anode", "cathode"],
                "LED3": ["anode", "cathode"], "LED4": ["anode", "cathode"],
                "R1": ["1", "2"], "R2": ["1", "2"], "R3": ["1", "2"], "R4": ["1", "2"],
            },
            wires=[
                ("UNO.D2", "R1.1"), ("R1.2", "LED1.anode"), ("LED1.cathode", "UNO.GND"),
                ("UNO.D3", "R2.1"), ("R2.2", "LED2.anode"), ("LED2.cathode", "UNO.GND"),
                ("UNO.D4", "R3.1"), ("R3.2", "LED3.anode"), ("LED3.cathode", "UNO.GND"),
                ("UNO.D5", "R4.1"), ("R4.2", "LED4.anode"), ("LED4.cathode", "UNO.GND"),
            ],
            code=(
                "void setup() {\n"
                "  pinMode(2, OUTPUT);\n  pinMode(3, OUTPUT);\n"
                "  pinMode(4, OUTPUT);\n  pinMode(5, OUTPUT);\n"
                "}\n\n"
                "void loop() {\n"
                "  digitalWrite(5, LOW);\n  digitalWrite(2, HIGH);\n  delay(500);\n"
                "  digitalWrite(2, LOW);\n  digitalWrite(3, HIGH);\n  delay(500);\n"
                "  digitalWrite(3, LOW);\n  digitalWrite(4, HIGH);\n  delay(500);\n"
                "  digitalWrite(4, LOW);\n  digitalWrite(5, HIGH);\n  delay(500);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-7seg",
        "category": "output",
        "description": (
            "Count from 0 to 9 on a single-digit 7-segment display, advancing "
            "every 500 milliseconds, with a series resistor on every segment."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "7-segment display"),
            ("code_contains", "digitalWrite"),
        ],
        "device": lambda: device(
            "7-segment counter",
            parts=[
                ("UNO", "arduino uno"), ("SEG1", "7-segment display"),
                ("R1", "resistor", "220 ohms"), ("R2", "resistor", "220 ohms"),
                ("R3", "resistor", "220 ohms"), ("R4", "resistor", "220 ohms"),
                ("R5", "resistor", "220 ohms"), ("R6", "resistor", "220 ohms"),
                ("R7", "resistor", "220 ohms"),
            ],
            pinouts={
                "UNO": ["GND", "D2", "D3", "D4", "D5", "D6", "D7", "D8"],
                "SEG1": ["a", "b", "c", "d", "e", "f", "g", "com"],
                "R1": ["1", "2"], "R2": ["1", "2"], "R3": ["1", "2"], "R4": ["1", "2"],
                "R5": ["1", "2"], "R6": ["1", "2"], "R7": ["1", "2"],
            },
            wires=[
                ("UNO.D2", "R1.1"), ("R1.2", "SEG1.a"),
                ("UNO.D3", "R2.1"), ("R2.2", "SEG1.b"),
                ("UNO.D4", "R3.1"), ("R3.2", "SEG1.c"),
                ("UNO.D5", "R4.1"), ("R4.2", "SEG1.d"),
                ("UNO.D6", "R5.1"), ("R5.2", "SEG1.e"),
                ("UNO.D7", "R6.1"), ("R6.2", "SEG1.f"),
                ("UNO.D8", "R7.1"), ("R7.2", "SEG1.g"),
                ("SEG1.com", "UNO.GND"),
            ],
            code=(
                "const byte digits[10] = {\n"
                "  0b0111111, 0b0000110, 0b1011011, 0b1001111, 0b1100110,\n"
                "  0b1101101, 0b1111101, 0b0000111, 0b1111111, 0b1101111\n"
                "};\n\n"
                "void setup() {\n"
                "  pinMode(2, OUTPUT);\n  pinMode(3, OUTPUT);\n  pinMode(4, OUTPUT);\n"
                "  pinMode(5, OUTPUT);\n  pinMode(6, OUTPUT);\n  pinMode(7, OUTPUT);\n"
                "  pinMode(8, OUTPUT);\n"
                "}\n\n"
                "void loop() {\n"
                "  for (int n = 0; n < 10; n++) {\n"
                "    for (int s = 0; s < 7; s++) {\n"
                "      digitalWrite(2 + s, (digits[n] >> s) & 1 ? HIGH : LOW);\n"
                "    }\n"
                "    delay(500);\n"
                "  }\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-neopixel",
        "category": "output",
        "description": (
            "Cycle an 8-pixel addressable RGB LED strip smoothly through a "
            "rainbow of colours."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "neopixel"),
            ("code_contains", "show"),
        ],
        "device": lambda: device(
            "rainbow strip",
            parts=[("UNO", "arduino uno"), ("NEO1", "neopixel strip", "8 pixels")],
            pinouts={
                "UNO": ["5V", "GND", "D6"],
                "NEO1": ["vcc", "gnd", "din"],
            },
            wires=[
                ("NEO1.vcc", "UNO.5V"), ("NEO1.gnd", "UNO.GND"), ("NEO1.din", "UNO.D6"),
            ],
            code=(
                "#include <Adafruit_NeoPixel.h>\n\n"
                "Adafruit_NeoPixel strip(8, 6, NEO_GRB + NEO_KHZ800);\n\n"
                "void setup() {\n  strip.begin();\n}\n\n"
                "void loop() {\n"
                "  static uint16_t hue = 0;\n"
                "  for (int i = 0; i < 8; i++) {\n"
                "    strip.setPixelColor(i, strip.ColorHSV(hue + i * 8192));\n  }\n"
                "  strip.show();\n  hue += 256;\n  delay(20);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-relay",
        "category": "output",
        "description": "Turn a relay on for 2 seconds, then off for 5 seconds, repeatedly.",
        "checks": [
            ("erc_clean",),
            ("requires_part", "relay"),
            ("requires_net", "UNO.D7", "RLY1.in"),
            ("code_contains", "digitalWrite"),
        ],
        "device": lambda: device(
            "relay cycler",
            parts=[("UNO", "arduino uno"), ("RLY1", "relay module")],
            pinouts={
                "UNO": ["5V", "GND", "D7"],
                "RLY1": ["vcc", "gnd", "in"],
            },
            wires=[
                ("RLY1.vcc", "UNO.5V"), ("RLY1.gnd", "UNO.GND"), ("RLY1.in", "UNO.D7"),
            ],
            code=(
                "void setup() {\n  pinMode(7, OUTPUT);\n}\n\n"
                "void loop() {\n"
                "  digitalWrite(7, HIGH);\n  delay(2000);\n"
                "  digitalWrite(7, LOW);\n  delay(5000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-lcd",
        "category": "output",
        "description": (
            "Print 'Hello World' on a 16x2 character LCD with an "
            "HD44780-compatible controller, wired in 4-bit mode with a "
            "potentiometer for contrast."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "16x2 lcd"),
            ("code_contains", "lcd.print"),
        ],
        "device": lambda: device(
            "hello world lcd",
            parts=[
                ("UNO", "arduino uno"), ("LCD1", "16x2 lcd"),
                ("POT1", "potentiometer", "10k ohms", "contrast"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "D2", "D3", "D4", "D5", "D11", "D12"],
                "LCD1": ["vss", "vdd", "v0", "rs", "rw", "e", "d4", "d5", "d6", "d7", "a", "k"],
                "POT1": ["1", "2", "3"],
            },
            wires=[
                ("LCD1.vss", "UNO.GND"), ("LCD1.vdd", "UNO.5V"),
                ("LCD1.v0", "POT1.2"), ("POT1.1", "UNO.5V"), ("POT1.3", "UNO.GND"),
                ("LCD1.rs", "UNO.D12"), ("LCD1.rw", "UNO.GND"), ("LCD1.e", "UNO.D11"),
                ("LCD1.d4", "UNO.D5"), ("LCD1.d5", "UNO.D4"),
                ("LCD1.d6", "UNO.D3"), ("LCD1.d7", "UNO.D2"),
                ("LCD1.a", "UNO.5V"), ("LCD1.k", "UNO.GND"),
            ],
            code=(
                "#include <LiquidCrystal.h>\n\n"
                "LiquidCrystal lcd(12, 11, 5, 4, 3, 2);\n\n"
                "void setup() {\n"
                "  lcd.begin(16, 2);\n  lcd.print(\"Hello World\");\n"
                "}\n\n"
                "void loop() {}\n"
            ),
        ),
    },
    {
        "id": "out-buzzer",
        "category": "output",
        "description": (
            "Cycle a piezo buzzer between a high, a medium, and a low tone, "
            "holding each for one second."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "piezo buzzer"),
            ("code_contains", "tone"),
        ],
        "device": lambda: device(
            "three tone buzzer",
            parts=[("UNO", "arduino uno"), ("BZ1", "piezo buzzer")],
            pinouts={
                "UNO": ["GND", "D8"],
                "BZ1": ["positive", "negative"],
            },
            wires=[
                ("BZ1.positive", "UNO.D8"), ("BZ1.negative", "UNO.GND"),
            ],
            code=(
                "void setup() {}\n\n"
                "void loop() {\n"
                "  tone(8, 1760);\n  delay(1000);\n"
                "  tone(8, 880);\n  delay(1000);\n"
                "  tone(8, 220);\n  delay(1000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "out-sawtooth",
        "category": "output",
        "description": (
            "Produce a sawtooth wave on an output, ramping from 0 to 5 volts "
            "every 50 milliseconds, smoothed by an RC low-pass filter."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "capacitor"),
            ("code_contains", "analogWrite"),
        ],
        "device": lambda: device(
            "sawtooth generator",
            parts=[
                ("UNO", "arduino uno"), ("R1", "resistor", "1k ohms"),
                ("C1", "capacitor", "10 uF"),
            ],
            pinouts={
                "UNO": ["GND", "D9"],
                "R1": ["1", "2"],
                "C1": ["1", "2"],
            },
            wires=[
                ("UNO.D9", "R1.1"), ("R1.2", "C1.1"), ("C1.2", "UNO.GND"),
            ],
            code=(
                "void setup() {\n  pinMode(9, OUTPUT);\n}\n\n"
                "void loop() {\n"
                "  for (int level = 0; level < 256; level++) {\n"
                "    analogWrite(9, level);\n    delayMicroseconds(195);  // 256 steps in 50 ms\n"
                "  }\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "sens-cds",
        "category": "sensors",
        "description": (
            "Read the ambient light level from a CDS photocell in a voltage "
            "divider every 500 milliseconds and print it to the serial port."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "cds cell"),
            ("requires_net", "UNO.A0", "CDS1.2"),
            ("code_contains", "analogRead"),
        ],
        "device": lambda: device(
            "light meter",
            parts=[
                ("UNO", "arduino uno"), ("CDS1", "cds photocell"),
                ("R1", "resistor", "10k ohms", "divider lower leg"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "A0"],
                "CDS1": ["1", "2"],
                "R1": ["1", "2"],
            },
            wires=[
                ("CDS1.1", "UNO.5V"), ("CDS1.2", "UNO.A0"),
                ("R1.1", "UNO.A0"), ("R1.2", "UNO.GND"),
            ],
            code=(
                "void setup() {\n  Serial.begin(9600);\n}\n\n"
                "void loop() {\n"
                "  Serial.println(analogRead(A0));\n  delay(500);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "sens-ultrasonic",
        "category": "sensors",
        "description": (
            "Measure the distance to the nearest object with an HC-SR04 "
            "ultrasonic sensor and print centimetres once per second."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "hc-sr04"),
            ("requires_net", "UNO.D10", "SR1.echo"),
            ("code_contains", "pulseIn"),
        ],
        "device": lambda: device(
            "distance meter",
            parts=[("UNO", "arduino uno"), ("SR1", "hc-sr04")],
            pinouts={
                "UNO": ["5V", "GND", "D9", "D10"],
                "SR1": ["vcc", "trig", "echo", "gnd"],
            },
            wires=[
                ("SR1.vcc", "UNO.5V"), ("SR1.gnd", "UNO.GND"),
                ("SR1.trig", "UNO.D9"), ("SR1.echo", "UNO.D10"),
            ],
            code=(
                "void setup() {\n"
                "  Serial.begin(9600);\n  pinMode(9, OUTPUT);\n  pinMode(10, INPUT);\n"
                "}\n\n"
                "void loop() {\n"
                "  digitalWrite(9, LOW);\n  delayMicroseconds(2);\n"
                "  digitalWrite(9, HIGH);\n  delayMicroseconds(10);\n"
                "  digitalWrite(9, LOW);\n"
                "  long duration = pulseIn(10, HIGH);\n"
                "  Serial.println(duration / 58);  // centimetres\n"
                "  delay(1000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "sens-magnetometer",
        "category": "sensors",
        "description": (
            "Read the x, y and z components of the magnetic field from an I2C "
            "magnetometer and print them to the serial port."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "magnetometer"),
            ("requires_net", "UNO.A5", "MAG1.scl"),
            ("code_contains", "Wire"),
        ],
        "device": lambda: device(
            "field meter",
            parts=[("UNO", "arduino uno"), ("MAG1", "i2c magnetometer")],
            pinouts={
                "UNO": ["3V3", "GND", "A4", "A5"],
                "MAG1": ["vcc", "gnd", "sda", "scl"],
            },
            wires=[
                ("MAG1.vcc", "UNO.3V3"), ("MAG1.gnd", "UNO.GND"),
                ("MAG1.sda", "UNO.A4"), ("MAG1.scl", "UNO.A5"),
            ],
            code=(
                "#include <Wire.h>\n\n"
                "void setup() {\n  Wire.begin();\n  Serial.begin(9600);\n}\n\n"
                "void loop() {\n"
                "  Wire.beginTransmission(0x1E);\n  Wire.write(0x03);\n"
                "  Wire.endTransmission(false);\n"
                "  Wire.requestFrom(0x1E, 6);\n"
                "  int x = (Wire.read() << 8) | Wire.read();\n"
                "  int z = (Wire.read() << 8) | Wire.read();\n"
                "  int y = (Wire.read() << 8) | Wire.read();\n"
                "  Serial.print(x); Serial.print(' ');\n"
                "  Serial.print(y); Serial.print(' ');\n"
                "  Serial.println(z);\n"
                "  delay(500);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "logic-simon",
        "category": "logic",
        "description": (
            "Implement the memory game Simon with 4 coloured pushbuttons, 4 "
            "matching LEDs, and a piezo buzzer for tones. Replay grows by one "
            "step each round."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "pushbutton"),
            ("requires_part", "piezo buzzer"),
            ("code_contains", "random"),
        ],
        "device": lambda: device(
            "simon game",
            parts=[
                ("UNO", "arduino uno"),
                ("BTN1", "pushbutton"), ("BTN2", "pushbutton"),
                ("BTN3", "pushbutton"), ("BTN4", "pushbutton"),
                ("RB1", "resistor", "10k ohms"), ("RB2", "resistor", "10k ohms"),
                ("RB3", "resistor", "10k ohms"), ("RB4", "resistor", "10k ohms"),
                ("LED1", "led", "red"), ("LED2", "led", "green"),
                ("LED3", "led", "blue"), ("LED4", "led", "yellow"),
                ("RL1", "resistor", "220 ohms"), ("RL2", "resistor", "220 ohms"),
                ("RL3", "resistor", "220 ohms"), ("RL4", "resistor", "220 ohms"),
                ("BZ1", "piezo buzzer"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9", "D10"],
                "BTN1": ["1", "2"], "BTN2": ["1", "2"], "BTN3": ["1", "2"], "BTN4": ["1", "2"],
                "RB1": ["1", "2"], "RB2": ["1", "2"], "RB3": ["1", "2"], "RB4": ["1", "2"],
                "LED1": ["anode", "cathode"], "LED2": ["anode", "cathode"],
                "LED3": ["anode", "cathode"], "LED4": ["anode", "cathode"],
                "RL1": ["1", "2"], "RL2": ["1", "2"], "RL3": ["1", "2"], "RL4": ["1", "2"],
                "BZ1": ["positive", "negative"],
            },
            wires=[
                ("RB1.1", "UNO.5V"), ("RB1.2", "BTN1.1"), ("UNO.D2", "BTN1.1"), ("BTN1.2", "UNO.GND"),
                ("RB2.1", "UNO.5V"), ("RB2.2", "BTN2.1"), ("UNO.D3", "BTN2.1"), ("BTN2.2", "UNO.GND"),
                ("RB3.1", "UNO.5V"), ("RB3.2", "BTN3.1"), ("UNO.D4", "BTN3.1"), ("BTN3.2", "UNO.GND"),
                ("RB4.1", "UNO.5V"), ("RB4.2", "BTN4.1"), ("UNO.D5", "BTN4.1"), ("BTN4.2", "UNO.GND"),
                ("UNO.D6", "RL1.1"), ("RL1.2", "LED1.anode"), ("LED1.cathode", "UNO.GND"),
                ("UNO.D7", "RL2.1"), ("RL2.2", "LED2.anode"), ("LED2.cathode", "UNO.GND"),
                ("UNO.D8", "RL3.1"), ("RL3.2", "LED3.anode"), ("LED3.cathode", "UNO.GND"),
                ("UNO.D9", "RL4.1"), ("RL4.2", "LED4.anode"), ("LED4.cathode", "UNO.GND"),
                ("BZ1.positive", "UNO.D10"), ("BZ1.negative", "UNO.GND"),
            ],
            code=(
                "int sequence[64];\nint length = 0;\n\n"
                "void setup() {\n"
                "  pinMode(2, INPUT);\n  pinMode(3, INPUT);\n"
                "  pinMode(4, INPUT);\n  pinMode(5, INPUT);\n"
                "  pinMode(6, OUTPUT);\n  pinMode(7, OUTPUT);\n"
                "  pinMode(8, OUTPUT);\n  pinMode(9, OUTPUT);\n"
                "  randomSeed(analogRead(A0));\n"
                "}\n\n"
                "void flash(int idx) {\n"
                "  digitalWrite(6 + idx, HIGH);\n"
                "  tone(10, 440 * (idx + 1), 300);\n"
                "  delay(400);\n"
                "  digitalWrite(6 + idx, LOW);\n  delay(100);\n"
                "}\n\n"
                "int readButton() {\n"
                "  while (true) {\n"
                "    if (digitalRead(2) == LOW) return 0;\n"
                "    if (digitalRead(3) == LOW) return 1;\n"
                "    if (digitalRead(4) == LOW) return 2;\n"
                "    if (digitalRead(5) == LOW) return 3;\n"
                "  }\n"
                "}\n\n"
                "void loop() {\n"
                "  sequence[length++] = random(4);\n"
                "  for (int i = 0; i < length; i++) flash(sequence[i]);\n"
                "  for (int i = 0; i < length; i++) {\n"
                "    if (readButton() != sequence[i]) {\n"
                "      tone(10, 110, 1000);\n      length = 0;\n      delay(1500);\n"
                "      return;\n"
                "    }\n"
                "    delay(250);\n"
                "  }\n"
                "  delay(800);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "logic-conway",
        "category": "logic",
        "description": (
            "Run Conway's Game of Life on an 8x8 LED matrix driven by a "
            "MAX7219, advancing one generation per second from a random seed."
        ),
        "checks": [
            ("erc_clean",),
            ("code_contains", "LedControl"),
        ],
        "device": lambda: device(
            "game of life matrix",
            parts=[("UNO", "arduino uno"), ("MTX1", "max7219 led matrix", "8x8")],
            pinouts={
                "UNO": ["5V", "GND", "D10", "D11", "D13"],
                "MTX1": ["vcc", "gnd", "din", "cs", "clk"],
            },
            wires=[
                ("MTX1.vcc", "UNO.5V"), ("MTX1.gnd", "UNO.GND"),
                ("MTX1.din", "UNO.D11"), ("MTX1.cs", "UNO.D10"), ("MTX1.clk", "UNO.D13"),
            ],
            code=(
                "#include <LedControl.h>\n\n"
                "LedControl lc(11, 13, 10, 1);\n"
                "byte world[8];\n\n"
                "int countNeighbours(int row, int col) {\n"
                "  int n = 0;\n"
                "  for (int dr = -1; dr <= 1; dr++) {\n"
                "    for (int dc = -1; dc <= 1; dc++) {\n"
                "      if (dr == 0 && dc == 0) continue;\n"
                "      int r = (row + dr + 8) % 8;\n"
                "      int c = (col + dc + 8) % 8;\n"
                "      if (world[r] & (1 << c)) n++;\n"
                "    }\n"
                "  }\n"
                "  return n;\n"
                "}\n\n"
                "void setup() {\n"
                "  lc.shutdown(0, false);\n  lc.setIntensity(0, 4);\n  lc.clearDisplay(0);\n"
                "  randomSeed(analogRead(A0));\n"
                "  for (int r = 0; r < 8; r++) world[r] = random(256);\n"
                "}\n\n"
                "void loop() {\n"
                "  byte next[8];\n"
                "  for (int r = 0; r < 8; r++) {\n"
                "    next[r] = 0;\n"
                "    for (int c = 0; c < 8; c++) {\n"
                "      int n = countNeighbours(r, c);\n"
                "      bool alive = world[r] & (1 << c);\n"
                "      if (n == 3 || (alive && n == 2)) next[r] |= (1 << c);\n"
                "    }\n"
                "  }\n"
                "  for (int r = 0; r < 8; r++) {\n"
                "    world[r] = next[r];\n    lc.setRow(0, r, world[r]);\n  }\n"
                "  delay(1000);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "logic-clock",
        "category": "logic",
        "description": (
            "Show a 24-hour clock on a 16x2 I2C LCD, with two pushbuttons to "
            "set the hours and minutes."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "pushbutton"),
            ("code_contains", "lcd"),
        ],
        "device": lambda: device(
            "settable clock",
            parts=[
                ("UNO", "arduino uno"), ("ILCD1", "i2c lcd backpack", "16x2"),
                ("BTN1", "pushbutton", None, "set hours"),
                ("BTN2", "pushbutton", None, "set minutes"),
                ("R1", "resistor", "10k ohms"), ("R2", "resistor", "10k ohms"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "A4", "A5", "D2", "D3"],
                "ILCD1": ["vcc", "gnd", "sda", "scl"],
                "BTN1": ["1", "2"], "BTN2": ["1", "2"],
                "R1": ["1", "2"], "R2": ["1", "2"],
            },
            wires=[
                ("ILCD1.vcc", "UNO.5V"), ("ILCD1.gnd", "UNO.GND"),
                ("ILCD1.sda", "UNO.A4"), ("ILCD1.scl", "UNO.A5"),
                ("R1.1", "UNO.5V"), ("R1.2", "BTN1.1"), ("UNO.D2", "BTN1.1"), ("BTN1.2", "UNO.GND"),
                ("R2.1", "UNO.5V"), ("R2.2", "BTN2.1"), ("UNO.D3", "BTN2.1"), ("BTN2.2", "UNO.GND"),
            ],
            code=(
                "#include <Wire.h>\n#include <LiquidCrystal_I2C.h>\n\n"
                "LiquidCrystal_I2C lcd(0x27, 16, 2);\n"
                "unsigned long lastTick = 0;\n"
                "int hours = 0, minutes = 0, seconds = 0;\n\n"
                "void setup() {\n"
                "  pinMode(2, INPUT);\n  pinMode(3, INPUT);\n"
                "  lcd.init();\n  lcd.backlight();\n"
                "}\n\n"
                "void loop() {\n"
                "  if (millis() - lastTick >= 1000) {\n"
                "    lastTick += 1000;\n    seconds++;\n"
                "    if (seconds == 60) { seconds = 0; minutes++; }\n"
                "    if (minutes == 60) { minutes = 0; hours = (hours + 1) % 24; }\n"
                "  }\n"
                "  if (digitalRead(2) == LOW) { hours = (hours + 1) % 24; delay(250); }\n"
                "  if (digitalRead(3) == LOW) { minutes = (minutes + 1) % 60; delay(250); }\n"
                "  lcd.setCursor(0, 0);\n"
                "  char buffer[17];\n"
                "  sprintf(buffer, \"%02d:%02d:%02d\", hours, minutes, seconds);\n"
                "  lcd.print(buffer);\n"
                "}\n"
            ),
        ),
    },
    {
        "id": "logic-airtemp",
        "category": "logic",
        "description": (
            "Read the air temperature from an analog sensor and show it as a "
            "colour on an RGB LED strip: blue when cold, green when mild, red "
            "when hot."
        ),
        "checks": [
            ("erc_clean",),
            ("requires_part", "neopixel"),
            ("code_contains", "analogRead"),
        ],
        "device": lambda: device(
            "temperature colour",
            parts=[
                ("UNO", "arduino uno"), ("TMP1", "tmp36 temperature sensor"),
                ("NEO1", "neopixel strip", "8 pixels"),
            ],
            pinouts={
                "UNO": ["5V", "GND", "A0", "D6"],
                "TMP1": ["vcc", "vout", "gnd"],
                "NEO1": ["vcc", "gnd", "din"],
            },
            wires=[
                ("TMP1.vcc", "UNO.5V"), ("TMP1.vout", "UNO.A0"), ("TMP1.gnd", "UNO.GND"),
                ("NEO1.vcc", "UNO.5V"), ("NEO1.gnd", "UNO.GND"), ("NEO1.din", "UNO.D6"),
            ],
            code=(
                "#include <Adafruit_NeoPixel.h>\n\n"
                "Adafruit_NeoPixel strip(8, 6, NEO_GRB + NEO_KHZ800);\n\n"
                "void setup() {\n  strip.begin();\n}\n\n"
                "void loop() {\n"
                "  int reading = analogRead(A0);\n"
                "  float celsius = (reading * 5.0 / 1024.0 - 0.5) * 100.0;\n"
                "  uint32_t colour;\n"
                "  if (celsius < 18) colour = strip.Color(0, 0, 255);\n"
                "  else if (celsius < 26) colour = strip.Color(0, 255, 0);\n"
                "  else colour = strip.Color(255, 0, 0);\n"
                "  for (int i = 0; i < 8; i++) strip.setPixelColor(i, colour);\n"
                "  strip.show();\n  delay(500);\n"
                "}\n"
            ),
        ),
    },
]


def doc_response(spec, prose="Here is the complete device specification.") -> str:
    return f"{prose}\n\n{render_document(spec).rstrip()}\n"


def stop_response() -> str:
    return f"I checked every item on the list and found no further errors. {STOP}\n"


def corrupt_led_sequence_response() -> str:
    """The led chaser with its four drive wires compressed into a pin range."""
    spec = next(t for t in MICRO25 if t["id"] == "out-led-sequence")["device"]()
    doc = spec_to_document(spec)
    kept = [row for row in doc["schematic"] if not row["from"].startswith("UNO.D")]
    doc["schematic"] = [{"from": "UNO.D2-D5", "to": "R1.1-R4.1"}] + kept
    body = json.dumps(doc, indent=2, ensure_ascii=False)
    return f"Here is the complete device specification.\n\n{body}\n"


class QueueTransport:
    """Serve scripted responses in order of novel prompts."""

    def __init__(self):
        self.queue: list[str] = []

    def push(self, *responses: str) -> None:
        self.queue.extend(responses)

    def __call__(self, prompt, params) -> str:
        if not self.queue:
            raise AssertionError("scripted responder ran out of responses")
        return self.queue.pop(0)


def record_button_led(template, kb) -> None:
    golden = button_led_device()
    # stop-token fixture: flawed first draft, corrected on the first reflection
    path = DATA / "transcripts" / "button_led.jsonl"
    path.unlink(missing_ok=True)
    transport = QueueTransport()
    transport.push(
        doc_response(flawed_button_led_device(), "Here is my first draft."),
        doc_response(golden, "I added the missing series resistor.") + "\n" + STOP + "\n",
    )
    provider = Provider.recording(transport, path)
    run = generate_device(BUTTON_LED_DESCRIPTION, provider, template, kb=kb)
    assert run.termination == "stop_token" and run.iterations == 2, run.termination
    assert run.erc_history[0].clean is False and run.erc_history[-1].clean is True

    # max-iterations fixture: the model never emits the stop token
    path = DATA / "transcripts" / "button_led_maxiter.jsonl"
    path.unlink(missing_ok=True)
    transport = QueueTransport()
    transport.push(
        doc_response(flawed_button_led_device(), "Here is my first draft."),
        doc_response(flawed_button_led_device(), "I reviewed the design and it looks right."),
    )
    provider = Provider.recording(transport, path)
    run = generate_device(BUTTON_LED_DESCRIPTION, provider, template, kb=kb, max_reflections=3)
    assert run.termination == "max_iterations" and run.iterations == 4

    # golden device file comes from replaying the stop-token fixture
    replay = Provider.replay(DATA / "transcripts" / "button_led.jsonl")
    run = generate_device(BUTTON_LED_DESCRIPTION, replay, template, kb=kb)
    report = run_erc(run.spec, kb)
    assert report.clean and not report.findings
    (DATA / "golden" / "button_led.device.json").write_text(
        canonical_serialize(run.spec), encoding="utf-8"
    )


def record_session(template, kb) -> None:
    path = DATA / "transcripts" / "session_refine.jsonl"
    path.unlink(missing_ok=True)
    transport = QueueTransport()
    transport.push(
        doc_response(flawed_button_led_device(), "Here is my first draft."),
        doc_response(button_led_device(), "I added the missing series resistor.") + "\n" + STOP + "\n",
        doc_response(refined_two_led_device(), "Added a second LED on pin D7."),
        stop_response(),
        doc_response(refined_two_led_d8_device(), "Moved the second LED to pin D8."),
        stop_response(),
    )
    provider = Provider.recording(transport, path)
    session = new_session("fixture-session")
    generate_in_session(session, BUTTON_LED_DESCRIPTION, provider, template, kb=kb)
    refine(session, "Add a second LED on pin D7 that lights whenever the first LED is off.",
           provider, template, kb=kb)
    refine(session, "Move the second LED from pin D7 to pin D8.", provider, template, kb=kb)
    assert len(session.turns) == 3
    led_count = sum(1 for item in session.current.bom if item.part_type == "led")
    assert led_count == 2


def record_micro25(template, kb) -> None:
    tasks_rows = []
    for entry in MICRO25:
        tasks_rows.append(
            {
                "id": entry["id"],
                "category": entry["category"],
                "description": entry["description"],
                "auto_checks": [
                    {"kind": check[0], "args": list(check[1:])} for check in entry["checks"]
                ],
            }
        )
    tasks_path = DATA / "micro25.tasks.json"
    tasks_path.write_text(json.dumps(tasks_rows, indent=2, ensure_ascii=False) + "\n", "utf-8")
    tasks = load_tasks(tasks_path)

    for variant, corrupt in (("micro25.jsonl", False), ("micro25_corrupt.jsonl", True)):
        path = DATA / "transcripts" / variant
        path.unlink(missing_ok=True)
        transport = QueueTransport()
        provider = Provider.recording(transport, path)
        for entry in MICRO25:
            if corrupt and entry["id"] == "out-led-sequence":
                transport.push(corrupt_led_sequence_response(), stop_response())
            else:
                transport.push(doc_response(entry["device"]()), stop_response())
            generate_device(entry["description"], provider, template, kb=kb)

        replay = Provider.replay(path)
        report = run_benchmark(tasks, replay, template, kb=kb)
        aggregates = report.aggregates()
        if corrupt:
            assert abs(aggregates["schematic_rate"] - 24 / 25) < 1e-12, aggregates
            assert aggregates["code_rate"] == 1.0
        else:
            assert aggregates["schematic_rate"] == 1.0, aggregates
            assert aggregates["code_rate"] == 1.0, aggregates


def main() -> None:
    (DATA / "transcripts").mkdir(parents=True, exist_ok=True)
    (DATA / "golden").mkdir(parents=True, exist_ok=True)

    template_data = build_template_data()
    (DATA / "template.prompt.json").write_text(
        json.dumps(template_data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    template = PromptTemplate.from_dict(template_data)
    kb = bundled_kb()

    record_button_led(template, kb)
    record_session(template, kb)
    record_micro25(template, kb)

    prompt = assemble_generation_prompt(template, BUTTON_LED_DESCRIPTION)
    print("generation prompt tokens (wordpunct):", count_prompt_tokens(prompt, "wordpunct"))
    print("fixtures written under", DATA)


if __name__ == "__main__":
    main()
