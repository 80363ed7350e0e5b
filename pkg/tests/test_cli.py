import json
import subprocess
import sys

import pytest

from circuitsmith.devicespec import canonical_serialize, render_document
from circuitsmith.reference import BUTTON_LED_DESCRIPTION, button_led_device
from conftest import DATA_DIR, GOLDEN, TRANSCRIPTS
from test_erc import rule_fixture

GOLDEN_SPEC = GOLDEN / "button_led.device.json"


def cli(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "circuitsmith", *args],
        capture_output=True, text=True, input=stdin, timeout=120,
    )


class TestExitCodes:
    def test_erc_clean_fixture_exits_zero(self):
        result = cli("erc", "--spec", str(GOLDEN_SPEC))
        assert result.returncode == 0, result.stderr
        assert json.loads(result.stdout)["clean"] is True

    def test_erc_power_fixture_exits_one_with_finding(self, tmp_path):
        spec_path = tmp_path / "servo.device.json"
        spec_path.write_text(canonical_serialize(rule_fixture("E-POWER")))
        result = cli("erc", "--spec", str(spec_path))
        assert result.returncode == 1
        report = json.loads(result.stdout)
        assert {f["rule_id"] for f in report["findings"]} == {"E-POWER"}

    def test_unknown_flag_exits_two(self):
        result = cli("erc", "--spec", str(GOLDEN_SPEC), "--frobnicate")
        assert result.returncode == 2
        assert "usage" in result.stderr.lower()

    def test_unknown_command_exits_two(self):
        assert cli("defragment").returncode == 2

    def test_validate_findings_exit_one(self, tmp_path):
        spec_path = tmp_path / "bad.device.json"
        spec_path.write_text(render_document(rule_fixture("E-UNDECLARED")))
        result = cli("validate", "--spec", str(spec_path))
        assert result.returncode == 1
        assert json.loads(result.stdout)[0]["kind"] == "undeclared_part"

    def test_missing_file_is_config_error(self):
        result = cli("erc", "--spec", "/nonexistent/x.device.json")
        assert result.returncode == 2


class TestStdinSupport:
    def test_validate_from_stdin(self):
        result = cli("validate", "--spec", "-", stdin=GOLDEN_SPEC.read_text())
        assert result.returncode == 0
        assert json.loads(result.stdout) == []


class TestExport:
    def test_flat_to_stdout(self):
        result = cli("export", "--spec", str(GOLDEN_SPEC), "--format", "flat", "--out", "-")
        assert result.returncode == 0
        assert result.stdout.startswith("# flat netlist")

    def test_graph_to_file(self, tmp_path):
        out = tmp_path / "graph.json"
        result = cli("export", "--spec", str(GOLDEN_SPEC), "--format", "graph", "--out", str(out))
        assert result.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["directed"] is False and doc["nodes"]


class TestScore:
    def test_score_pinouts_writes_report(self, tmp_path):
        generated = tmp_path / "gen.json"
        generated.write_text(json.dumps({
            "led": ["anode", "cathode"],
            "hobby servo": ["signal"],
        }))
        report_path = tmp_path / "report.json"
        result = cli(
            "score", "pinouts", "--generated", str(generated), "--report", str(report_path)
        )
        assert result.returncode == 0, result.stderr
        aggregate = json.loads(result.stdout)
        assert aggregate == {"n": 2, "strict_rate": 0.5, "permissive_rate": 0.5}
        report = json.loads(report_path.read_text())
        assert len(report["scores"]) == 2

    def test_unknown_component_is_config_error(self, tmp_path):
        generated = tmp_path / "gen.json"
        generated.write_text(json.dumps({"flux capacitor": ["a"]}))
        result = cli("score", "pinouts", "--generated", str(generated), "--report", "-")
        assert result.returncode == 2


class TestGenerate:
    def test_replay_generate_writes_artifacts(self, tmp_path):
        desc = tmp_path / "task.txt"
        desc.write_text(BUTTON_LED_DESCRIPTION)
        out = tmp_path / "run"
        result = cli(
            "generate",
            "--description-file", str(desc),
            "--provider", f"replay:{TRANSCRIPTS / 'button_led.jsonl'}",
            "--out", str(out),
        )
        assert result.returncode == 0, result.stderr
        payload = json.loads(result.stdout)
        assert payload["termination"] == "stop_token"
        assert (out / "final.device.json").is_file()

    def test_replay_miss_exits_one(self, tmp_path):
        desc = tmp_path / "task.txt"
        desc.write_text("a device the transcript has never seen")
        result = cli(
            "generate",
            "--description-file", str(desc),
            "--provider", f"replay:{TRANSCRIPTS / 'button_led.jsonl'}",
            "--out", str(tmp_path / "run"),
        )
        assert result.returncode == 1
        assert "provider failure" in result.stderr


class TestBench:
    def test_run_render_verdicts_round_trip(self, tmp_path):
        report_path = tmp_path / "report.json"
        result = cli(
            "bench", "run",
            "--tasks", str(DATA_DIR / "micro25.tasks.json"),
            "--provider", f"replay:{TRANSCRIPTS / 'micro25.jsonl'}",
            "--out", str(report_path),
        )
        assert result.returncode == 0, result.stderr
        aggregates = json.loads(result.stdout)
        assert aggregates["schematic_rate"] == 1.0

        rendered = cli("bench", "render", "--in", str(report_path))
        assert rendered.returncode == 0
        assert "overall: 100% / 100%" in rendered.stdout

        verdicts = tmp_path / "verdicts.json"
        verdicts.write_text(json.dumps([{"id": "in-button", "schematic": "fail"}]))
        updated = cli(
            "bench", "verdicts", "--in", str(report_path), "--verdicts", str(verdicts),
            "--out", str(tmp_path / "updated.json"),
        )
        assert updated.returncode == 0
        assert json.loads(updated.stdout)["schematic_rate"] == 24 / 25

    def test_corrupt_corpus_exits_one(self, tmp_path):
        result = cli(
            "bench", "run",
            "--tasks", str(DATA_DIR / "micro25.tasks.json"),
            "--provider", f"replay:{TRANSCRIPTS / 'micro25_corrupt.jsonl'}",
            "--out", str(tmp_path / "report.json"),
        )
        assert result.returncode == 1
        assert json.loads(result.stdout)["schematic_rate"] == 24 / 25


class TestParts:
    def test_show_known(self):
        result = cli("parts", "show", "HC-SR04")
        assert result.returncode == 0
        assert json.loads(result.stdout)["canonical_name"] == "hc-sr04"

    def test_show_unknown_exits_one(self):
        result = cli("parts", "show", "flux capacitor")
        assert result.returncode == 1
