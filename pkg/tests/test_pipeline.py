import json

import pytest

from circuitsmith.devicespec import canonical_serialize, parse_canonical
from circuitsmith.erc import run_erc
from circuitsmith.llmgateway import Provider
from circuitsmith.pipeline import (
    NoBaseSpec,
    ParseFailure,
    PromptTemplate,
    Snippet,
    assemble_generation_prompt,
    assemble_reflection_prompt,
    bundled_template,
    generate_device,
    generate_in_session,
    new_session,
    refine,
    run_to_json,
)
from circuitsmith.reference import BUTTON_LED_DESCRIPTION, button_led_device
from conftest import GOLDEN


class TestTemplate:
    def test_bundled_template_shape(self, template):
        assert len(template.reflection_checklist) == 12
        kinds = [s.kind for s in template.snippets]
        assert kinds.count("positive") == 2 and kinds.count("negative") == 1
        assert template.stop_token == "ALL-CHECKS-PASSED"

    def test_snippet_minimums_enforced(self):
        with pytest.raises(ValueError):
            PromptTemplate(
                preamble="p", format_instructions="f", one_shot_example="e",
                snippets=(Snippet("positive", "a"),),
                reflection_checklist=("one",),
            )


class TestGenerationPrompt:
    def test_deterministic(self, template):
        a = assemble_generation_prompt(template, "blink a light")
        b = assemble_generation_prompt(template, "blink a light")
        assert a == b

    def test_section_order_and_task_at_end(self, template):
        prompt = assemble_generation_prompt(template, "drive a relay")
        order = [
            prompt.index(template.preamble[:40]),
            prompt.index("## Output format"),
            prompt.index("## Worked example"),
            prompt.index("### Correct pattern 1"),
            prompt.index("## Task"),
        ]
        assert order == sorted(order)
        assert prompt.rstrip().endswith("drive a relay")

    def test_empty_description_still_deterministic(self, template):
        prompt = assemble_generation_prompt(template, "")
        assert prompt == assemble_generation_prompt(template, "")
        assert prompt.rstrip().endswith("## Task")

    def test_exactly_one_negative_marker(self, template):
        prompt = assemble_generation_prompt(template, "x")
        assert prompt.count("### Incorrect pattern") == 1


class TestReflectionPrompt:
    def test_clean_report_reads_none(self, template, kb):
        spec = button_led_device()
        report = run_erc(spec, kb)
        prompt = assemble_reflection_prompt(template, spec, report)
        assert "## Automated check findings\n\nnone" in prompt
        for i in range(1, 13):
            assert f"{i}. " in prompt

    def test_findings_rendered_in_order(self, template, kb):
        from circuitsmith.reference import device

        spec = device(
            "servo and button problems",
            [("UNO", "arduino uno"), ("SERVO1", "hobby servo"), ("BTN1", "pushbutton")],
            {"UNO": ["D9", "D2", "GND"], "SERVO1": ["power", "ground", "signal"], "BTN1": ["1", "2"]},
            [("UNO.D9", "SERVO1.signal"), ("UNO.D2", "BTN1.1"), ("BTN1.2", "UNO.GND")],
        )
        report = run_erc(spec, kb)
        assert len(report.findings) >= 2
        prompt = assemble_reflection_prompt(template, spec, report)
        positions = [prompt.index(f.rule_id) for f in report.findings[:2]]
        assert positions == sorted(positions)

    def test_stop_token_appears_exactly_once(self, template, kb):
        spec = button_led_device()
        prompt = assemble_reflection_prompt(template, spec, run_erc(spec, kb))
        assert prompt.count(template.stop_token) == 1


class TestGenerateDevice:
    def test_stop_token_termination(self, template, kb, replay_button_led):
        run = generate_device(BUTTON_LED_DESCRIPTION, replay_button_led, template, kb=kb)
        assert run.iterations == 2
        assert run.termination == "stop_token"
        assert template.stop_token in run.responses[-1]
        assert run.erc_history[-1].clean

    def test_final_spec_matches_golden(self, template, kb, replay_button_led):
        run = generate_device(BUTTON_LED_DESCRIPTION, replay_button_led, template, kb=kb)
        golden = parse_canonical((GOLDEN / "button_led.device.json").read_text())
        assert run.spec == golden
        assert canonical_serialize(run.spec) == (GOLDEN / "button_led.device.json").read_text()

    def test_max_iterations_termination(self, template, kb, replay_button_led_maxiter):
        run = generate_device(
            BUTTON_LED_DESCRIPTION, replay_button_led_maxiter, template, kb=kb, max_reflections=3
        )
        assert run.iterations == 4
        assert run.termination == "max_iterations"
        assert all(template.stop_token not in r for r in run.responses)

    def test_loop_bound(self, template, kb, replay_button_led_maxiter):
        for limit in (0, 1, 2):
            run = generate_device(
                BUTTON_LED_DESCRIPTION, replay_button_led_maxiter, template,
                kb=kb, max_reflections=limit,
            )
            assert run.iterations <= 1 + limit

    def test_erc_history_non_strictly_improving(self, template, kb, replay_button_led):
        run = generate_device(BUTTON_LED_DESCRIPTION, replay_button_led, template, kb=kb)
        error_counts = [
            sum(1 for f in report.findings if f.severity == "error")
            for report in run.erc_history
        ]
        assert all(b <= a for a, b in zip(error_counts, error_counts[1:]))
        assert error_counts[0] >= 1  # the flawed draft starts dirty

    def test_replay_determinism_three_runs(self, template, kb, replay_button_led):
        artifacts = []
        for _ in range(3):
            run = generate_device(BUTTON_LED_DESCRIPTION, replay_button_led, template, kb=kb)
            artifacts.append(json.dumps(run_to_json(run), sort_keys=True))
        assert artifacts[0] == artifacts[1] == artifacts[2]

    def test_parse_failure_when_nothing_parses(self, template, kb):
        prose = Provider.live(lambda p, _: "I cannot help with that.", name="prose")
        with pytest.raises(ParseFailure):
            generate_device("anything", prose, template, kb=kb, max_reflections=2)

    def test_artifacts_written(self, template, kb, replay_button_led, tmp_path):
        run = generate_device(
            BUTTON_LED_DESCRIPTION, replay_button_led, template, kb=kb,
            artifacts_dir=tmp_path / "run",
        )
        names = {p.name for p in (tmp_path / "run").iterdir()}
        assert "run.json" in names and "final.device.json" in names
        assert "erc-round-00.json" in names and "spec-round-00.device.json" in names
        final = parse_canonical((tmp_path / "run" / "final.device.json").read_text())
        assert final == run.spec


class TestSessions:
    def test_generate_then_two_refines(self, template, kb, replay_session):
        session = new_session("fixture-session")
        generate_in_session(session, BUTTON_LED_DESCRIPTION, replay_session, template, kb=kb)
        assert len(session.turns) == 1
        refine(
            session,
            "Add a second LED on pin D7 that lights whenever the first LED is off.",
            replay_session, template, kb=kb,
        )
        led_count = sum(1 for item in session.current.bom if item.part_type == "led")
        assert led_count == 2
        refine(session, "Move the second LED from pin D7 to pin D8.", replay_session, template, kb=kb)
        assert len(session.turns) == 3
        assert session.current.pinouts.has_pin("UNO", "D8")
        assert session.current == session.turns[-1].run.spec

    def test_refine_without_base_spec(self, template, replay_session):
        with pytest.raises(NoBaseSpec):
            refine(new_session(), "add a thing", replay_session, template)


def test_bundled_prompt_token_count_regression(template):
    # Pinned from tools/make_fixtures.py output; update together with the template.
    from circuitsmith.llmgateway import count_prompt_tokens

    prompt = assemble_generation_prompt(template, BUTTON_LED_DESCRIPTION)
    assert count_prompt_tokens(prompt, "wordpunct") == 1120
