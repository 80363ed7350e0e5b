import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from circuitsmith.devicespec import parse_canonical
from circuitsmith.llmgateway import Provider
from circuitsmith.reference import BUTTON_LED_DESCRIPTION
from circuitsmith.service import create_app
from conftest import TRANSCRIPTS


@pytest.fixture
def app_factory(tmp_path, kb, template):
    def factory(providers=None, artifacts=None):
        providers = providers or {
            "replay": Provider.replay(TRANSCRIPTS / "session_refine.jsonl")
        }
        return create_app(
            providers, kb=kb, template=template,
            artifacts_dir=artifacts or tmp_path / "artifacts",
        )

    return factory


def start_session(client, provider="replay"):
    response = client.post("/sessions", json={"provider": provider})
    assert response.status_code == 201
    return response.json()["id"]


class TestSessionFlow:
    def test_generate_returns_clean_fixture(self, app_factory):
        client = TestClient(app_factory())
        session_id = start_session(client)
        response = client.post(
            f"/sessions/{session_id}/generate", json={"description": BUTTON_LED_DESCRIPTION}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["termination"] == "stop_token"
        assert body["erc"]["clean"] is True
        assert body["spec"]["bill_of_materials"]

    def test_spec_erc_export_history_endpoints(self, app_factory):
        client = TestClient(app_factory())
        session_id = start_session(client)
        client.post(f"/sessions/{session_id}/generate", json={"description": BUTTON_LED_DESCRIPTION})

        spec_text = client.get(f"/sessions/{session_id}/spec").text
        spec = parse_canonical(spec_text)
        assert spec.description == BUTTON_LED_DESCRIPTION

        erc = client.get(f"/sessions/{session_id}/erc").json()
        assert erc["clean"] is True

        flat = client.get(f"/sessions/{session_id}/export", params={"format": "flat"})
        assert flat.status_code == 200 and flat.text.startswith("# flat netlist")
        graph = client.get(f"/sessions/{session_id}/export", params={"format": "graph"})
        assert graph.status_code == 200
        doc = graph.json()
        assert len(doc["nodes"]) == len(spec.bom)

        history = client.get(f"/sessions/{session_id}/history").json()
        assert [t["turn"] for t in history["turns"]] == [1]
        assert history["turns"][0]["erc_errors"] == 0

    def test_refine_appends_turn(self, app_factory):
        client = TestClient(app_factory())
        session_id = start_session(client)
        client.post(f"/sessions/{session_id}/generate", json={"description": BUTTON_LED_DESCRIPTION})
        response = client.post(
            f"/sessions/{session_id}/refine",
            json={"text": "Add a second LED on pin D7 that lights whenever the first LED is off."},
        )
        assert response.status_code == 200
        assert response.json()["turn"] == 2
        led_count = sum(
            1 for row in response.json()["spec"]["bill_of_materials"] if row["part_type"] == "led"
        )
        assert led_count == 2

    def test_refine_before_generate_is_422(self, app_factory):
        client = TestClient(app_factory())
        session_id = start_session(client)
        response = client.post(f"/sessions/{session_id}/refine", json={"text": "tweak it"})
        assert response.status_code == 422
        assert response.json()["detail"]["error"] == "no_base_spec"

    def test_unknown_session_is_404(self, app_factory):
        client = TestClient(app_factory())
        for method, url in [
            ("get", "/sessions/nope/spec"),
            ("get", "/sessions/nope/erc"),
            ("get", "/sessions/nope/export"),
            ("post", "/sessions/nope/generate"),
        ]:
            response = getattr(client, method)(url, **({"json": {}} if method == "post" else {}))
            assert response.status_code == 404, url

    def test_unknown_provider_is_422(self, app_factory):
        client = TestClient(app_factory())
        response = client.post("/sessions", json={"provider": "missing"})
        assert response.status_code == 422

    def test_bad_export_format_is_422(self, app_factory):
        client = TestClient(app_factory())
        session_id = start_session(client)
        client.post(f"/sessions/{session_id}/generate", json={"description": BUTTON_LED_DESCRIPTION})
        response = client.get(f"/sessions/{session_id}/export", params={"format": "hpgl"})
        assert response.status_code == 422


class TestFailureMapping:
    def test_replay_miss_maps_to_502(self, app_factory, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        client = TestClient(app_factory(providers={"replay": Provider.replay(empty)}))
        session_id = start_session(client)
        response = client.post(f"/sessions/{session_id}/generate", json={"description": "x"})
        assert response.status_code == 502
        assert response.json()["detail"]["error"] == "ReplayMiss"

    def test_parse_failure_maps_to_422_with_diagnostics(self, app_factory):
        prose = Provider.live(lambda p, _: "no structured content here", name="prose")
        client = TestClient(app_factory(providers={"prose": prose}))
        session_id = start_session(client, provider="prose")
        response = client.post(f"/sessions/{session_id}/generate", json={"description": "x"})
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert detail["error"] == "parse_failure"
        assert "diagnostics" in detail


class TestConcurrencyAndRestart:
    def test_concurrent_turns_yield_one_200_and_one_409(self, app_factory, kb, template, tmp_path):
        from circuitsmith.devicespec import render_document
        from circuitsmith.reference import button_led_device

        release = threading.Event()
        started = threading.Event()
        document = render_document(button_led_device()) + "\nALL-CHECKS-PASSED\n"

        def slow_transport(prompt, params):
            started.set()
            release.wait(timeout=10)
            return document

        providers = {"slow": Provider.live(slow_transport, name="slow")}
        client = TestClient(app_factory(providers=providers))
        session_id = start_session(client, provider="slow")

        results = []

        def first():
            results.append(
                client.post(f"/sessions/{session_id}/generate", json={"description": "a"}).status_code
            )

        thread = threading.Thread(target=first)
        thread.start()
        assert started.wait(timeout=10)
        second = client.post(f"/sessions/{session_id}/generate", json={"description": "a"})
        release.set()
        thread.join(timeout=15)
        codes = sorted(results + [second.status_code])
        assert codes == [200, 409]

    def test_sessions_survive_restart(self, app_factory, tmp_path):
        artifacts = tmp_path / "persist"
        client = TestClient(app_factory(artifacts=artifacts))
        session_id = start_session(client)
        client.post(f"/sessions/{session_id}/generate", json={"description": BUTTON_LED_DESCRIPTION})
        spec_before = client.get(f"/sessions/{session_id}/spec").text

        fresh = TestClient(app_factory(artifacts=artifacts))
        spec_after = fresh.get(f"/sessions/{session_id}/spec").text
        assert spec_after == spec_before
        erc = fresh.get(f"/sessions/{session_id}/erc")
        assert erc.status_code == 200 and erc.json()["clean"] is True


def test_healthz(app_factory):
    client = TestClient(app_factory())
    assert client.get("/healthz").status_code == 200
